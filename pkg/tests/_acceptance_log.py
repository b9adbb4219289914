"""Shared accumulator for the acceptance suite's PASS/FAIL lines (printed in
the pytest terminal summary)."""

LINES = []


def record(line: str):
    LINES.append(line)
