"""Shared row container for tail-probability tables (family, Monte Carlo, model)."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TailRow:
    tau: float
    side: str  # 'large' or 'small'
    value: float  # estimate (probability) or nan when not estimable
    method: str  # 'empirical', 'montecarlo', 'saddle', 'asymptotic'
    count: int | None = None  # hits (empirical methods)
    n: int | None = None  # sample size (empirical methods)
    stderr: float | None = None
    ok: bool = True  # False when refused (too few hits)


@dataclass
class TailTable:
    rows: list = field(default_factory=list)

    def append(self, row: TailRow):
        self.rows.append(row)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def values(self):
        return [r.value for r in self.rows]
