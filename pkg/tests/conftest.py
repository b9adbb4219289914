import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from tests._acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def family_100():
    from cubiclab.family import enumerate_family

    return enumerate_family(100)


@pytest.fixture(scope="session")
def family_1e4():
    from cubiclab.family import enumerate_family

    return enumerate_family(10**4)


@pytest.fixture(scope="session")
def family_1e5():
    from cubiclab.family import enumerate_family

    return enumerate_family(10**5)


@pytest.fixture(scope="session")
def family_1e5_with_lvalues(family_1e5):
    """The X = 1e5 slice with truncated-series L-values at the default
    truncation; shared by the family-vs-model acceptance criteria."""
    from cubiclab.family import l_values

    return family_1e5, l_values(family_1e5)
