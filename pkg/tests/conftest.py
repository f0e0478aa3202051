import pytest

from ufarcset.arcset import ArcSetInstance, FracPoint

A4 = (11, 15, 24, 50)


@pytest.fixture
def cap100():
    return ArcSetInstance(A4, (100,), 0), FracPoint((0.3, 0.5, 0.9, 0.1), (0.38,))


@pytest.fixture
def cap90():
    return ArcSetInstance(A4, (90,), 0), FracPoint((0.4, 0.5, 0.4, 0.4), (0.47,))


@pytest.fixture
def cap60():
    return ArcSetInstance(A4, (60,), 0), FracPoint((0.9, 0.5, 0.7, 0.1), (0.7,))


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""
    def record(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
