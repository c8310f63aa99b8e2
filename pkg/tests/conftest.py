import functools
import warnings

import pytest

from ricci_links.shooting import solve_expander
from ricci_links.soliton import SolitonKind, integrate_soliton

# LSODA prints advisory warnings when it switches methods; they are not failures.
warnings.filterwarnings("ignore", message=".*lsoda.*")


@pytest.fixture(scope="session")
def cigar():
    return integrate_soliton(2, SolitonKind.STEADY, 2.0, 8.0)


@pytest.fixture(scope="session")
def long_cigar():
    return integrate_soliton(2, SolitonKind.STEADY, 2.0, 30.0)


@pytest.fixture(scope="session")
def bryant3():
    return integrate_soliton(3, SolitonKind.STEADY, 1.0, 8.0)


@pytest.fixture(scope="session")
def expander():
    """Cached ``solve_expander(n, c)`` shared across modules."""
    return functools.cache(solve_expander)


@pytest.fixture(scope="session")
def expander_4_05(expander):
    return expander(4, 0.5)


# -- acceptance reporting ---------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


class Criterion:
    """Records one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, lines):
        self._lines = lines
        self.number = None
        self.title = None
        self.done = False

    def begin(self, number, title):
        self.number, self.title = number, title

    def line(self, ok, detail):
        return f"criterion {self.number} {'PASS' if ok else 'FAIL'}: {self.title} ({detail})"

    def check(self, ok, detail):
        text = self.line(ok, detail)
        print(text)
        self._lines.append(text)
        self.done = True
        assert ok, text


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])
    c = Criterion(lines)
    yield c
    if c.number is not None and not c.done:
        lines.append(c.line(False, "raised before completing"))


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for text in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(text)
