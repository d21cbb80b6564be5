from fractions import Fraction

from hypothesis import settings, strategies as st

from torofold.pseries import TruncatedSeries

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_q = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
exps = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))


@st.composite
def series(draw, trunc=6, max_terms=6, unit=False):
    terms = draw(st.dictionaries(exps, small_q, max_size=max_terms))
    if unit:
        terms[(0, 0, 0)] = draw(small_q.filter(bool))
    return TruncatedSeries(terms, trunc)


@st.composite
def monomial_images(draw, trunc=6):
    """Images of x, y, z under a monomial chart with nonzero unimodular-free exponents."""
    out = []
    for _ in range(3):
        e = draw(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).filter(any))
        out.append(TruncatedSeries.monomial(e, 1, trunc))
    return out


# -- acceptance reporting -------------------------------------------------------------

import time

import pytest

ACCEPTANCE_LINES: list[str] = []


class Criterion:
    """Times one acceptance criterion and records a single pass/fail line."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.seconds = time.perf_counter() - self.start
        ok = exc_type is None and self.seconds < self.limit
        why = self.detail if exc_type is None else f"{exc_type.__name__}: {exc}".splitlines()[0]
        ACCEPTANCE_LINES.append(
            f"criterion {self.number} {'PASS' if ok else 'FAIL'}  {self.title}  "
            f"[{self.seconds:.1f}s / {self.limit:.0f}s] {why}"
        )
        return False

    def check_time(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit, f"took {elapsed:.1f}s, limit {self.limit:.0f}s"


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
