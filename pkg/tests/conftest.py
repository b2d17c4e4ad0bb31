import random
import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from nilcycles.branch import PlanarSystem
from nilcycles.series import BiPoly

small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def bipolys(draw, max_deg=3, max_terms=5):
    n = draw(st.integers(0, max_terms))
    entries = []
    for _ in range(n):
        i = draw(st.integers(0, max_deg))
        j = draw(st.integers(0, max_deg - i))
        entries.append((i, j, draw(small_rationals)))
    return BiPoly.from_entries(entries)


def random_normal_form(rng: random.Random, degree: int, density: float = 0.5) -> PlanarSystem:
    """A random system dx/dt = y + h.o.t., dy/dt = h.o.t. of given total degree."""

    def coef():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 6))

    phi = {(0, 1): Fraction(1)}
    psi = {}
    for d in range(2, degree + 1):
        for i in range(d + 1):
            if rng.random() < density:
                phi[(i, d - i)] = coef()
            if rng.random() < density:
                psi[(i, d - i)] = coef()
    # make sure the degree is attained
    psi[(degree, 0)] = psi.get((degree, 0)) or Fraction(rng.choice([-3, -1, 1, 2]))
    return PlanarSystem(BiPoly(phi), BiPoly(psi))


@pytest.fixture
def rng():
    return random.Random(20261014)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
