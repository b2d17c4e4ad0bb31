from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcycles.families import builtin_family, evaluate
from nilcycles.series import (
    BiPoly,
    UniSeries,
    as_rational,
    poly_add,
    poly_mul,
    poly_partial,
    series_add,
    series_mul,
    series_truncate,
    substitute_y,
)

from conftest import bipolys, small_rationals

x, y = BiPoly.x(), BiPoly.y()


def series(order, max_len=None):
    return st.lists(small_rationals, min_size=order + 1, max_size=order + 1).map(
        lambda cs: UniSeries(cs, order)
    )


# -- rational coercion ------------------------------------------------------

@pytest.mark.parametrize("text,value", [("-523/4", F(-523, 4)), ("7", F(7)), (3, F(3))])
def test_as_rational_accepts_exact(text, value):
    assert as_rational(text) == value


@pytest.mark.parametrize("bad", [0.5, "1e-4", "0.25", float("nan")])
def test_as_rational_rejects_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        as_rational(bad)


# -- BiPoly -----------------------------------------------------------------

def test_additive_inverse_cancels():
    p = x**2 * y
    assert poly_add(p, -p).is_zero()
    assert poly_add(p, -p) == BiPoly()


def test_disjoint_sum():
    assert poly_add(y + x**2, x**3) == BiPoly({(0, 1): 1, (2, 0): 1, (3, 0): 1})


def test_absent_coefficient_is_zero():
    p = BiPoly({(2, 1): 3, (1, 1): 0})
    assert p.coeff(5, 5) == 0
    assert (1, 1) not in p.terms
    assert p == BiPoly({(2, 1): 3})


def test_degree_accessors():
    p = BiPoly({(4, 1): 1, (0, 3): 2, (1, 0): 1})
    assert (p.total_degree, p.x_degree, p.y_degree) == (5, 4, 3)


def test_cubic_phi_assembled_term_by_term():
    eps = F(3, 7)
    fam = evaluate(builtin_family("cubic_n3"), {"eps": eps})
    manual = y + x**2 + eps**2 * y**2 + eps**2 * x**2 * y - x * y**2 + eps * y**3
    assert fam.phi == manual


def test_difference_of_squares():
    assert poly_mul(x + y, x - y) == x**2 - y**2


def test_product_with_zero():
    assert poly_mul(x**3 + 5 * y, BiPoly()).is_zero()


def test_factored_product_expands():
    e1, e2 = F(1, 3), F(1, 2)
    expanded = x**2 - (e1 + e2) * x + e1 * e2
    assert poly_mul(x - e1, x - e2) == expanded


def test_partials():
    assert poly_partial(x**2 * y, "x") == 2 * x * y
    assert poly_partial(y + x**2, "y") == BiPoly.constant(1)


def test_cubic_divergence_restricted_starts_at_x4():
    from nilcycles.branch import solve_branch

    sys = evaluate(builtin_family("cubic_n3"), {"eps": 0})
    div = poly_partial(sys.phi, "x") + poly_partial(sys.psi, "y")
    trace = substitute_y(div, solve_branch(sys, 8))
    assert trace.valuation() == 4
    assert trace[4] == -7


@settings(max_examples=60, deadline=None)
@given(bipolys(), bipolys(), bipolys())
def test_bipoly_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@settings(max_examples=40, deadline=None)
@given(bipolys(), small_rationals, small_rationals)
def test_evaluate_is_ring_morphism(a, x0, y0):
    b = a * a + 3 * a
    assert b.evaluate(x0, y0) == a.evaluate(x0, y0) ** 2 + 3 * a.evaluate(x0, y0)


def test_shift_recentres():
    p = (x - F(1, 3)) * (x - F(1, 2)) ** 2 + y
    q = p.shift(F(1, 2), 0)
    assert q.coeff(0, 0) == 0 and q.coeff(1, 0) == 0 and q.coeff(2, 0) == F(1, 6)


# -- UniSeries --------------------------------------------------------------

def test_series_product_small():
    a = UniSeries([1, 1, 0], 2)
    b = UniSeries([1, -1, 0], 2)
    assert series_mul(a, b) == UniSeries([1, 0, -1], 2)


def test_truncate_lowers_order():
    s = series_truncate(UniSeries([1, 1, 1], 2), 1)
    assert s.order == 1 and s.coeffs == (1, 1)


def test_truncate_cannot_extend():
    with pytest.raises(ValueError):
        series_truncate(UniSeries([1, 1], 1), 3)


def test_product_beyond_order_vanishes():
    p = series_mul(UniSeries.monomial(2, 8), UniSeries.monomial(7, 8))
    assert p.order == 8 and p.is_zero()


def test_mixed_orders_take_minimum():
    a = UniSeries([1, 2, 3, 4, 5], 4)
    b = UniSeries([1, 1], 1)
    assert series_add(a, b).order == 1
    assert series_mul(a, b).order == 1


def test_index_beyond_order_raises():
    with pytest.raises(IndexError):
        UniSeries([1, 2], 1)[2]


@settings(max_examples=60, deadline=None)
@given(series(5), series(5), series(5))
def test_series_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(series(6), series(6))
def test_product_is_convolution(a, b):
    p = a * b
    for k in range(7):
        assert p[k] == sum(a[i] * b[k - i] for i in range(k + 1))


# -- substitution -----------------------------------------------------------

def test_substitute_zero_branch():
    A = F(-5, 2)
    s = substitute_y(A * x**3 + y, UniSeries.zero(6))
    assert s == UniSeries.from_dict({3: A}, 6)


def test_substitute_cubic_branch_into_psi():
    from nilcycles.branch import solve_branch

    sys = evaluate(builtin_family("cubic_n3"), {"eps": F(2, 9)})
    r = substitute_y(sys.psi, solve_branch(sys, 9))
    assert r.valuation() == 9 and r[9] == -2


def test_substitute_diagonal_cancels():
    assert substitute_y(x - y, UniSeries([0, 1, 0, 0], 3)).is_zero()


def _no_constant(s: UniSeries) -> UniSeries:
    return UniSeries((0,) + s.coeffs[1:], s.order)


@settings(max_examples=50, deadline=None)
@given(bipolys(), bipolys(), series(6))
def test_substitute_linear_and_multiplicative(a, b, s):
    s = _no_constant(s)
    assert substitute_y(a + b, s) == substitute_y(a, s) + substitute_y(b, s)
    assert substitute_y(a * b, s) == substitute_y(a, s) * substitute_y(b, s)


@settings(max_examples=50, deadline=None)
@given(bipolys(max_deg=3), st.lists(small_rationals, min_size=3, max_size=3), small_rationals)
def test_substitute_then_evaluate(a, cs, x0):
    # s of degree 2 and a of degree 3 stay below order 12: nothing is truncated
    s = UniSeries([0] + cs[:2] + [0] * 10, 12)
    lhs = substitute_y(a, s).evaluate(x0)
    assert lhs == a.evaluate(x0, s.evaluate(x0))
