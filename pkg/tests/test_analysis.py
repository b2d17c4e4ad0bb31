from fractions import Fraction as F

import pytest

from nilcycles.analysis import (
    Classification,
    InvalidDegree,
    Stability,
    UndeterminedAtTruncation,
    analyze,
    beta_coefficients,
    classify,
    cycle_upper_bound,
    intersection_multiplicity,
    multiplicity,
    predicted_cycles,
    trace_series,
)
from nilcycles.branch import PlanarSystem
from nilcycles.families import builtin_family, evaluate
from nilcycles.series import BiPoly

from conftest import random_normal_form

x, y = BiPoly.x(), BiPoly.y()


def cubic(eps):
    return evaluate(builtin_family("cubic_n3"), {"eps": F(eps)})


def lienard(m, n, *betas):
    fam = builtin_family(f"lienard({m},{n})")
    return evaluate(fam, {f"beta{2 * k}": F(b) for k, b in enumerate(betas, 1)})


# -- multiplicity -------------------------------------------------------------

def test_multiplicity_read_off():
    assert multiplicity(PlanarSystem(y, -x**3 + 0 * y)) == (3, -1)


def test_multiplicity_cubic():
    assert multiplicity(cubic(F(1, 2))) == (9, -2)


def test_multiplicity_undetermined_for_nonisolated_origin():
    # psi vanishes identically on the branch y = 0
    with pytest.raises(UndeterminedAtTruncation):
        multiplicity(PlanarSystem(y, x * y), limit=12)


def test_multiplicity_limit_too_small():
    with pytest.raises(UndeterminedAtTruncation):
        multiplicity(cubic(0), limit=8)


def test_multiplicity_stable_under_order(rng):
    for _ in range(15):
        sys = random_normal_form(rng, 3)
        N, a = multiplicity(sys)
        r1, r2 = analyze(sys, N + 2), analyze(sys, N + 8)
        assert (r1.N, r1.alpha) == (r2.N, r2.alpha) == (N, a)
        assert r1.beta_values == r2.beta_values[: len(r1.beta_values)]


# -- trace and betas ------------------------------------------------------------

def test_trace_cubic_eps0():
    t = trace_series(cubic(0), 8)
    assert t.valuation() == 4 and t[4] == -7


def test_trace_cubic_quarter():
    t = trace_series(cubic(F(1, 4)), 8)
    assert t[2] == F(1, 2) and t[4] == -7
    assert t[3] == -2 * F(1, 4) ** 2


def test_trace_lienard_is_input_polynomial():
    t = trace_series(lienard(1, 2, F(-1, 100), 1), 8)
    assert t.nonzero_terms() == {2: F(-1, 100), 4: F(1)}


def test_betas_and_odd_split():
    betas, odd = beta_coefficients(trace_series(cubic(F(1, 4)), 8))
    assert betas[:2] == [(1, F(1, 2)), (2, F(-7))]
    assert dict(odd)[3] == F(-1, 8)


@pytest.mark.parametrize("m,n", [(1, 1), (1, 3), (2, 2), (3, 1)])
def test_lienard_roundtrip(m, n):
    vals = [F(k * (-1) ** k, k + 2) for k in range(1, n + 1)]
    r = analyze(lienard(m, n, *vals))
    assert r.N == 2 * m + 1 and r.alpha == -1
    assert r.beta_values[:n] == vals
    assert all(b == 0 for b in r.beta_values[n:])


# -- classification ---------------------------------------------------------------

def test_cubic_node():
    r = analyze(cubic(0))
    assert (r.N, r.m, r.alpha, r.n_star) == (9, 4, -2, 2)
    assert r.delta == 9
    assert r.classification is Classification.NODE and r.condition == "C2"
    assert r.stability is Stability.STABLE


def test_lienard_focus():
    r = analyze(lienard(1, 1, -1))
    assert r.classification is Classification.FOCUS
    assert r.stability is Stability.STABLE
    assert analyze(lienard(1, 1, 1)).stability is Stability.UNSTABLE


def test_condition_c1():
    # m = 4, n* = 1: 2 < 4
    r = analyze(lienard(4, 1, F(1, 3)))
    assert r.classification is Classification.NODE and r.condition == "C1"
    assert r.stability is Stability.UNSTABLE


def test_c2_with_negative_delta_is_focus():
    # m = 2, n* = 1, delta = 1/4 - 12 < 0
    r = analyze(lienard(2, 1, F(1, 2)))
    assert r.delta < 0 and r.classification is Classification.FOCUS


def test_saddle_like():
    r = analyze(PlanarSystem(y, x**3 + x**2 * y))
    assert r.classification is Classification.SADDLE_LIKE
    assert r.stability is Stability.UNDETERMINED


def test_even_multiplicity():
    r = analyze(PlanarSystem(y, x**2))
    assert r.N == 2 and r.m is None
    assert r.classification is Classification.EVEN_MULTIPLICITY


def test_all_betas_vanish():
    r = analyze(PlanarSystem(y, -x**3))
    assert r.n_star is None and r.delta is None
    assert r.classification is Classification.UNDETERMINED


def test_classification_total(rng):
    for _ in range(30):
        r = analyze(random_normal_form(rng, rng.randint(2, 4)))
        assert isinstance(r.classification, Classification)
        if r.classification is Classification.NODE:
            assert r.N % 2 == 1 and r.alpha < 0
            assert 2 * r.n_star < r.m or (2 * r.n_star == r.m and r.delta >= 0)
        if r.n_star is not None:
            assert all(b == 0 for k, b in r.betas if k < r.n_star)
            assert r.beta(r.n_star) != 0


def test_classify_ignores_odd_terms():
    base = classify(9, F(-2), [(1, F(0)), (2, F(-7))], 4)
    noisy = classify(9, F(-2), [(1, F(0)), (2, F(-7))], 4, [(1, F(5)), (3, F(-9))])
    assert base.classification == noisy.classification
    assert base.stability == noisy.stability


def test_report_serializes_exact_strings():
    d = analyze(cubic(0)).to_dict()
    assert d["alpha"] == "-2" and d["betas"]["beta4"] == "-7" and d["delta"] == "9"


# -- cycle prediction and bound -------------------------------------------------------

def test_predicted_one():
    assert predicted_cycles([F(-1, 100), 1], F(1, 10)).count == 1


def test_predicted_two():
    assert predicted_cycles([F(1, 10**4), F(-1, 100), 1]).count == 2


def test_predicted_cubic_quarter():
    assert predicted_cycles([F(1, 2), -7], F(1, 10)).count == 1


def test_predicted_not_applicable():
    p = predicted_cycles([F(1, 100), 1])
    assert p.count is None and "same sign" in p.violation
    p = predicted_cycles([F(1, 2), -1], F(1, 10))
    assert p.count is None and p.signs_alternate == [True] and p.separated == [False]
    assert predicted_cycles([0, F(-1, 100), 1]).count is None


def test_predicted_requires_top():
    with pytest.raises(ValueError):
        predicted_cycles([F(1), 0])


@pytest.mark.parametrize("deg,bound", [(3, 1), (5, 5), (7, 11), (9, 19)])
def test_bound(deg, bound):
    assert cycle_upper_bound(deg) == bound


@pytest.mark.parametrize("deg", [2, 4, 1, -3, 0])
def test_bound_rejects(deg):
    with pytest.raises(InvalidDegree):
        cycle_upper_bound(deg)


# -- perturbed multiplicity conservation --------------------------------------------

def test_perturbed_critical_points_sum_to_base_multiplicity():
    # dx/dt = y, dy/dt = (x - 1/3)(x - 1/2)^2 collapses to x^3 as the roots merge
    f = (x - F(1, 3)) * (x - F(1, 2)) ** 2
    counts = []
    for root in (F(1, 3), F(1, 2)):
        assert f.evaluate(root, 0) == 0
        counts.append(intersection_multiplicity(y.shift(root, 0), f.shift(root, 0), 10)[0])
    assert counts == [1, 2]
    N, A = multiplicity(PlanarSystem(y, x**3))
    assert (N, A) == (3, 1)
    assert sum(counts) == N
