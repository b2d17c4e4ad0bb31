from fractions import Fraction as F

import pytest

from nilcycles.branch import MalformedSystem, PlanarSystem, branch_residual, solve_branch
from nilcycles.families import builtin_family, evaluate, lambda_from_epsilon, QUINTIC_PARAMS
from nilcycles.series import BiPoly, UniSeries

from conftest import random_normal_form

x, y = BiPoly.x(), BiPoly.y()


def cubic(eps):
    return evaluate(builtin_family("cubic_n3"), {"eps": F(eps)})


def quintic_base():
    lam = lambda_from_epsilon(0, 0, 0, 0, 0)
    return evaluate(builtin_family("quintic_z2"), dict(zip(QUINTIC_PARAMS, lam)))


def test_pure_y_branch_is_zero():
    sys = PlanarSystem(y, -x**3)
    yb = solve_branch(sys, 10)
    assert yb.is_zero()
    assert branch_residual(sys, yb).is_zero()


@pytest.mark.parametrize("eps", [F(0), F(1, 4), F(1, 2), F(-3, 5)])
def test_cubic_branch_closed_form(eps):
    yb = solve_branch(cubic(eps), 8)
    expected = UniSeries.from_dict({2: -1, 5: 1, 6: eps, 7: eps**2, 8: -2 + eps**3}, 8)
    assert yb == expected


def test_cubic_branch_residual():
    sys = cubic(F(1, 2))
    assert branch_residual(sys, solve_branch(sys, 8)).is_zero()


def test_quintic_branch_residual_order_26():
    sys = quintic_base()
    r = branch_residual(sys, solve_branch(sys, 26))
    assert r.order == 26 and r.is_zero()


def test_random_systems_residual_vanishes(rng):
    for trial in range(100):
        sys = random_normal_form(rng, rng.randint(2, 5), density=0.4)
        K = rng.randint(6, 14)
        yb = solve_branch(sys, K)
        assert yb.order == K
        assert yb[0] == 0
        assert branch_residual(sys, yb).is_zero(), f"trial {trial}"


def test_residual_at_order_40(rng):
    sys = random_normal_form(rng, 3)
    assert branch_residual(sys, solve_branch(sys, 40)).is_zero()


def test_truncation_stability(rng):
    for _ in range(10):
        sys = random_normal_form(rng, rng.randint(2, 4))
        lo, hi = solve_branch(sys, 10), solve_branch(sys, 15)
        assert hi.truncate(10) == lo


def _random_z2(rng):
    terms_phi = {(0, 1): F(1)}
    terms_psi = {}
    for d in (3, 5):
        for i in range(d + 1):
            if rng.random() < 0.5:
                terms_phi[(i, d - i)] = F(rng.randint(-5, 5), rng.randint(1, 4))
            if rng.random() < 0.5:
                terms_psi[(i, d - i)] = F(rng.randint(-5, 5), rng.randint(1, 4))
    return PlanarSystem(BiPoly(terms_phi), BiPoly(terms_psi))


def test_z2_branch_is_odd(rng):
    for _ in range(20):
        sys = _random_z2(rng)
        assert sys.is_z2_symmetric()
        yb = solve_branch(sys, 15)
        assert yb.reflect() == -yb


def test_cubic_branch_mixes_parity():
    yb = solve_branch(cubic(F(1, 4)), 8)
    assert not cubic(F(1, 4)).is_z2_symmetric()
    assert yb[2] != 0 and yb[5] != 0


@pytest.mark.parametrize(
    "phi,psi",
    [
        (2 * y + x**2, x**3),          # y coefficient not 1
        (y + x, x**3),                 # linear x in phi
        (y + x**2, x + x**3),          # linear term in psi
        (y + 1, x**3),                 # origin not critical
        (x**2, x**3),                  # y coefficient zero
    ],
)
def test_malformed_systems_rejected(phi, psi):
    with pytest.raises(MalformedSystem):
        solve_branch(PlanarSystem(phi, psi), 5)
