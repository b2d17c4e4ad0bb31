"""Parametric planar families, perturbation schedules and schedule checks.

A :class:`ParametricSystem` stores every coefficient of dx/dt and dy/dt as a
:class:`ParamPoly`, a sparse polynomial over Q in named parameters.
Evaluating at a rational point gives an exact :class:`PlanarSystem`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .analysis import (
    DEFAULT_RATIO,
    Classification,
    CyclePrediction,
    NilpotentReport,
    analyze,
    predicted_cycles,
)
from .branch import MalformedSystem, PlanarSystem
from .series import BiPoly, as_rational

__all__ = [
    "ParamPoly",
    "ParametricSystem",
    "Schedule",
    "PlanReport",
    "UnknownFamily",
    "MissingParameter",
    "builtin_family",
    "lienard",
    "cubic_n3",
    "quintic_z2",
    "quintic_z2_epsilon",
    "lambda_from_epsilon",
    "alpha25_closed_form",
    "evaluate",
    "check_schedule",
]


class UnknownFamily(KeyError):
    pass


class MissingParameter(KeyError):
    pass


class ParamPoly:
    """Sparse polynomial over Q in named parameters.

    Monomials are sorted tuples of ``(name, exponent)`` pairs, so two equal
    polynomials always have identical term maps.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        self._terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def var(cls, name: str) -> "ParamPoly":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def const(cls, c) -> "ParamPoly":
        return cls({(): as_rational(c)})

    @staticmethod
    def lift(value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            return value
        return ParamPoly.const(value)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def variables(self) -> set[str]:
        return {name for mono in self._terms for name, _ in mono}

    def is_constant(self) -> bool:
        return all(mono == () for mono in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            try:
                other = ParamPoly.lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other) -> "ParamPoly":
        other = ParamPoly.lift(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ParamPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "ParamPoly":
        return self + (-ParamPoly.lift(other))

    def __rsub__(self, other) -> "ParamPoly":
        return ParamPoly.lift(other) + (-self)

    def __mul__(self, other) -> "ParamPoly":
        other = ParamPoly.lift(other)
        out: dict[tuple, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                k = _mono_mul(m1, m2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return ParamPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ParamPoly":
        c = as_rational(other)
        return ParamPoly({k: v / c for k, v in self._terms.items()})

    def __pow__(self, n: int) -> "ParamPoly":
        result = ParamPoly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self._terms.items():
            term = c
            for name, e in mono:
                if name not in point:
                    raise MissingParameter(name)
                term *= as_rational(point[name]) ** e
            total += term
        return total

    def substitute(self, subs: Mapping[str, "ParamPoly"]) -> "ParamPoly":
        """Replace parameters by polynomials in other parameters."""
        out = ParamPoly()
        for mono, c in self._terms.items():
            term = ParamPoly.const(c)
            for name, e in mono:
                base = ParamPoly.lift(subs[name]) if name in subs else ParamPoly.var(name)
                term = term * base**e
            out = out + term
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return "ParamPoly(0)"
        parts = []
        for mono, c in sorted(self._terms.items(), key=lambda kv: kv[0]):
            m = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            parts.append(f"{c}*{m}" if m else str(c))
        return "ParamPoly(" + " + ".join(parts) + ")"


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


@dataclass(frozen=True)
class ParametricSystem:
    """Planar system whose coefficients are polynomials in ``params``.

    ``top`` is the index n of the coefficient beta_2n that stays nonzero at
    the unperturbed point; schedule checks look at beta_2..beta_2n.
    """

    name: str
    phi_coeffs: Mapping[tuple[int, int], ParamPoly]
    psi_coeffs: Mapping[tuple[int, int], ParamPoly]
    params: tuple[str, ...]
    top: int | None = None
    degree: int = field(init=False)

    def __post_init__(self):
        deg = max((i + j for c in (self.phi_coeffs, self.psi_coeffs) for (i, j) in c), default=0)
        object.__setattr__(self, "degree", deg)

    def coefficient(self, which: str, i: int, j: int) -> ParamPoly:
        table = self.phi_coeffs if which == "phi" else self.psi_coeffs
        return table.get((i, j), ParamPoly())

    def substitute(self, subs: Mapping[str, ParamPoly], params: Sequence[str], name=None) -> "ParametricSystem":
        return ParametricSystem(
            name=name or self.name,
            phi_coeffs={k: v.substitute(subs) for k, v in self.phi_coeffs.items()},
            psi_coeffs={k: v.substitute(subs) for k, v in self.psi_coeffs.items()},
            params=tuple(params),
            top=self.top,
        )

    def evaluate(self, point: Mapping[str, object]) -> PlanarSystem:
        return evaluate(self, point)


def evaluate(family: ParametricSystem, point: Mapping[str, object]) -> PlanarSystem:
    """Exact planar system at a rational parameter point."""
    point = {k: as_rational(v) for k, v in point.items()}
    missing = [p for p in family.params if p not in point]
    if missing:
        raise MissingParameter(f"no value for parameter(s) {', '.join(missing)}")
    phi = BiPoly({k: v.evaluate(point) for k, v in family.phi_coeffs.items()})
    psi = BiPoly({k: v.evaluate(point) for k, v in family.psi_coeffs.items()})
    sys = PlanarSystem(phi, psi)
    sys.check_normal_form()
    return sys


# -- builtin families -------------------------------------------------------

def _P(c) -> ParamPoly:
    return ParamPoly.const(c)


def lienard(m: int, n: int) -> ParametricSystem:
    """dx/dt = y, dy/dt = -x^(2m+1) + y * sum_k beta_2k x^(2k), k = 1..n."""
    if m < 1 or n < 1:
        raise ValueError("lienard(m, n) needs m, n >= 1")
    params = tuple(f"beta{2 * k}" for k in range(1, n + 1))
    psi = {(2 * m + 1, 0): _P(-1)}
    for k in range(1, n + 1):
        psi[(2 * k, 1)] = ParamPoly.var(f"beta{2 * k}")
    return ParametricSystem(f"lienard({m},{n})", {(0, 1): _P(1)}, psi, params, top=n)


def cubic_n3() -> ParametricSystem:
    """Cubic family with a multiplicity-9 nilpotent node; one parameter ``eps``."""
    e = ParamPoly.var("eps")
    phi = {
        (0, 1): _P(1),
        (2, 0): _P(1),
        (0, 2): e**2,
        (2, 1): e**2,
        (1, 2): _P(-1),
        (0, 3): e,
    }
    psi = {
        (1, 1): _P(-2),
        (0, 2): -2 * e,
        (3, 0): _P(-2),
        (2, 1): -2 * e,
        (0, 3): _P(-2),
    }
    return ParametricSystem("cubic_n3", phi, psi, ("eps",), top=2)


def _quintic_coefficients(l1, l2, l3, l4, l5, verbatim=False):
    """Cubic and quintic coefficients of the Z2 quintic family.

    Works for any ring elements supporting + - * and division by integers
    (ParamPoly or Fraction), so the same table serves symbolic and direct use.
    ``verbatim=True`` returns a05 exactly as printed, without the restoring
    terms.
    """
    a = {
        (3, 0): 1,
        (2, 1): 7 * l1,
        (1, 2): l1 * l3,
        (0, 3): (
            -1029 * l1**3 + 140 * l1**4 + 343 * l1**2 * l2 - 12 * l1**3 * l2
            - 35 * l1 * l2**2 + l2**3 - 28 * l1**2 * l3 + 4 * l1 * l2 * l3
            + 16 * l4 - 56 * l1**2 * l5 - 8 * l1 * l2 * l5
        ) / 8,
        (5, 0): 0,
        (4, 1): l1 * l5,
        (3, 2): l4,
        (2, 3): l1 * (
            -343 * l1**4 + 4 * l1**5 + 70 * l1**3 * l2 - 3 * l1**2 * l2**2
            - 4 * l1**3 * l3 + 28 * l4 - 196 * l1**2 * l5 + 8 * l1**3 * l5
            + 4 * l1 * l3 * l5 - 4 * l1 * l5**2
        ) / 4,
        (1, 4): l1 * (
            -7203 * l1**5 + 84 * l1**6 + 1813 * l1**4 * l2 - 4 * l1**5 * l2
            - 133 * l1**3 * l2**2 + 3 * l1**2 * l2**3 - 84 * l1**4 * l3
            + 4 * l1**3 * l2 * l3 + 8 * l3 * l4 - 1029 * l1**3 * l5
            + 308 * l1**4 * l5 + 343 * l1**2 * l2 * l5 - 20 * l1**3 * l2 * l5
            - 35 * l1 * l2**2 * l5 + l2**3 * l5 - 84 * l1**2 * l3 * l5
            + 4 * l1 * l2 * l3 * l5 + 56 * l1**2 * l5**2 - 8 * l1 * l2 * l5**2
        ) / 8,
        (0, 5): (
            -50421 * l1**7 + 1960 * l1**8 - 16 * l1**9 + 19894 * l1**6 * l2
            - 392 * l1**7 * l2 - 2744 * l1**5 * l2**2 + 16 * l1**6 * l2**2
            + 154 * l1**4 * l2**3
            + 686 * l1**2 * l2 * l4 - 24 * l1**3 * l2 * l4 - 70 * l1 * l2**2 * l4
            + 2 * l2**3 * l4 - 56 * l1**2 * l3 * l4 + 8 * l1 * l2 * l3 * l4
            + 16 * l4**2 + 14406 * l1**5 * l5
            + 1960 * l1**6 * l5 - 64 * l1**7 * l5 - 4802 * l1**4 * l2 * l5
            - 616 * l1**5 * l2 * l5 + 490 * l1**3 * l2**2 * l5
            + 32 * l1**4 * l2**2 * l5 - 14 * l1**2 * l2**3 * l5
            + 392 * l1**4 * l3 * l5 + 64 * l1**5 * l3 * l5
            - 56 * l1**3 * l2 * l3 * l5 - 112 * l1**2 * l4 * l5
            - 16 * l1 * l2 * l4 * l5 - 64 * l1**5 * l5**2
            + 112 * l1**3 * l2 * l5**2
        ) / 16,
    }
    if not verbatim:
        # Terms missing from the printed a05; without them psi(x, y(x)) has a
        # nonzero x^17 coefficient and the multiplicity drops from 25 to 17.
        a[(0, 5)] += l1**3 * (
            32 * l1**4 * l3 - 1960 * l1**3 * l3 + 392 * l1**2 * l2 * l3
            - 16 * l1**2 * l3**2 - 16 * l1 * l2**2 * l3 + 280 * l1 * l4
            - 3 * l2**4 - 2058 * l4
        ) / 16
    b = {
        (3, 0): 0,
        (2, 1): l1,
        (1, 2): -l1 * (7 * l1 - l2),
        (0, 3): l1 * (49 * l1**2 + 4 * l1**3 - 14 * l1 * l2 + l2**2) / 4,
        (5, 0): l1,
        (4, 1): l1 * l2,
        (3, 2): l1 * (
            -147 * l1**2 + 4 * l1**3 + 14 * l1 * l2 + l2**2 + 4 * l1 * l3 - 4 * l1 * l5
        ) / 4,
        (2, 3): l1 * (
            -343 * l1**3 + 196 * l1**4 + 147 * l1**2 * l2 - 12 * l1**3 * l2
            - 21 * l1 * l2**2 + l2**3 - 84 * l1**2 * l3 + 12 * l1 * l2 * l3
            + 8 * l4 + 56 * l1**2 * l5 - 16 * l1 * l2 * l5
        ) / 8,
        (1, 4): -l1 * (
            -7203 * l1**4 + 294 * l1**5 + 8 * l1**6 + 3430 * l1**3 * l2
            - 84 * l1**4 * l2 - 588 * l1**2 * l2**2 + 6 * l1**3 * l2**2
            + 42 * l1 * l2**3 - l2**4 - 294 * l1**3 * l3 - 16 * l1**4 * l3
            + 84 * l1**2 * l2 * l3 - 6 * l1 * l2**2 * l3
            + 56 * l1 * l4 - 8 * l2 * l4
            + 98 * l1**3 * l5 + 24 * l1**4 * l5 - 84 * l1**2 * l2 * l5
            + 10 * l1 * l2**2 * l5
        ) / 8,
        (0, 5): l1 * (
            -50421 * l1**5 - 6860 * l1**6 + 672 * l1**7 + 31213 * l1**4 * l2
            + 2156 * l1**5 * l2 - 64 * l1**6 * l2 - 7546 * l1**3 * l2**2
            - 196 * l1**4 * l2**2 + 882 * l1**2 * l2**3 + 4 * l1**3 * l2**3
            - 49 * l1 * l2**4 + l2**5 - 1372 * l1**4 * l3 - 224 * l1**5 * l3
            + 588 * l1**3 * l2 * l3 + 32 * l1**4 * l2 * l3
            - 84 * l1**2 * l2**2 * l3 + 4 * l1 * l2**3 * l3
            + 392 * l1**2 * l4 + 32 * l1**3 * l4 - 112 * l1 * l2 * l4
            + 8 * l2**2 * l4 + 224 * l1**5 * l5 - 392 * l1**3 * l2 * l5
            - 64 * l1**4 * l2 * l5 + 112 * l1**2 * l2**2 * l5
            - 8 * l1 * l2**3 * l5
        ) / 32,
    }
    return a, b


QUINTIC_PARAMS = ("lambda1", "lambda2", "lambda3", "lambda4", "lambda5")
EPSILON_PARAMS = ("eps1", "eps2", "eps3", "eps4", "eps5")


def quintic_z2(verbatim: bool = False) -> ParametricSystem:
    """Z2-equivariant quintic family in lambda1..lambda5 (multiplicity 25)."""
    ls = [ParamPoly.var(p) for p in QUINTIC_PARAMS]
    a, b = _quintic_coefficients(*ls, verbatim=verbatim)
    phi = {(0, 1): _P(1)}
    phi.update({k: ParamPoly.lift(v) for k, v in a.items()})
    psi = {k: ParamPoly.lift(v) for k, v in b.items()}
    name = "quintic_z2_verbatim" if verbatim else "quintic_z2"
    return ParametricSystem(name, phi, psi, QUINTIC_PARAMS, top=6)


def lambda_from_epsilon(e1, e2, e3, e4, e5):
    """Perturbation point lambda(eps) around the multiplicity-25 node.

    Accepts Fractions (or anything ``as_rational`` takes) or ParamPolys.
    """
    if not any(isinstance(e, ParamPoly) for e in (e1, e2, e3, e4, e5)):
        e1, e2, e3, e4, e5 = (as_rational(e) for e in (e1, e2, e3, e4, e5))
    return (
        -3 - e1,
        -56 + e2,
        (-523 + 4 * e3 + 40 * e5) / 4,
        -9324 - e4 + 651 * e5,
        -93 + 7 * e5,
    )


def quintic_z2_epsilon() -> ParametricSystem:
    """The quintic family re-parametrized by eps1..eps5 through lambda_from_epsilon."""
    eps = [ParamPoly.var(p) for p in EPSILON_PARAMS]
    lam = lambda_from_epsilon(*eps)
    return quintic_z2().substitute(dict(zip(QUINTIC_PARAMS, lam)), EPSILON_PARAMS, "quintic_z2_epsilon")


def alpha25_closed_form(l1, l2, l3, l4, l5) -> Fraction:
    """Leading coefficient of psi on the branch for the quintic family."""
    l1, l2, l3, l5 = (as_rational(v) for v in (l1, l2, l3, l5))
    inner = -343 * l1**2 + 4 * l1**3 + 70 * l1 * l2 - 3 * l2**2 - 4 * l1 * l3 + 8 * l1 * l5
    return -Fraction(1, 16) * l1**10 * inner**2


_LIENARD_RE = re.compile(r"^lienard\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


def builtin_family(name: str) -> ParametricSystem:
    """Look up ``lienard(m,n)``, ``cubic_n3``, ``quintic_z2`` or ``quintic_z2_epsilon``."""
    name = name.strip()
    match = _LIENARD_RE.match(name)
    if match:
        return lienard(int(match.group(1)), int(match.group(2)))
    table = {
        "cubic_n3": cubic_n3,
        "quintic_z2": quintic_z2,
        "quintic_z2_verbatim": lambda: quintic_z2(verbatim=True),
        "quintic_z2_epsilon": quintic_z2_epsilon,
    }
    if name not in table:
        raise UnknownFamily(f"unknown family {name!r}")
    return table[name]()


# -- schedules --------------------------------------------------------------

@dataclass(frozen=True)
class Schedule:
    assignments: tuple[tuple[str, Fraction], ...]
    ratio: Fraction = DEFAULT_RATIO

    @classmethod
    def of(cls, assignments, ratio=DEFAULT_RATIO) -> "Schedule":
        items = assignments.items() if isinstance(assignments, Mapping) else assignments
        return cls(tuple((k, as_rational(v)) for k, v in items), as_rational(ratio))

    @property
    def point(self) -> dict[str, Fraction]:
        return dict(self.assignments)


@dataclass
class PlanReport:
    family: str
    schedule: Schedule
    analysis: NilpotentReport
    prediction: CyclePrediction | None
    verdict: str | None

    @property
    def predicted(self) -> int | None:
        return None if self.prediction is None else self.prediction.count

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "schedule": {k: str(v) for k, v in self.schedule.assignments},
            "ratio": str(self.schedule.ratio),
            "analysis": self.analysis.to_dict(),
            "predicted": self.predicted if self.predicted is not None else "NotApplicable",
            "verdict": self.verdict,
        }
        if self.prediction is not None:
            out["pairs"] = self.prediction.to_dict()["pairs"]
        return out


def check_schedule(family: ParametricSystem, schedule: Schedule, order: int | None = None) -> PlanReport:
    """Evaluate, analyze, and test the stability-reversal schedule on beta_2..beta_2n."""
    sys = evaluate(family, schedule.point)
    report = analyze(sys, order)
    top = family.top if family.top is not None else report.n_star
    verdict = None
    prediction = None
    if report.N % 2 == 0 or report.alpha >= 0:
        verdict = "origin is not a nilpotent node or focus (needs odd N and alpha < 0)"
    elif top is None or top > len(report.betas):
        verdict = "top coefficient beyond truncation order"
    elif report.beta(top) == 0:
        verdict = f"beta{2 * top} vanishes"
    else:
        prediction = predicted_cycles(report.beta_values[:top], schedule.ratio)
        verdict = prediction.violation
    return PlanReport(family.name, schedule, report, prediction, verdict)
