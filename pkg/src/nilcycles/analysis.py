"""Multiplicity, quasi-Lyapunov quantities and node/focus classification.

All quantities are read off two exact series built on the branch y(x) of
``phi = 0``: ``psi(x, y(x))`` gives the multiplicity N and its leading
coefficient alpha; the divergence restricted to the branch gives the
coefficients beta_2k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .branch import PlanarSystem, _branch_iterate, solve_branch
from .series import BiPoly, UniSeries, as_rational, substitute_y

__all__ = [
    "Classification",
    "Stability",
    "UndeterminedAtTruncation",
    "InvalidDegree",
    "NilpotentReport",
    "CyclePrediction",
    "DEFAULT_RATIO",
    "default_limit",
    "intersection_multiplicity",
    "multiplicity",
    "trace_series",
    "beta_coefficients",
    "classify",
    "analyze",
    "predicted_cycles",
    "cycle_upper_bound",
]

DEFAULT_RATIO = Fraction(1, 100)


class Classification(str, enum.Enum):
    NODE = "Node"
    FOCUS = "Focus"
    SADDLE_LIKE = "SaddleLike"
    EVEN_MULTIPLICITY = "EvenMultiplicity"
    UNDETERMINED = "UndeterminedAtTruncation"


class Stability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    UNDETERMINED = "Undetermined"


class UndeterminedAtTruncation(ArithmeticError):
    """psi vanishes on the branch through the requested order."""


class InvalidDegree(ValueError):
    pass


def default_limit(sys: PlanarSystem) -> int:
    """Bezout bound for the multiplicity of the origin: (degree + 1)**2."""
    return (max(sys.degree, 1) + 1) ** 2


def intersection_multiplicity(phi: BiPoly, psi: BiPoly, limit: int) -> tuple[int, Fraction]:
    """Intersection number of ``phi = 0`` and ``psi = 0`` at the origin.

    Valid when ``phi = 0`` is a smooth graph y(x) through the origin with
    d(phi)/dy = 1 there.  Returns ``(N, A)`` with ``psi(x, y(x)) = A x^N + ...``.
    """
    if phi.coeff(0, 0) or psi.coeff(0, 0):
        raise ValueError("the origin is not a common zero")
    if phi.coeff(0, 1) != 1:
        raise ValueError("d(phi)/dy at the origin must be 1")
    y = _branch_iterate(phi, limit)
    return _leading(substitute_y(psi, y), limit)


def _leading(s: UniSeries, limit: int) -> tuple[int, Fraction]:
    N = s.valuation()
    if N is None:
        raise UndeterminedAtTruncation(f"psi(x, y(x)) vanishes through x^{limit}")
    return N, s[N]


def multiplicity(sys: PlanarSystem, limit: int | None = None) -> tuple[int, Fraction]:
    """(N, alpha) where psi(x, y(x)) = alpha x^N + o(x^N)."""
    if limit is None:
        limit = default_limit(sys)
    y = solve_branch(sys, limit)
    return _leading(substitute_y(sys.psi, y), limit)


def trace_series(sys: PlanarSystem, K: int) -> UniSeries:
    """Divergence d(phi)/dx + d(psi)/dy restricted to the branch, through x^K."""
    y = solve_branch(sys, K)
    return substitute_y(sys.divergence, y)


def beta_coefficients(trace: UniSeries) -> tuple[list[tuple[int, Fraction]], list[tuple[int, Fraction]]]:
    """Split a trace series into ``[(k, beta_2k)]`` for 2k >= 2 and odd diagnostics."""
    betas = [(k, trace[2 * k]) for k in range(1, trace.order // 2 + 1)]
    odd = [(d, trace[d]) for d in range(1, trace.order + 1, 2)]
    return betas, odd


@dataclass
class NilpotentReport:
    N: int
    alpha: Fraction
    m: int | None
    betas: list[tuple[int, Fraction]]
    n_star: int | None
    trace_odd: list[tuple[int, Fraction]]
    delta: Fraction | None
    classification: Classification
    stability: Stability
    order: int
    condition: str | None = None
    branch: UniSeries | None = field(default=None, repr=False)

    def beta(self, k: int) -> Fraction:
        """beta_2k."""
        for kk, b in self.betas:
            if kk == k:
                return b
        raise KeyError(f"beta_{2 * k} not computed at order {self.order}")

    @property
    def beta_values(self) -> list[Fraction]:
        return [b for _, b in self.betas]

    @property
    def lyapunov_constant(self) -> Fraction | None:
        """The first nonzero beta, which decides stability."""
        return None if self.n_star is None else self.beta(self.n_star)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": str(self.alpha),
            "m": self.m,
            "order": self.order,
            "betas": {f"beta{2 * k}": str(b) for k, b in self.betas},
            "n_star": self.n_star,
            "trace_odd": {f"x{d}": str(c) for d, c in self.trace_odd if c},
            "delta": None if self.delta is None else str(self.delta),
            "classification": self.classification.value,
            "condition": self.condition,
            "stability": self.stability.value,
        }


def classify(
    N: int, alpha: Fraction, betas: Sequence[tuple[int, Fraction]], order: int,
    trace_odd: Sequence[tuple[int, Fraction]] = (),
) -> NilpotentReport:
    """Node/focus decision from N, alpha and the betas.

    With N = 2m+1 and alpha < 0 the origin is a node iff 2n* < m, or
    2n* = m and beta_2n*^2 + 4(m+1) alpha >= 0; otherwise a focus.
    """
    n_star = next((k for k, b in betas if b), None)
    m = (N - 1) // 2 if N % 2 else None
    delta = None
    condition = None
    if n_star is not None and m is not None:
        delta = betas[n_star - 1][1] ** 2 + 4 * (m + 1) * alpha

    if N % 2 == 0:
        cls = Classification.EVEN_MULTIPLICITY
    elif alpha > 0:
        cls = Classification.SADDLE_LIKE
    elif n_star is None:
        cls = Classification.UNDETERMINED
    elif 2 * n_star < m:
        cls, condition = Classification.NODE, "C1"
    elif 2 * n_star == m and delta >= 0:
        cls, condition = Classification.NODE, "C2"
    else:
        cls = Classification.FOCUS

    stability = Stability.UNDETERMINED
    if cls in (Classification.NODE, Classification.FOCUS):
        lead = betas[n_star - 1][1]
        stability = Stability.STABLE if lead < 0 else Stability.UNSTABLE
    return NilpotentReport(
        N=N, alpha=alpha, m=m, betas=list(betas), n_star=n_star,
        trace_odd=list(trace_odd), delta=delta, classification=cls,
        stability=stability, order=order, condition=condition,
    )


def analyze(sys: PlanarSystem, order: int | None = None) -> NilpotentReport:
    """Full pipeline: branch, multiplicity, trace, betas, classification.

    ``order`` is the truncation order of the branch; it bounds both the
    multiplicity search and the highest beta reported.  The default is the
    Bezout bound plus two.
    """
    K = default_limit(sys) + 2 if order is None else order
    y = solve_branch(sys, K)
    N, alpha = _leading(substitute_y(sys.psi, y), K)
    trace = substitute_y(sys.divergence, y)
    betas, odd = beta_coefficients(trace)
    report = classify(N, alpha, betas, K, odd)
    report.branch = y
    return report


@dataclass
class CyclePrediction:
    """Outcome of the sign-alternation / scale-separation check on beta_2..beta_2n."""

    count: int | None
    ratio: Fraction
    signs_alternate: list[bool]
    separated: list[bool]
    violation: str | None = None

    @property
    def applicable(self) -> bool:
        return self.count is not None

    def to_dict(self) -> dict:
        return {
            "predicted": self.count if self.count is not None else "NotApplicable",
            "ratio": str(self.ratio),
            "pairs": [
                {"k": k + 1, "sign_alternates": s, "separated": r}
                for k, (s, r) in enumerate(zip(self.signs_alternate, self.separated))
            ],
            "violation": self.violation,
        }


def predicted_cycles(betas: Sequence, ratio=DEFAULT_RATIO) -> CyclePrediction:
    """n - 1 small cycles when 0 < |b2| << |b4| << ... << |b2n| with alternating signs.

    ``betas`` lists beta_2, ..., beta_2n (the last must be nonzero).  "<<"
    means ``|beta_2k| <= ratio * |beta_2k+2|``.
    """
    betas = [as_rational(b) for b in betas]
    ratio = as_rational(ratio)
    if not betas or not betas[-1]:
        raise ValueError("the top coefficient beta_2n must be nonzero")
    signs = [betas[k] * betas[k + 1] < 0 for k in range(len(betas) - 1)]
    sep = [abs(betas[k]) <= ratio * abs(betas[k + 1]) for k in range(len(betas) - 1)]
    violation = None
    for k, b in enumerate(betas):
        if not b:
            violation = f"beta{2 * (k + 1)} is zero"
            break
    if violation is None:
        for k, (s, r) in enumerate(zip(signs, sep)):
            if not s:
                violation = f"beta{2 * (k + 1)} and beta{2 * (k + 2)} have the same sign"
                break
            if not r:
                violation = f"|beta{2 * (k + 1)}| > {ratio} |beta{2 * (k + 2)}|"
                break
    count = None if violation else len(betas) - 1
    return CyclePrediction(count, ratio, signs, sep, violation)


def cycle_upper_bound(degree: int) -> int:
    """Upper bound n^2 + n - 1 on cycles from a degree 2n+1 nilpotent node."""
    if isinstance(degree, bool) or not isinstance(degree, int) or degree < 3 or degree % 2 == 0:
        raise InvalidDegree(f"degree must be odd and >= 3, got {degree!r}")
    n = (degree - 1) // 2
    return n * n + n - 1
