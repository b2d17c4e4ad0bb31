"""Counting small-amplitude limit cycles from the displacement map.

``d(r) = P(r) - r`` where ``P`` is the first-return map on the positive
x-axis.  Isolated zeros of ``d`` are limit cycles; they are bracketed on a
log-spaced radius grid and refined by bisection.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import analyze
from .branch import PlanarSystem
from .flow import BACKEND, DisplacementSample, FlowConfig, ReturnStatus, Trajectory, first_return
from .series import BiPoly

__all__ = [
    "InsufficientReturns",
    "NotLienardForm",
    "CycleReport",
    "LyapunovVerdict",
    "displacement_scan",
    "count_cycles",
    "lyapunov_decay_check",
    "write_scan_csv",
    "write_trajectory_csv",
]


class InsufficientReturns(RuntimeError):
    def __init__(self, message: str, samples: list[DisplacementSample]):
        super().__init__(message)
        self.samples = samples


class NotLienardForm(ValueError):
    pass


@dataclass
class CycleReport:
    annulus: tuple[float, float]
    samples: list[DisplacementSample]
    brackets: list[tuple[float, float]]
    refined_radii: list[float]
    monotone_regions: list[tuple[float, float, int]] = field(default_factory=list)
    config: FlowConfig | None = None

    @property
    def count(self) -> int:
        return len(self.brackets)

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "annulus": list(self.annulus),
            "samples": len(self.samples),
            "returned": sum(s.status is ReturnStatus.RETURNED for s in self.samples),
            "count": self.count,
            "brackets": [list(b) for b in self.brackets],
            "refined_radii": self.refined_radii,
            "monotone_regions": [
                {"r_lo": a, "r_hi": b, "sign": s} for a, b, s in self.monotone_regions
            ],
            "config": None if cfg is None else {
                "rel_tol": cfg.rel_tol,
                "abs_tol": cfg.abs_tol,
                "max_time": cfg.max_time,
                "inner_cutoff": cfg.inner_cutoff,
                "radius_tol": cfg.radius_tol,
                "backend": cfg.backend or BACKEND,
            },
        }


def displacement_scan(sys: PlanarSystem, radii, cfg: FlowConfig = FlowConfig()) -> list[DisplacementSample]:
    radii = [float(r) for r in radii]
    if cfg.workers > 1:
        # the compiled kernel releases the GIL, so threads run in parallel
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda r: first_return(sys, r, cfg), radii))
    return [first_return(sys, r, cfg) for r in radii]


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def _bisect(sys: PlanarSystem, lo: float, hi: float, d_lo: float, cfg: FlowConfig) -> float:
    s_lo = _sign(d_lo)
    while hi - lo > cfg.radius_tol * hi:
        mid = 0.5 * (lo + hi)
        sample = first_return(sys, mid, cfg)
        if sample.status is not ReturnStatus.RETURNED:
            break
        s = _sign(sample.d)
        if s == 0:
            return mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def count_cycles(
    sys: PlanarSystem,
    annulus: tuple[float, float],
    samples: int = 64,
    cfg: FlowConfig = FlowConfig(),
) -> CycleReport:
    """Scan d(r) on ``samples`` log-spaced radii in ``annulus`` and bracket sign changes."""
    r_min, r_max = (float(a) for a in annulus)
    if not 0 < r_min < r_max:
        raise ValueError("annulus must satisfy 0 < r_min < r_max")
    if samples < 8:
        raise ValueError("at least 8 samples are required")
    radii = np.geomspace(r_min, r_max, samples)
    scan = displacement_scan(sys, radii, cfg)
    returned = [s for s in scan if s.status is ReturnStatus.RETURNED]
    if 2 * len(returned) < len(scan):
        raise InsufficientReturns(
            f"only {len(returned)} of {len(scan)} orbits returned to the section", scan
        )

    brackets: list[tuple[float, float]] = []
    refined: list[float] = []
    regions: list[tuple[float, float, int]] = []
    start = returned[0]
    for a, b in zip(returned, returned[1:]):
        sa, sb = _sign(a.d), _sign(b.d)
        if sa == 0:
            continue
        if sb == 0 or sa != sb:
            brackets.append((a.r, b.r))
            refined.append(b.r if sb == 0 else _bisect(sys, a.r, b.r, a.d, cfg))
            regions.append((start.r, a.r, sa))
            start = b
    if _sign(returned[-1].d) != 0:
        regions.append((start.r, returned[-1].r, _sign(returned[-1].d)))
    return CycleReport((r_min, r_max), scan, brackets, refined, regions, cfg)


@dataclass
class LyapunovVerdict:
    V_start: float
    V_end: float
    delta_V: float
    expected_sign: int
    monotone: bool
    consistent: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _lienard_parts(sys: PlanarSystem) -> tuple[int, Fraction]:
    # returns (m, alpha) for psi = alpha x^(2m+1) + y g(x)
    if sys.phi != BiPoly.y():
        raise NotLienardForm("dx/dt must be exactly y")
    pure = {i: c for (i, j), c in sys.psi.items() if j == 0}
    if any(j > 1 for (_, j) in sys.psi.terms):
        raise NotLienardForm("dy/dt must be linear in y")
    if len(pure) != 1:
        raise NotLienardForm("dy/dt must have a single pure x^(2m+1) term")
    (deg, alpha), = pure.items()
    if deg % 2 == 0 or deg < 3:
        raise NotLienardForm("pure x term must have odd degree >= 3")
    return (deg - 1) // 2, alpha


def lyapunov_decay_check(sys: PlanarSystem, trajectory: Trajectory, rel_tol: float = 1e-11) -> LyapunovVerdict:
    """Compare the change of V = y^2 - alpha x^(2m+2)/(m+1) with the sign of the first nonzero beta.

    Along dx/dt = y, dy/dt = alpha x^(2m+1) + y g(x) one has dV/dt = 2 y^2 g(x),
    so near the origin V decreases when the leading beta is negative.
    """
    m, alpha = _lienard_parts(sys)
    a = float(alpha)
    V = trajectory.y**2 - a * trajectory.x ** (2 * m + 2) / (m + 1)
    lead = analyze(sys, order=2 * sys.degree + 2 * m + 4).lyapunov_constant
    expected = 0 if lead is None else _sign(float(lead))
    dV = float(V[-1] - V[0])
    steps = np.diff(V)
    slack = 10 * rel_tol * float(np.max(np.abs(V)))
    if expected == 0:
        monotone = bool(np.all(np.abs(V - V[0]) <= slack))
        consistent = abs(dV) <= 10 * rel_tol * float(V[0])
    else:
        monotone = bool(np.all(expected * steps >= -slack))
        consistent = _sign(dV) == expected
    return LyapunovVerdict(float(V[0]), float(V[-1]), dV, expected, monotone, consistent)


def write_scan_csv(path: str | Path, samples: list[DisplacementSample]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "r_return", "d", "status"])
        for s in samples:
            w.writerow([
                repr(s.r),
                "" if s.r_return is None else repr(s.r_return),
                "" if s.d is None else repr(s.d),
                s.status.value,
            ])


def write_trajectory_csv(path: str | Path, trajectory: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for row in trajectory.rows():
            w.writerow([repr(v) for v in row])
