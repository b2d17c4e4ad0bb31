"""Floating-point flow of a planar polynomial system and its first-return map.

The integration kernel is compiled (``_flow_ext``) when the extension was
built and pure Python (``_flow_py``) otherwise.  Both implement the same
Dormand-Prince 5(4) scheme and return identical numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _flow_py
from .branch import PlanarSystem

try:
    from . import _flow_ext
except ImportError:  # extension not built
    _flow_ext = None

__all__ = [
    "BACKEND",
    "available_backends",
    "get_kernel",
    "FlowConfig",
    "ReturnStatus",
    "DisplacementSample",
    "Trajectory",
    "StepUnderflow",
    "integrate",
    "first_return",
]

BACKEND = "compiled" if _flow_ext is not None else "python"


def available_backends() -> list[str]:
    return ["compiled", "python"] if _flow_ext is not None else ["python"]


def get_kernel(backend: str | None = None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _flow_ext is None:
            raise RuntimeError("compiled kernel not available; reinstall with a C compiler")
        return _flow_ext.first_return
    if backend == "python":
        return _flow_py.first_return
    raise ValueError(f"unknown backend {backend!r}")


class StepUnderflow(RuntimeError):
    """The adaptive step collapsed below round-off."""


class ReturnStatus(str, enum.Enum):
    RETURNED = "Returned"
    ESCAPED = "Escaped"
    TIMED_OUT = "TimedOut"
    STEP_UNDERFLOW = "StepUnderflow"
    CAPTURED = "Captured"


_STATUS = {
    _flow_py.RETURNED: ReturnStatus.RETURNED,
    _flow_py.ESCAPED: ReturnStatus.ESCAPED,
    _flow_py.TIMED_OUT: ReturnStatus.TIMED_OUT,
    _flow_py.STEP_UNDERFLOW: ReturnStatus.STEP_UNDERFLOW,
    _flow_py.CAPTURED: ReturnStatus.CAPTURED,
}


@dataclass(frozen=True)
class FlowConfig:
    """Integration settings for the verifier.

    The section is always the half-line y = 0, x > 0.  ``inner_cutoff``
    stops orbits that fall within that Euclidean distance of the origin
    (0 disables it); ``radius_tol`` is the relative width at which cycle
    brackets stop being bisected.
    """

    rel_tol: float = 1e-11
    abs_tol: float = 1e-18
    max_step: float = math.inf
    max_time: float = 1e6
    max_steps: int = 5_000_000
    box: float = 1e3
    inner_cutoff: float = 0.0
    radius_tol: float = 1e-7
    workers: int = 1
    backend: str | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not math.isfinite(self.max_time) or self.max_time <= 0:
            raise ValueError("max_time must be finite and positive")
        if self.radius_tol <= 0:
            raise ValueError("radius_tol must be positive")

    def with_(self, **changes) -> "FlowConfig":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class DisplacementSample:
    r: float
    r_return: float | None
    d: float | None
    status: ReturnStatus
    t_return: float | None = None
    steps: int = 0


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    status: ReturnStatus

    def rows(self):
        return zip(self.t.tolist(), self.x.tolist(), self.y.tolist())


def _terms(sys: PlanarSystem):
    return sys.float_terms()


def _trajectory(flat, status) -> Trajectory:
    arr = np.asarray(flat, dtype=float).reshape(-1, 3)
    return Trajectory(arr[:, 0], arr[:, 1], arr[:, 2], status)


def integrate(
    sys: PlanarSystem, p0: tuple[float, float], t_end: float,
    cfg: FlowConfig = FlowConfig(), backward: bool = False,
) -> Trajectory:
    """Adaptive trajectory from ``p0`` over ``[0, t_end]``, or ``[-t_end, 0]`` when ``backward``."""
    if p0[0] == 0 and p0[1] == 0:
        raise ValueError("the origin is an equilibrium")
    phi, psi = _terms(sys)
    if backward:
        phi = [(i, j, -c) for i, j, c in phi]
        psi = [(i, j, -c) for i, j, c in psi]
    kernel = get_kernel(cfg.backend)
    status, _, _, _, flat = kernel(
        phi, psi, float(p0[0]), float(p0[1]), cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        float(t_end), cfg.max_steps, cfg.box, cfg.inner_cutoff, False, True,
    )
    status = _STATUS[status]
    if status is ReturnStatus.STEP_UNDERFLOW:
        raise StepUnderflow(f"step size underflow integrating from {p0}")
    traj = _trajectory(flat, status)
    if backward:
        traj.t = -traj.t
    return traj


def first_return(sys: PlanarSystem, r: float, cfg: FlowConfig = FlowConfig(), record: bool = False):
    """First return of (r, 0) to the positive x-axis in the same direction.

    Returns a :class:`DisplacementSample`, or ``(sample, trajectory)`` when
    ``record`` is set.
    """
    if r <= 0:
        raise ValueError("section coordinate must be positive")
    phi, psi = _terms(sys)
    kernel = get_kernel(cfg.backend)
    code, xr, tr, n, flat = kernel(
        phi, psi, float(r), 0.0, cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.max_time,
        cfg.max_steps, cfg.box, cfg.inner_cutoff, True, record,
    )
    status = _STATUS[code]
    if status is ReturnStatus.RETURNED:
        sample = DisplacementSample(float(r), xr, xr - float(r), status, tr, n)
    else:
        sample = DisplacementSample(float(r), None, None, status, None, n)
    if record:
        return sample, _trajectory(flat, status)
    return sample
