"""Exact analysis of nilpotent critical points and small limit cycles.

The symbolic side works over Q: branch series, multiplicity, quasi-Lyapunov
quantities, node/focus classification and schedule checks.  The numerical
side counts limit cycles from the first-return map.
"""

from .analysis import (
    Classification,
    NilpotentReport,
    Stability,
    analyze,
    beta_coefficients,
    classify,
    cycle_upper_bound,
    multiplicity,
    predicted_cycles,
    trace_series,
)
from .branch import MalformedSystem, PlanarSystem, branch_residual, solve_branch
from .cycles import count_cycles, lyapunov_decay_check
from .families import (
    ParametricSystem,
    Schedule,
    builtin_family,
    check_schedule,
    evaluate,
    lambda_from_epsilon,
)
from .flow import BACKEND, FlowConfig, first_return, integrate
from .series import BiPoly, UniSeries, substitute_y

__version__ = "0.1.0"
