"""Nonlinear OMIT response of active optomechanical cavities.

Closed-form first- and second-order sideband amplitudes for a single
(gain or loss) optomechanical cavity and for an active-passive coupled
pair, plus sweeps, group delays and a time-domain cross-check.
"""

from omitlab.errors import (
    BalancePole,
    DegenerateDenominator,
    Diverged,
    NoRealRoot,
    OmitError,
    SingularPoint,
    WindowTooShort,
)
from omitlab.params import (
    DriveFields,
    SystemParams,
    Topology,
    drive_amplitudes,
    paper_defaults,
    validate,
)
from omitlab.steady_state import SteadyState, solve, solve_double, solve_single
from omitlab.response import SidebandResponse, evaluate

__version__ = "0.1.0"

__all__ = [
    "BalancePole",
    "DegenerateDenominator",
    "Diverged",
    "DriveFields",
    "NoRealRoot",
    "OmitError",
    "SidebandResponse",
    "SingularPoint",
    "SteadyState",
    "SystemParams",
    "Topology",
    "WindowTooShort",
    "drive_amplitudes",
    "evaluate",
    "paper_defaults",
    "solve",
    "solve_double",
    "solve_single",
    "validate",
    "__version__",
]
