"""Ground states and non-existence thresholds for a gauged quasilinear Schrodinger equation.

Radial profiles live on a :class:`Grid`; the energy, its derivative and the
Nehari/Pohozaev combination ``Gamma`` are assembled from six quadratures.
"""

from .energy import (
    FunctionalBreakdown,
    Params,
    breakdown,
    coupling_from_physical,
    energy,
    energy_gradient,
    gamma,
    gateaux,
)
from .fibration import default_alpha, project_to_M, scale
from .gauge_terms import GaugeFields, compute_gauge
from .nonexistence import (
    ThresholdResult,
    g_pointwise,
    monotonicity_sweep,
    sharp_threshold,
    sufficient_threshold,
)
from .radial_grid import Grid, RadialFunction, distance_X, integrate, make_grid
from .solver import SolveConfig, SolveResult, minimize_on_M, shooting_oracle
from .verify import SampleSpec, check_identities, check_inequality_51, check_inequality_52, check_young_combined

__version__ = "0.1.0"

__all__ = [
    "FunctionalBreakdown",
    "GaugeFields",
    "Grid",
    "Params",
    "RadialFunction",
    "SampleSpec",
    "SolveConfig",
    "SolveResult",
    "ThresholdResult",
    "breakdown",
    "check_identities",
    "check_inequality_51",
    "check_inequality_52",
    "check_young_combined",
    "compute_gauge",
    "coupling_from_physical",
    "default_alpha",
    "distance_X",
    "energy",
    "energy_gradient",
    "g_pointwise",
    "gamma",
    "gateaux",
    "integrate",
    "make_grid",
    "minimize_on_M",
    "monotonicity_sweep",
    "project_to_M",
    "scale",
    "sharp_threshold",
    "shooting_oracle",
    "sufficient_threshold",
]
