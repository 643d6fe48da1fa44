"""Two-species competition with mixed dispersal and coupled free boundaries.

Simulator, principal-eigenvalue thresholds, spreading-vanishing
classification, and an executable verification harness, all in a
time-periodic environment.
"""

from .coefficients import CoefficientSet, PeriodicCoefficient, constant, sinusoidal, table
from .kernels import (
    Kernel,
    PlateauKernel,
    TableKernel,
    TentKernel,
    TruncatedGaussianKernel,
)
from .solver import (
    FrontState,
    InitialProfile,
    LotkaVolterraGrowth,
    CustomGrowth,
    ProblemSpec,
    Trajectory,
    compute_bounds,
    front_speeds,
    initial_state,
    run,
    run_fixed_domain_single,
    step,
)
from .eigen import (
    EigenReport,
    Thresholds,
    compute_thresholds,
    critical_length_mixed,
    critical_length_nonlocal,
    lambda1_mixed,
    lambda1_nonlocal,
    rayleigh_quotient,
)
from .dichotomy import Outcome, classify, predict, sweep_response
from .harness import (
    Supersolution,
    build_supersolution,
    check_domination,
    check_ordering,
    verify_suite,
)
from .config import RunConfig

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
