"""Numerics for spectrally negative Levy surplus processes.

Scale functions of Cramer-Lundberg models with hyperexponential claims
(and Brownian perturbation) in exact exponential-mixture form, the
first-passage, dividend and bailout laws built from them under classical
and Poisson-observed (Parisian) reflection, barrier optimization with an
efficiency index, and an exact event-driven Monte-Carlo oracle.
"""

from .errors import (
    ConvergenceFailure,
    DegenerateRoots,
    DomainError,
    HorizonRequired,
    ModelError,
    NoSolution,
    NonpositiveDrift,
    NotCheap,
    ParisianScaleError,
    PoleAtTheta,
    QZero,
    RetentionOutOfRange,
    SigmaUnsupported,
    ThresholdSingular,
    UnsupportedPenalty,
)
from .model import LevyModel, laplace_exponent, laplace_exponent_deriv, phi, root_set
from .scale import (
    INF,
    Constant,
    Exponential,
    GerberShiu,
    Linear,
    ParisianContext,
    ScaleContext,
    build_gerber_shiu,
    build_parisian,
    build_scale,
    eval_parisian_Z,
    eval_scriptS,
    eval_W,
    eval_Wbar,
    eval_Z,
    eval_Z0_family,
)
from .laws import (
    bailouts_to_level,
    dividends_penalty_classic,
    gs_exit,
    omega,
    parisian_dividends_penalty,
    parisian_resolvent,
    parisian_resolvent_integral,
    parisian_severity,
    parisian_up_exit,
    severity_absorbed,
    severity_infinite,
    severity_reflected,
    time_in_red,
    two_sided_exit,
)
from .control import (
    BarrierSolution,
    NetworkSpec,
    Subsidiary,
    barrier_function,
    efficiency_index,
    is_efficient,
    network_check,
    network_claims_line,
    network_value_mc,
    optimize_barrier,
    slg_parisian_value,
    solve_patience,
    value_definetti,
    value_parisian,
    value_slg_classic,
    vf_dividends_classic,
)
from .mc import Functional, MCEstimate, PathConfig, estimate, simulate_path

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
