"""Lion-Man pursuit toolkit.

Geodesic spaces and domains, convexity moduli and their conversions, the
explicit capture-time bound, a discrete game engine and sampling checks for
the underlying convexity notions.
"""

from .bound import RateParams, RateResult, choose_eps, choose_N, compute_omega, psi_iterate
from .errors import (
    DegenerateGeodesicError,
    DomainTooLargeError,
    HypothesisViolationError,
    InsufficientDataError,
    InvalidInputError,
    InvalidStateError,
    LionManError,
    NumericFailureError,
    SamplerStarvationWarning,
    StrategyExhaustedError,
)
from .game import (
    GameConfig,
    GameTrace,
    StepRecord,
    capture_time,
    lion_step,
    make_strategy,
    man_step,
    run_game,
)
from .logreal import LogReal
from .moduli import (
    ConvexityModulus,
    ModuliBundle,
    cat_kappa_parameter,
    delta_fn,
    eta_from_phi_normed,
    eta_lp,
    eta_p_uniform,
    lp_phi_closed_form,
    normalize_phi_normed,
    phi_from_eta,
    psi_fn,
    theta_from_phi,
)
from .spaces import (
    Ball,
    Box,
    Euclidean,
    Lp,
    Octant,
    Sphere2,
    SphericalCap,
    clamp_move,
    dist_to_segment,
    distance,
    domain_contains,
    interpolate,
    parse_domain,
    parse_space,
    sample_point,
)

__version__ = "0.1.0"
