"""Degenerate diffusions on the closed unit ball.

Simulation with exact state-space preservation, synchronous-coupling
experiments around the pathwise-uniqueness threshold, boundary classification
of the radial part, a boundary coordinate system, a general-domain
generalization, and the inequality toolkit backing the contraction
estimates.
"""

from .ball import (
    SchemeSpec,
    Trajectory,
    generator_value,
    occupation_near_boundary,
    occupation_profile,
    sample_terminal_states,
    simulate,
)
from .coeffs import BallModel, CoeffFn, epsilon_for_p, optimal_exponent, required_ratio
from .coupling import (
    RATIO_THRESHOLD,
    coupling_constants,
    critical_drift_level,
    run_coupled,
    run_coupled_batch,
    threshold_sweep,
)
from .domains import (
    DomainModel,
    DomainSpec,
    alpha_ratio,
    decompose_drift,
    is_function_of_h,
    simulate_domain,
    validate_domain,
)
from .errors import BallSdeError, ConfigError, HypothesisViolation, InfeasibleError
from .radial import (
    BoundaryClassification,
    RadialModel,
    classify_boundary,
    sample_terminal,
    scale_prime,
    simulate_radial,
)
from .transform import (
    A_matrix,
    A_sqrt,
    forward_map,
    inverse_map,
    sample_transformed_terminal,
    simulate_transformed,
)

__all__ = [
    "BallModel",
    "CoeffFn",
    "epsilon_for_p",
    "optimal_exponent",
    "required_ratio",
    "BallSdeError",
    "ConfigError",
    "HypothesisViolation",
    "InfeasibleError",
    "SchemeSpec",
    "Trajectory",
    "simulate",
    "sample_terminal_states",
    "occupation_near_boundary",
    "occupation_profile",
    "generator_value",
    "RadialModel",
    "BoundaryClassification",
    "classify_boundary",
    "scale_prime",
    "simulate_radial",
    "sample_terminal",
    "RATIO_THRESHOLD",
    "critical_drift_level",
    "coupling_constants",
    "run_coupled",
    "run_coupled_batch",
    "threshold_sweep",
    "forward_map",
    "inverse_map",
    "A_matrix",
    "A_sqrt",
    "simulate_transformed",
    "sample_transformed_terminal",
    "DomainSpec",
    "DomainModel",
    "decompose_drift",
    "alpha_ratio",
    "is_function_of_h",
    "validate_domain",
    "simulate_domain",
]

__version__ = "0.1.0"
