"""Simulation and verification toolkit for spectrally one-sided stable
processes conditioned to avoid the interval [-1, 1]."""

from .conditioned import (
    EventSpec,
    KernelEstimate,
    chapman_kolmogorov_check,
    exp_conditioning_estimate,
    sample_conditioned_path,
    time_conditioning_estimate,
    transition_kernel_estimate,
    weighted_expectation,
)
from .asymptotics import (
    FitResult,
    cancellation_rate,
    eq_survival,
    profile_ratio_check,
    survival_tail_exponent,
    upper_bound_check,
)
from .core import (
    Regime,
    StableParams,
    levy_density,
    levy_tail,
    make_params,
    sample_increment,
    sample_increments,
    small_jump_mean,
)
from .errors import (
    DegenerateConditioningError,
    DomainError,
    PoolExhaustedError,
    ResourceLimitError,
    ToleranceError,
)
from .mc import MCEstimate
from .paths import (
    Barrier,
    HittingOutcome,
    PathConfig,
    PathSample,
    first_passage_subordinator,
    hitting_time_interval,
    simulate_skeleton,
    survival_probability,
)
from .rng import RngStream
from .specfun import (
    QuadratureConfig,
    beta_tail_integral,
    h_subordinator,
    h_updown,
    killed_potential_density,
    ladder_potentials,
    laplace_exponents,
    overshoot_tail,
)

__all__ = [
    "Barrier",
    "DegenerateConditioningError",
    "DomainError",
    "EventSpec",
    "FitResult",
    "HittingOutcome",
    "KernelEstimate",
    "MCEstimate",
    "PathConfig",
    "PathSample",
    "PoolExhaustedError",
    "QuadratureConfig",
    "Regime",
    "ResourceLimitError",
    "RngStream",
    "StableParams",
    "ToleranceError",
    "beta_tail_integral",
    "cancellation_rate",
    "chapman_kolmogorov_check",
    "eq_survival",
    "exp_conditioning_estimate",
    "first_passage_subordinator",
    "h_subordinator",
    "h_updown",
    "hitting_time_interval",
    "killed_potential_density",
    "ladder_potentials",
    "laplace_exponents",
    "levy_density",
    "levy_tail",
    "make_params",
    "overshoot_tail",
    "profile_ratio_check",
    "sample_conditioned_path",
    "sample_increment",
    "sample_increments",
    "simulate_skeleton",
    "small_jump_mean",
    "survival_probability",
    "survival_tail_exponent",
    "time_conditioning_estimate",
    "transition_kernel_estimate",
    "weighted_expectation",
]

__version__ = "0.1.0"
