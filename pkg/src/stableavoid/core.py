"""Parametrization and exact increment sampling of one-sided stable laws.

The jump measure is the single source of truth for normalization:

    Pi(dx) = scale * Gamma(alpha+1)/pi * sin(pi*alpha*rho) * x^(-alpha-1) dx,  x > 0,

with no mass on x < 0 in either regime handled here.  With scale = 1 this
pins the marginal law exactly: the subordinator (alpha < 1) satisfies
E[exp(-lam*X_t)] = exp(-t*lam^alpha) and the spectrally positive process
(alpha > 1, centered) satisfies E[exp(-lam*X_t)] = exp(+t*lam^alpha).
Increments are sampled exactly by the one-sided Chambers-Mallows-Stuck
transform of a uniform and an exponential draw; no series truncation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import RngStream


class Regime(enum.Enum):
    SUBORDINATOR = "subordinator"
    SPECTRALLY_POSITIVE = "spectrally_positive"


@dataclass(frozen=True)
class StableParams:
    """Index, regime, positivity parameter and jump-measure scale."""

    alpha: float
    regime: Regime
    rho: float
    scale: float = 1.0

    def __post_init__(self):
        a = self.alpha
        if not (0.0 < a < 1.0 or 1.0 < a < 2.0):
            raise DomainError(
                f"alpha={a} not supported: alpha=1 (Cauchy) and alpha>=2 "
                "(Brownian) are excluded; need alpha in (0,1) or (1,2)"
            )
        if a < 1.0 and (self.regime is not Regime.SUBORDINATOR or self.rho != 1.0):
            raise DomainError("alpha<1 forces the subordinator regime with rho=1")
        if a > 1.0 and (
            self.regime is not Regime.SPECTRALLY_POSITIVE
            or abs(self.rho - (1.0 - 1.0 / a)) > 1e-12
        ):
            raise DomainError("alpha>1 forces the spectrally positive regime "
                              "with rho=1-1/alpha")
        if self.scale <= 0.0:
            raise DomainError("scale must be positive")


def make_params(alpha: float) -> StableParams:
    """Build StableParams for a one-sided stable law of index ``alpha``."""
    if not (0.0 < alpha < 1.0 or 1.0 < alpha < 2.0):
        raise DomainError(
            f"alpha={alpha} is outside (0,1) u (1,2); alpha=1 (symmetric "
            "Cauchy) and alpha=2 (Brownian motion) are excluded"
        )
    if alpha < 1.0:
        return StableParams(alpha=alpha, regime=Regime.SUBORDINATOR, rho=1.0)
    return StableParams(
        alpha=alpha,
        regime=Regime.SPECTRALLY_POSITIVE,
        rho=1.0 - 1.0 / alpha,
    )


def levy_coefficient(params: StableParams) -> float:
    """Coefficient of x^(-alpha-1) in the positive jump density."""
    a, r = params.alpha, params.rho
    return params.scale * math.gamma(a + 1.0) * math.sin(math.pi * a * r) / math.pi


def levy_density(params: StableParams, x: float) -> float:
    """Jump density at x; identically zero on x < 0 for these regimes."""
    if x == 0.0:
        raise DomainError("the jump measure has no atom at 0")
    if x < 0.0:
        # sin(pi*alpha*rho_hat) vanishes for rho_hat in {0, 1/alpha}
        return 0.0
    return levy_coefficient(params) * x ** (-params.alpha - 1.0)


def levy_tail(params: StableParams, eps: float) -> float:
    """Mass of jumps larger than eps: integral of the density over (eps, inf)."""
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    a = params.alpha
    return levy_coefficient(params) * eps ** (-a) / a


def small_jump_mean(params: StableParams, eps: float) -> float:
    """Mean drift of jumps below eps: integral of x * density over (0, eps).

    Finite only in the subordinator regime (alpha < 1).
    """
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    if params.regime is not Regime.SUBORDINATOR:
        raise DomainError("small-jump mean diverges for alpha > 1")
    a = params.alpha
    return levy_coefficient(params) * eps ** (1.0 - a) / (1.0 - a)


def standard_increments(alpha: float, n: int, gen: np.random.Generator) -> np.ndarray:
    """n draws of X_1 under the unit normalization above.

    One-sided Chambers-Mallows-Stuck: with V uniform on (-pi/2, pi/2),
    W exponential and b = atan(tan(pi*alpha/2))/alpha,

        X = sin(alpha(V+b)) / cos(V)^(1/alpha)
            * (cos(V - alpha(V+b)) / W)^((1-alpha)/alpha).

    For alpha < 1 this is Kanter's positive-stable sampler; for alpha > 1 it
    gives the centered spectrally positive law.
    """
    v = (gen.random(n) - 0.5) * math.pi
    w = gen.standard_exponential(n)
    b = math.atan(math.tan(math.pi * alpha / 2.0)) / alpha
    avb = alpha * (v + b)
    return (
        np.sin(avb)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - avb) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_increments(
    params: StableParams,
    dt: float | np.ndarray,
    n: int,
    rng: RngStream,
) -> np.ndarray:
    """n exact increments of the process over time step(s) dt.

    dt may be a scalar or an array of per-draw step sizes; the increment over
    dt equals dt^(1/alpha) times a unit draw by self-similarity.
    """
    dt = np.asarray(dt, dtype=float)
    if np.any(dt <= 0.0):
        raise DomainError("dt must be positive")
    a = params.alpha
    z = standard_increments(a, n, rng.generator)
    return params.scale ** (1.0 / a) * dt ** (1.0 / a) * z


def sample_increment(params: StableParams, dt: float, rng: RngStream) -> float:
    """One exact draw of X_dt - X_0."""
    return float(sample_increments(params, dt, 1, rng)[0])
