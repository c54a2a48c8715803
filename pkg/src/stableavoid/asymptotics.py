"""Long-time and small-q limit checks: the survival tail exponent 1/alpha - 1,
the spatial profile (-1-x)^(alpha-1), the clock-survival upper bound
q^(1/alpha) (x0-1), and the decay of the jumped-over stratum.

All unknown constants cancel by design: checks are ratio- or exponent-based.
Fits are weighted least squares in log-log coordinates with 1/stderr^2
weights; grid points with relative stderr above 25% are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Regime, StableParams
from .errors import DegenerateConditioningError, DomainError
from .mc import MCEstimate, gather, run_batched
from .paths import Barrier, PathConfig, sp_walk
from .rng import RngStream

MAX_REL_STDERR = 0.25


@dataclass(frozen=True)
class FitResult:
    """Weighted log-log fit: exponent, intercept, weighted r^2 and the grid."""

    exponent: float
    intercept: float
    r_squared: float
    grid: list[tuple[float, float, float]]

    def __post_init__(self):
        if not self.grid:
            raise ValueError("a fit needs a nonempty grid")
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError("r_squared must lie in [0, 1]")


def fit_power_law(
    abscissas: np.ndarray,
    estimates: np.ndarray,
    stderrs: np.ndarray,
) -> FitResult:
    """Fit log(estimate) = exponent * log(abscissa) + intercept by WLS."""
    x = np.asarray(abscissas, float)
    y = np.asarray(estimates, float)
    se = np.asarray(stderrs, float)
    if np.any(y <= 0.0):
        raise DegenerateConditioningError(
            "a grid estimate is zero; the log-log fit is degenerate"
        )
    keep = se / y <= MAX_REL_STDERR
    if keep.sum() < 2:
        raise DegenerateConditioningError(
            "fewer than two grid points survive the 25% relative-error filter"
        )
    lx = np.log(x[keep])
    ly = np.log(y[keep])
    w = (y[keep] / se[keep]) ** 2 if np.all(se[keep] > 0.0) else np.ones(lx.size)
    wt = w / w.sum()
    mx = float((wt * lx).sum())
    my = float((wt * ly).sum())
    sxx = float((wt * (lx - mx) ** 2).sum())
    sxy = float((wt * (lx - mx) * (ly - my)).sum())
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ss_res = float((wt * resid ** 2).sum())
    ss_tot = float((wt * (ly - my) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    grid = [(float(a), float(b), float(c)) for a, b, c in zip(x, y, se)]
    return FitResult(exponent=slope, intercept=intercept, r_squared=min(r2, 1.0), grid=grid)


def _kill_time_batch(params, x0, horizon, cfg, batch_n, stream):
    res = sp_walk(
        params, x0, batch_n, cfg, stream,
        barrier=Barrier.INTERVAL, horizon=horizon,
    )
    return np.where(res.killed, res.kill_time, np.inf)


def survival_tail_exponent(
    params: StableParams,
    x0: float,
    s_grid,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> FitResult:
    """Fit the decay exponent of P_x0(s < T_{[-1,1]}) over ``s_grid``.

    One path pool is simulated to max(s_grid) and reused for every s
    (common random numbers), which also makes the estimates monotone.
    """
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("the tail-exponent fit requires alpha > 1")
    if x0 >= -1.0:
        raise DomainError("x0 must lie below the interval")
    s = np.sort(np.asarray(list(s_grid), float))
    if s.size < 4:
        raise DomainError("the s grid needs at least 4 points")
    horizon = float(s[-1])
    batches = run_batched(_kill_time_batch, (params, x0, horizon, cfg), n, rng)
    t_kill = gather(batches)
    p = np.array([(t_kill > si).mean() for si in s])
    se = np.sqrt(np.maximum(p * (1.0 - p), 0.0) / n)
    return fit_power_law(s, p, se)


def _clock_survival_batch(params, x0, q, barrier, cfg, batch_n, stream):
    clocks = stream.generator.standard_exponential(batch_n) / q
    res = sp_walk(
        params, x0, batch_n, cfg, stream, barrier=barrier, clocks=clocks
    )
    return res.clock_won


def eq_survival(
    params: StableParams,
    x0: float,
    q: float,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> MCEstimate:
    """P_x0(e_q < T_{[-1,1]}) with an exponential clock per replicate."""
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("eq_survival requires alpha > 1")
    if q <= 0.0:
        raise DomainError("q must be positive")
    if x0 >= -1.0:
        raise DomainError("x0 must lie below the interval")
    batches = run_batched(
        _clock_survival_batch, (params, x0, q, Barrier.INTERVAL, cfg), n, rng
    )
    won = gather(batches)
    k = int(won.sum())
    p = k / n
    return MCEstimate(
        value=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n),
        n=n,
        seed=rng.provenance(),
    )


@dataclass(frozen=True)
class ProfilePoint:
    x: float
    ratio: float
    predicted: float
    stderr: float


def profile_ratio_check(
    params: StableParams,
    x_list,
    q: float,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> list[ProfilePoint]:
    """Clock-survival ratios against the first point of ``x_list``.

    The Port constant cancels; the prediction is
    ((-1-x)/(-1-x_ref))^(alpha-1).
    """
    xs = [float(x) for x in x_list]
    if len(xs) < 2:
        raise DomainError("the profile check needs at least two points")
    a = params.alpha
    ests = []
    for i, x in enumerate(xs):
        ests.append(eq_survival(params, x, q, cfg, n, rng.substream(i)))
    ref = ests[0]
    if ref.value == 0.0:
        raise DegenerateConditioningError("the reference estimate is zero")
    out = []
    for x, est in zip(xs, ests):
        ratio = est.value / ref.value
        rel = math.sqrt(
            (est.stderr / est.value) ** 2 + (ref.stderr / ref.value) ** 2
        ) if est.value > 0.0 else math.inf
        out.append(
            ProfilePoint(
                x=x,
                ratio=ratio,
                predicted=((-1.0 - x) / (-1.0 - xs[0])) ** (a - 1.0),
                stderr=ratio * rel,
            )
        )
    return out


@dataclass(frozen=True)
class BoundPoint:
    q: float
    lhs_estimate: float
    lhs_stderr: float
    rhs_bound: float


def upper_bound_check(
    params: StableParams,
    x0: float,
    q_grid,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> list[BoundPoint]:
    """Verify P_x0(e_q < T_{(-inf,1]}) <= q^(1/alpha) (x0 - 1) over q_grid."""
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("the bound check requires alpha > 1")
    if x0 <= 1.0:
        raise DomainError("x0 must lie above the interval")
    a = params.alpha
    out = []
    for i, q in enumerate(q_grid):
        batches = run_batched(
            _clock_survival_batch,
            (params, x0, float(q), Barrier.BELOW_ONE, cfg),
            n,
            rng.substream(i),
        )
        won = gather(batches)
        p = float(won.mean())
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        out.append(
            BoundPoint(
                q=float(q),
                lhs_estimate=p,
                lhs_stderr=se,
                rhs_bound=float(q) ** (1.0 / a) * (x0 - 1.0),
            )
        )
    return out


def _cancellation_batch(params, x0, t, q_min, cfg, batch_n, stream):
    """Shared-clock replicates for the jumped-over stratum.

    Unit exponentials are scaled per q, so one simulation to the slowest
    clock decides e_q < T for every q on the grid (common random numbers).
    """
    e_unit = stream.generator.standard_exponential(batch_n)
    clocks = e_unit / q_min
    res = sp_walk(
        params, x0, batch_n, cfg, stream,
        barrier=Barrier.INTERVAL, t_mark=t, clocks=clocks,
    )
    t_int = np.where(res.killed, res.kill_time, np.inf)
    crossed_by_t = res.jumped_over & (res.jump_time <= t)
    above_at_t = crossed_by_t & ~np.isnan(res.mark_value) & (res.mark_value > 1.0)
    return e_unit, t_int, above_at_t


def cancellation_rate(
    params: StableParams,
    x0: float,
    t: float,
    q_grid,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> FitResult:
    """Decay of the cross-interval stratum mass in q.

    Estimates P_x0(t in [T_{[-1,inf)}, T_{[-1,1]}), t < e_q | e_q < T_{[-1,1]})
    on the grid and fits its q-exponent; the predicted rate is 2/alpha - 1.
    """
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("the cancellation check requires alpha > 1")
    if x0 >= -1.0:
        raise DomainError("x0 must lie below the interval")
    qs = np.sort(np.asarray(list(q_grid), float))[::-1]
    if qs.size < 2 or qs[-1] <= 0.0:
        raise DomainError("need at least two positive q values")
    q_min = float(qs[-1])
    batches = run_batched(
        _cancellation_batch, (params, x0, t, q_min, cfg), n, rng
    )
    e_unit = gather(batches, 0)
    t_int = gather(batches, 1)
    above_at_t = gather(batches, 2)
    masses = []
    ses = []
    for q in qs:
        eq = e_unit / q
        accepted = eq < t_int
        n_acc = int(accepted.sum())
        if n_acc == 0:
            raise DegenerateConditioningError(
                f"no replicate satisfied e_q < T at q={q}"
            )
        num = accepted & above_at_t & (eq > t)
        p = int(num.sum()) / n_acc
        masses.append(p)
        ses.append(math.sqrt(max(p * (1.0 - p), 0.0) / n_acc))
    return fit_power_law(qs, np.array(masses), np.array(ses))
