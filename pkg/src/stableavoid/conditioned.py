"""Conditioned objects: transform-weighted expectations, transition kernels,
the Chapman-Kolmogorov consistency check, and both conditioning limits.

The weighted expectation of an event Lambda in F_t is

    E_x[ 1_Lambda 1_{t < T} h(X_t) ] / h(x),

with h the invariant function of the regime and T the regime's killing time:
entry into [-1, 1] for the subordinator, into (-inf, 1] from above or
[-1, inf) from below for alpha > 1.  The exponential-clock conditioning
P_x(Lambda, t < e_q | e_q < T) and the fixed-time conditioning
P_x(Lambda | T > s) converge to it as q drops to 0, respectively s grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Regime, StableParams, sample_increments, standard_increments
from .errors import DegenerateConditioningError, DomainError, PoolExhaustedError
from .mc import MCEstimate, gather, run_batched
from .paths import Barrier, PathConfig, PathSample, SPWalk, sp_walk, sub_walk
from .rng import RngStream
from .specfun import h_subordinator_many, h_updown_many, transform_weight

FULL_EVENT = "always"


@dataclass(frozen=True)
class EventSpec:
    """A path functional evaluable on a skeleton without look-ahead.

    kinds: "always", "endpoint_in" ({X_t in [a, b]}), "min_above"
    ({inf_{s<=t} X_s > a}), "max_below" ({sup_{s<=t} X_s < b}).  ``t`` is the
    functional's time horizon.
    """

    kind: str
    t: float
    a: float = -math.inf
    b: float = math.inf

    def __post_init__(self):
        if self.kind not in ("always", "endpoint_in", "min_above", "max_below"):
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.t <= 0.0:
            raise DomainError("the event horizon must be positive")

    @staticmethod
    def full(t: float) -> "EventSpec":
        return EventSpec(kind="always", t=t)

    @staticmethod
    def endpoint_in(t: float, a: float, b: float) -> "EventSpec":
        return EventSpec(kind="endpoint_in", t=t, a=a, b=b)

    @staticmethod
    def min_above(t: float, a: float) -> "EventSpec":
        return EventSpec(kind="min_above", t=t, a=a)

    @staticmethod
    def max_below(t: float, b: float) -> "EventSpec":
        return EventSpec(kind="max_below", t=t, b=b)

    def evaluate(
        self,
        end_value: np.ndarray,
        run_min: np.ndarray,
        run_max: np.ndarray,
    ) -> np.ndarray:
        if self.kind == "always":
            return np.ones_like(end_value, dtype=bool)
        if self.kind == "endpoint_in":
            return (end_value >= self.a) & (end_value <= self.b)
        if self.kind == "min_above":
            return run_min > self.a
        return run_max < self.b


@dataclass(frozen=True)
class KernelEstimate:
    """Binned sub-probability kernel estimate with per-bin errors."""

    bin_edges: np.ndarray
    masses: np.ndarray
    stderrs: np.ndarray
    total_mass: float

    def __post_init__(self):
        if self.masses.size != self.bin_edges.size - 1:
            raise ValueError("need one mass per bin")
        if np.any(self.masses < 0.0):
            raise ValueError("bin masses must be nonnegative")
        if not math.isclose(
            float(self.masses.sum()), self.total_mass, rel_tol=1e-9, abs_tol=1e-12
        ):
            raise ValueError("masses must sum to total_mass")


def _check_outside(x0: float):
    if -1.0 <= x0 <= 1.0:
        raise DomainError(f"x0={x0} lies in the interval [-1, 1]")


def _barrier_for(x0: float) -> Barrier:
    return Barrier.BELOW_ONE if x0 > 1.0 else Barrier.ABOVE_MINUS_ONE


def _weighted_batch(params, x0, t, cfg, batch_n, stream):
    """One batch of killed paths: (weight-bearing end value, min, max)."""
    if params.regime is Regime.SPECTRALLY_POSITIVE:
        res = sp_walk(
            params, x0, batch_n, cfg, stream,
            barrier=_barrier_for(x0), t_mark=t, horizon=t,
        )
        return res.mark_value, res.run_min, res.run_max
    if x0 > 1.0:
        # a subordinator above the interval is never killed; one exact jump
        end = x0 + sample_increments(params, t, batch_n, stream)
        return end, np.full(batch_n, x0), end
    res = sub_walk(params, x0, batch_n, cfg, stream, t_mark=t)
    # monotone paths: minimum is the start, maximum the current value
    return res.mark_value, np.full(batch_n, x0), res.mark_value


def _weights(params: StableParams, x0: float, end_value: np.ndarray) -> np.ndarray:
    if params.regime is Regime.SPECTRALLY_POSITIVE:
        w = h_updown_many(params.alpha, np.nan_to_num(end_value, nan=1.0))
    else:
        ok = ~np.isnan(end_value)
        w = np.zeros_like(end_value)
        w[ok] = h_subordinator_many(params.alpha, end_value[ok])
    w[np.isnan(end_value)] = 0.0
    return w / transform_weight(params, x0)


def weighted_expectation(
    params: StableParams,
    x0: float,
    t: float,
    event: EventSpec,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> MCEstimate:
    """Estimate of the conditioned probability of ``event`` at time t."""
    _check_outside(x0)
    if t <= 0.0:
        raise DomainError("t must be positive")
    if not math.isclose(event.t, t, rel_tol=1e-12):
        raise DomainError("the event horizon must match the transform time t")
    batches = run_batched(_weighted_batch, (params, x0, t, cfg), n, rng)
    end = gather(batches, 0)
    rmin = gather(batches, 1)
    rmax = gather(batches, 2)
    w = _weights(params, x0, end)
    ind = np.zeros(n)
    alive = ~np.isnan(end)
    ind[alive] = event.evaluate(end[alive], rmin[alive], rmax[alive])
    vals = w * ind
    sd = float(vals.std(ddof=1)) if n > 1 else 0.0
    return MCEstimate(float(vals.mean()), sd / math.sqrt(n), n, rng.provenance())


def _resolve_bins(bins) -> np.ndarray:
    if isinstance(bins, tuple) and len(bins) == 3:
        lo, hi, count = bins
        return np.linspace(lo, hi, count + 1)
    edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise DomainError("bin edges must be increasing with at least two entries")
    return edges


def _kernel_from(
    end: np.ndarray, w: np.ndarray, edges: np.ndarray
) -> KernelEstimate:
    n = end.size
    where = np.nan_to_num(end, nan=np.inf)
    masses = np.empty(edges.size - 1)
    errs = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        inside = (where >= edges[i]) & (where < edges[i + 1])
        vi = w * inside
        masses[i] = vi.mean()
        errs[i] = vi.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0
    return KernelEstimate(
        bin_edges=edges,
        masses=masses,
        stderrs=errs,
        total_mass=float(masses.sum()),
    )


def transition_kernel_estimate(
    params: StableParams,
    x0: float,
    t: float,
    bins,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> KernelEstimate:
    """Binned estimate of the conditioned transition kernel from x0 at t."""
    _check_outside(x0)
    edges = _resolve_bins(bins)
    batches = run_batched(_weighted_batch, (params, x0, t, cfg), n, rng)
    end = gather(batches, 0)
    w = _weights(params, x0, end)
    return _kernel_from(end, w, edges)


@dataclass(frozen=True)
class CkResult:
    """Chapman-Kolmogorov discrepancy with its self-reported error bound."""

    discrepancy: float
    bound: float
    mc_term: float
    binning_term: float
    escape_term: float
    direct: KernelEstimate
    composed_masses: np.ndarray


def chapman_kolmogorov_check(
    params: StableParams,
    x0: float,
    s: float,
    t: float,
    bins,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> CkResult:
    """Compare the kernel at t+s with the midpoint composition over bins.

    The bound combines 3-sigma Monte Carlo error, a first-order midpoint
    binning estimate from adjacent-midpoint kernel differences, and the
    stage-one mass that escapes the source bin range.
    """
    if s <= 0.0 or t <= 0.0:
        raise DomainError("s and t must be positive")
    edges = _resolve_bins(bins)
    nb = edges.size - 1
    direct = transition_kernel_estimate(
        params, x0, t + s, edges, cfg, n, rng.substream(0)
    )
    batches1 = run_batched(
        _weighted_batch, (params, x0, t, cfg), n, rng.substream(1)
    )
    end1 = gather(batches1, 0)
    w1 = _weights(params, x0, end1)
    stage1 = _kernel_from(end1, w1, edges)
    # escaped stage-one mass: alive weight landing outside the source bins
    escape = max(float(w1.mean()) - stage1.total_mass, 0.0)

    mids = 0.5 * (edges[:-1] + edges[1:])
    kernels: list[KernelEstimate] = []
    for j, z in enumerate(mids):
        kernels.append(
            transition_kernel_estimate(
                params, float(z), s, edges, cfg, n, rng.substream(2 + j)
            )
        )
    composed = np.zeros(nb)
    comp_var = np.zeros(nb)
    for j in range(nb):
        composed += stage1.masses[j] * kernels[j].masses
        comp_var += (
            stage1.masses[j] ** 2 * kernels[j].stderrs ** 2
            + kernels[j].masses ** 2 * stage1.stderrs[j] ** 2
        )
    discrepancy = 0.5 * float(np.abs(direct.masses - composed).sum())
    mc_term = 3.0 * 0.5 * math.sqrt(float((direct.stderrs ** 2 + comp_var).sum()))
    binning = 0.0
    for j in range(nb - 1):
        tv = 0.5 * float(np.abs(kernels[j + 1].masses - kernels[j].masses).sum())
        binning += 0.5 * stage1.masses[j] * tv
    bound = mc_term + binning + escape
    return CkResult(
        discrepancy=discrepancy,
        bound=bound,
        mc_term=mc_term,
        binning_term=binning,
        escape_term=escape,
        direct=direct,
        composed_masses=composed,
    )


def _clock_batch(params, x0, t, q, cfg, batch_n, stream):
    """One batch of exponential-clock replicates."""
    clocks = stream.generator.standard_exponential(batch_n) / q
    if params.regime is Regime.SPECTRALLY_POSITIVE:
        res = sp_walk(
            params, x0, batch_n, cfg, stream,
            barrier=_barrier_for(x0), t_mark=t, clocks=clocks,
        )
        accepted = res.clock_won
        end, rmin, rmax = res.mark_value, res.run_min, res.run_max
    elif x0 > 1.0:
        # never killed: every clock is accepted
        accepted = np.ones(batch_n, bool)
        end = x0 + sample_increments(params, t, batch_n, stream)
        rmin = np.full(batch_n, x0)
        rmax = end
    else:
        res = sub_walk(params, x0, batch_n, cfg, stream, t_mark=t, clocks=clocks)
        accepted = res.clock_won
        end, rmin, rmax = res.mark_value, np.full(batch_n, x0), res.mark_value
    return accepted, clocks, end, rmin, rmax


def exp_conditioning_estimate(
    params: StableParams,
    x0: float,
    t: float,
    q: float,
    event: EventSpec,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> MCEstimate:
    """P_x0(Lambda, t < e_q | e_q < T) with one exponential clock per path."""
    _check_outside(x0)
    if q <= 0.0:
        raise DomainError("q must be positive")
    if not math.isclose(event.t, t, rel_tol=1e-12):
        raise DomainError("the event horizon must match t")
    batches = run_batched(_clock_batch, (params, x0, t, q, cfg), n, rng)
    accepted = gather(batches, 0)
    clocks = gather(batches, 1)
    end = gather(batches, 2)
    rmin = gather(batches, 3)
    rmax = gather(batches, 4)
    n_acc = int(accepted.sum())
    if n_acc == 0:
        raise DegenerateConditioningError(
            f"no replicate satisfied e_q < T (acceptance 0/{n}) at q={q}"
        )
    num = accepted & (clocks > t)
    ok = num & ~np.isnan(end)
    lam = np.zeros(n, bool)
    lam[ok] = event.evaluate(end[ok], rmin[ok], rmax[ok])
    k = int((num & lam).sum())
    p = k / n_acc
    return MCEstimate(
        value=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n_acc),
        n=n_acc,
        seed=rng.provenance(),
    )


def _time_cond_batch(params, x0, s, t_event, cfg, batch_n, stream):
    res = sub_walk(params, x0, batch_n, cfg, stream, t_mark=t_event, horizon=s)
    surviving = res.jumped_over | (res.cross_time > s)
    return surviving, res.mark_value, res.mark_alive


def time_conditioning_estimate(
    params: StableParams,
    x0: float,
    s: float,
    event: EventSpec,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> MCEstimate:
    """P_x0(Lambda | T_{[-1,1]} > s) for the subordinator regime.

    The conditioning event is decided pathwise: the path either crossed -1 by
    time s (landing inside kills it, beyond acquits it forever) or is still
    below -1 at s.
    """
    if params.regime is not Regime.SUBORDINATOR:
        raise DomainError("time conditioning requires alpha < 1")
    _check_outside(x0)
    if event.t >= s:
        raise DomainError("the event horizon must lie before s")
    if x0 > 1.0:
        # conditioning event has probability one; plain expectation
        return weighted_expectation(
            params, x0, event.t, event, cfg, n, rng
        )
    batches = run_batched(_time_cond_batch, (params, x0, s, event.t, cfg), n, rng)
    surviving = gather(batches, 0)
    end = gather(batches, 1)
    alive_mark = gather(batches, 2)
    n_acc = int(surviving.sum())
    if n_acc == 0:
        raise DegenerateConditioningError(
            f"no replicate satisfied T > s (acceptance 0/{n}) at s={s}"
        )
    ok = surviving & alive_mark
    lam = np.zeros(n, bool)
    lam[ok] = event.evaluate(
        end[ok], np.full(int(ok.sum()), x0), end[ok]
    )
    k = int((surviving & lam).sum())
    p = k / n_acc
    return MCEstimate(
        value=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n_acc),
        n=n_acc,
        seed=rng.provenance(),
    )


def _record_sp_path(params, x0, t, cfg, m, stream) -> tuple[np.ndarray, np.ndarray]:
    """m spectrally positive killed paths on the uniform dt grid.

    Returns (grid times, values with NaN from the kill step onward).
    """
    n_steps = int(math.ceil(t / cfg.dt))
    times = np.minimum(np.arange(n_steps + 1) * cfg.dt, t)
    values = np.full((m, n_steps + 1), np.nan)
    values[:, 0] = x0
    pos = np.full(m, float(x0))
    alive = np.arange(m)
    barrier = _barrier_for(x0)
    gen = stream.generator
    near_zone = 3.0 * cfg.dt ** (1.0 / params.alpha)
    for k in range(1, n_steps + 1):
        if not alive.size:
            break
        dt_k = times[k] - times[k - 1]
        dist = pos[alive] - 1.0 if x0 > 1.0 else -1.0 - pos[alive]
        subs = np.where(dist <= near_zone, 2 ** cfg.refine_levels, 1)
        new = pos[alive].copy()
        dead = np.zeros(alive.size, bool)
        for lvl in np.unique(subs):
            sel = subs == lvl
            cnt = int(sel.sum())
            inc = np.zeros(cnt)
            for _ in range(lvl):
                z = standard_increments(params.alpha, cnt, gen)
                step = params.scale ** (1.0 / params.alpha) * (
                    dt_k / lvl
                ) ** (1.0 / params.alpha) * z
                inc += step
                mid = new[sel] + inc
                if barrier is Barrier.BELOW_ONE:
                    dead[sel] |= mid <= 1.0
                else:
                    dead[sel] |= mid >= -1.0
            new[sel] += inc
        pos[alive] = new
        still = ~dead
        values[alive[still], k] = new[still]
        alive = alive[still]
    return times, values


def sample_conditioned_path(
    params: StableParams,
    x0: float,
    t: float,
    cfg: PathConfig,
    m: int,
    rng: RngStream,
    max_regen: int = 50,
) -> PathSample:
    """One path drawn from an m-path killed pool by endpoint weight.

    The marginal law of the returned endpoint tends to the conditioned
    kernel as the pool grows; an all-zero-weight pool triggers regeneration.
    """
    _check_outside(x0)
    if m < 1:
        raise DomainError("the pool needs at least one path")
    for attempt in range(max_regen):
        stream = rng.substream(attempt)
        if params.regime is Regime.SPECTRALLY_POSITIVE:
            times, values = _record_sp_path(params, x0, t, cfg, m, stream)
            ends = values[:, -1]
            w = h_updown_many(params.alpha, np.nan_to_num(ends, nan=1.0))
            w[np.isnan(ends)] = 0.0
        else:
            res = sub_walk(params, x0, m, cfg, stream, t_mark=t)
            ends = res.mark_value
            w = np.zeros(m)
            okq = ~np.isnan(ends)
            w[okq] = h_subordinator_many(params.alpha, ends[okq])
        total = w.sum()
        if total <= 0.0:
            continue
        pick = int(rng.substream(10_000 + attempt).generator.choice(m, p=w / total))
        if params.regime is Regime.SPECTRALLY_POSITIVE:
            vals = values[pick]
            keep = ~np.isnan(vals)
            return PathSample(times=times[keep], values=vals[keep])
        # event times are not stored for the subordinator; return the
        # two-point sketch (start and marked endpoint)
        return PathSample(
            times=np.array([0.0, t]),
            values=np.array([x0, float(ends[pick])]),
        )
    raise PoolExhaustedError(
        f"no surviving weight in {max_regen} pools of size {m}"
    )
