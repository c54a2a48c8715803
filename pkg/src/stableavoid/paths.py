"""Trajectory simulation with hitting detection for the barriers
(-inf, 1], [-1, inf) and [-1, 1].

Two engines live here.

For alpha > 1 (spectrally positive) a grid walker takes exact stable
increments with a state-dependent step size: steps shrink near a barrier
(continuous descent is light-tailed, so a margin of a few step-scales
suffices) and, when the barrier sits above the path, are additionally capped
so that the per-step probability of a jump spanning the gap stays below a
fixed budget.  Near-barrier steps drop to dt / 2^refine_levels.  Setting
``dt_cap`` lets steps grow beyond ``dt`` far from every barrier, which makes
long-horizon survival runs affordable without touching the near-barrier
resolution.

For alpha < 1 (subordinator) first passage is exact at jumps: jumps above a
cutoff form a compound Poisson process, smaller ones a deterministic drift.
With refine_levels >= 1 the cutoff shrinks proportionally to the remaining
gap as the path closes in on the barrier, and the drift advance per event is
capped at half the gap (a memoryless restart, hence unbiased), so crossings
are always resolved by an explicit jump down to a relative resolution floor
of 1e-14.  With refine_levels == 0 the cutoff stays fixed at ``eps`` and
drift-caused crossings are flagged and re-run at eps/10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    Regime,
    StableParams,
    levy_coefficient,
    levy_tail,
    small_jump_mean,
    standard_increments,
)
from .errors import DomainError, ResourceLimitError
from .mc import MCEstimate, binomial_estimate
from .rng import RngStream

# near-barrier refinement zone, in units of dt^(1/alpha)
SPEC_MARGIN = 3.0
# step margin against continuous crossing, in units of dt^(1/alpha)
LIGHT_MARGIN = 5.0
# per-step probability budget for a single jump spanning the gap
JUMP_RISK = 2e-3
# relative resolution floor of the subordinator zoom mode
FLOOR_REL = 1e-14
# per-layer drift-win probability target for the subordinator cutoff ratio
DRIFT_WIN = 1e-3
# hard budgets
MAX_SKELETON_POINTS = 20_000_000
MAX_TOTAL_STEPS = 4_000_000_000


class Barrier(Enum):
    BELOW_ONE = "below_one"            # entering (-inf, 1]
    ABOVE_MINUS_ONE = "above_minus_one"  # entering [-1, inf)
    INTERVAL = "interval"              # entering [-1, 1]


@dataclass(frozen=True)
class PathConfig:
    """Discretization knobs shared by every simulation."""

    dt: float = 1e-3
    horizon: float = 100.0
    eps: float = 1e-4
    refine_levels: int = 4
    dt_cap: float | None = None

    def __post_init__(self):
        if self.dt <= 0.0 or self.horizon <= 0.0:
            raise DomainError("dt and horizon must be positive")
        if self.dt > self.horizon:
            raise DomainError("dt must not exceed the horizon")
        if not 0.0 < self.eps < 1.0:
            raise DomainError("eps must lie in (0, 1)")
        if self.refine_levels < 0:
            raise DomainError("refine_levels must be nonnegative")
        if self.dt_cap is not None and self.dt_cap < self.dt:
            raise DomainError("dt_cap must be at least dt")


@dataclass(frozen=True)
class HittingOutcome:
    """First-passage record for a single trajectory."""

    hit: bool
    time: float
    pre_position: float
    post_position: float
    overshoot: float
    censored: bool

    def __post_init__(self):
        if self.censored and self.hit:
            raise ValueError("a censored outcome cannot also be a hit")
        if self.overshoot < 0.0:
            raise ValueError("overshoot must be nonnegative")


@dataclass(frozen=True)
class PathSample:
    """A recorded trajectory: strictly increasing times starting at 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.times[0] != 0.0:
            raise ValueError("a path starts at time 0")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")


# ---------------------------------------------------------------------------
# spectrally positive walker (alpha > 1)
# ---------------------------------------------------------------------------

@dataclass
class SPWalk:
    """Struct-of-arrays result of a batch walk."""

    killed: np.ndarray
    kill_time: np.ndarray
    pre_kill: np.ndarray       # grid value one step before the kill
    post_kill: np.ndarray      # grid value at the kill step
    clock_won: np.ndarray
    censored: np.ndarray
    end_time: np.ndarray
    mark_value: np.ndarray     # position at t_mark while alive, else NaN
    run_min: np.ndarray        # skeleton extrema up to t_mark
    run_max: np.ndarray
    jumped_over: np.ndarray    # crossed from below -1 to above 1
    jump_time: np.ndarray
    steps: int = 0
    refined_steps: int = 0


def _immediate_hit(x0: float, barrier: Barrier | None) -> bool:
    if barrier is Barrier.BELOW_ONE and x0 <= 1.0:
        return True
    if barrier is Barrier.ABOVE_MINUS_ONE and x0 >= -1.0:
        return True
    if barrier is Barrier.INTERVAL and -1.0 <= x0 <= 1.0:
        return True
    return False


def sp_walk(
    params: StableParams,
    x0: float,
    n: int,
    cfg: PathConfig,
    rng: RngStream,
    *,
    barrier: Barrier | None,
    t_mark: float | None = None,
    horizon: float | None = None,
    clocks: np.ndarray | None = None,
) -> SPWalk:
    """Walk n paths from x0 with exact increments and adaptive steps.

    Paths stop at the first of: kill (barrier entry), private clock
    (clocks[i]), or horizon.  If ``t_mark`` is set, the position and the
    skeleton extrema at that time are recorded for paths still alive, and
    the walk continues if a clock or horizon lies beyond the mark.
    """
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("the grid walker requires the spectrally positive regime")
    a = params.alpha
    scale_root = params.scale ** (1.0 / a)
    c_a = levy_coefficient(params)
    dt_base = cfg.dt
    dt_fine = dt_base / 2 ** cfg.refine_levels
    dt_cap = cfg.dt_cap if cfg.dt_cap is not None else dt_base
    near_zone = SPEC_MARGIN * dt_base ** (1.0 / a)
    jump_k = JUMP_RISK * a / c_a
    gen = rng.generator

    out = SPWalk(
        killed=np.zeros(n, bool),
        kill_time=np.full(n, np.nan),
        pre_kill=np.full(n, np.nan),
        post_kill=np.full(n, np.nan),
        clock_won=np.zeros(n, bool),
        censored=np.zeros(n, bool),
        end_time=np.zeros(n),
        mark_value=np.full(n, np.nan),
        run_min=np.full(n, float(x0)),
        run_max=np.full(n, float(x0)),
        jumped_over=np.zeros(n, bool),
        jump_time=np.full(n, np.nan),
    )
    if _immediate_hit(x0, barrier):
        out.killed[:] = True
        out.kill_time[:] = 0.0
        out.pre_kill[:] = x0
        out.post_kill[:] = x0
        return out

    pos = np.full(n, float(x0))
    t = np.zeros(n)
    above = np.full(n, x0 > 1.0)
    marked = np.zeros(n, bool)
    if t_mark is None:
        marked[:] = True
    idx = np.arange(n)

    while idx.size:
        p = pos[idx]
        ab = above[idx]
        if barrier is None:
            dist = None
            dt = np.full(idx.size, min(dt_base, dt_cap))
        else:
            if barrier is Barrier.BELOW_ONE:
                dist = p - 1.0
                barrier_above = np.zeros(idx.size, bool)
            elif barrier is Barrier.ABOVE_MINUS_ONE:
                dist = -1.0 - p
                barrier_above = np.ones(idx.size, bool)
            else:  # INTERVAL: distance to the active edge
                dist = np.where(ab, p - 1.0, -1.0 - p)
                barrier_above = ~ab
            dt = np.minimum((dist / LIGHT_MARGIN) ** a, dt_cap)
            risky = barrier_above
            if risky.any():
                dt = np.where(risky, np.minimum(dt, jump_k * dist ** a), dt)
            near = dist <= near_zone
            dt = np.where(near, dt_fine, np.maximum(dt, dt_fine))
            out.refined_steps += int(near.sum())
        if t_mark is not None:
            pre_mark = t[idx] < t_mark
            dt = np.where(pre_mark, np.minimum(dt, t_mark - t[idx]), dt)
        if clocks is not None:
            dt = np.minimum(dt, clocks[idx] - t[idx])
        if horizon is not None:
            dt = np.minimum(dt, horizon - t[idx])
        dt = np.maximum(dt, 1e-18)

        out.steps += idx.size
        if out.steps > MAX_TOTAL_STEPS:
            raise ResourceLimitError(
                f"step budget {MAX_TOTAL_STEPS} exceeded in sp_walk"
            )
        z = standard_increments(a, idx.size, gen)
        p_new = p + scale_root * dt ** (1.0 / a) * z
        t_new = t[idx] + dt
        pos[idx] = p_new
        t[idx] = t_new

        if t_mark is not None:
            track = ~marked[idx]
            if track.any():
                ti = idx[track]
                out.run_min[ti] = np.minimum(out.run_min[ti], p_new[track])
                out.run_max[ti] = np.maximum(out.run_max[ti], p_new[track])

        if barrier is None:
            die = np.zeros(idx.size, bool)
        elif barrier is Barrier.BELOW_ONE:
            die = p_new <= 1.0
        elif barrier is Barrier.ABOVE_MINUS_ONE:
            die = p_new >= -1.0
        else:
            die = np.where(ab, p_new <= 1.0, (p_new >= -1.0) & (p_new <= 1.0))
            hop = ~ab & (p_new > 1.0)
            if hop.any():
                hi = idx[hop]
                above[hi] = True
                out.jumped_over[hi] = True
                out.jump_time[hi] = t_new[hop]
        if die.any():
            di = idx[die]
            out.killed[di] = True
            out.kill_time[di] = t_new[die]
            out.pre_kill[di] = p[die]
            out.post_kill[di] = p_new[die]
            out.end_time[di] = t_new[die]

        stay = ~die
        if t_mark is not None:
            at_mark = stay & ~marked[idx] & (t_new >= t_mark - 1e-12)
            if at_mark.any():
                mi = idx[at_mark]
                out.mark_value[mi] = p_new[at_mark]
                marked[mi] = True
            if clocks is None and horizon is None:
                done = stay & marked[idx] & (t_new >= t_mark - 1e-12)
                out.end_time[idx[done]] = t_new[done]
                stay &= ~done
        if clocks is not None:
            won = stay & (t_new >= clocks[idx] - 1e-12)
            wi = idx[won]
            out.clock_won[wi] = True
            out.end_time[wi] = t_new[won]
            stay &= ~won
        if horizon is not None:
            cens = stay & (t_new >= horizon - 1e-12)
            ci = idx[cens]
            out.censored[ci] = True
            out.end_time[ci] = t_new[cens]
            stay &= ~cens
        idx = idx[stay]
    return out


# ---------------------------------------------------------------------------
# subordinator engine (alpha < 1), exact at jumps
# ---------------------------------------------------------------------------

@dataclass
class SubCross:
    """First-passage records over a fixed level for a batch of paths."""

    time: np.ndarray
    pre: np.ndarray
    post: np.ndarray
    overshoot: np.ndarray
    drift_crossed: np.ndarray   # finalized by drift (literal mode) or at the floor
    events: int = 0


def _sub_consts(params: StableParams, eps: float) -> tuple[float, float, float]:
    c_a = levy_coefficient(params)
    a = params.alpha
    rate = c_a * eps ** (-a) / a
    drift = c_a * eps ** (1.0 - a) / (1.0 - a)
    return c_a, rate, drift


def _cutoff_ratio(alpha: float) -> float:
    """Cutoff-to-gap ratio keeping the per-layer drift-win chance ~DRIFT_WIN."""
    return min(0.34, (1.0 - alpha) / (-math.log(DRIFT_WIN) * alpha))


def sub_cross(
    params: StableParams,
    x0: float,
    level: float,
    n: int,
    cfg: PathConfig,
    rng: RngStream,
) -> SubCross:
    """Exact-at-jumps first passage of n subordinator paths over ``level``."""
    if params.regime is not Regime.SUBORDINATOR:
        raise DomainError("sub_cross requires the subordinator regime")
    if x0 >= level:
        raise DomainError("the start must lie below the level")
    a = params.alpha
    c_a = levy_coefficient(params)
    eps = cfg.eps
    multiscale = cfg.refine_levels >= 1
    ratio = _cutoff_ratio(a)
    floor = FLOOR_REL * max(1.0, abs(level - x0), abs(level))
    gen = rng.generator

    out = SubCross(
        time=np.zeros(n),
        pre=np.full(n, np.nan),
        post=np.full(n, np.nan),
        overshoot=np.full(n, np.nan),
        drift_crossed=np.zeros(n, bool),
    )
    pos = np.full(n, float(x0))
    t = np.zeros(n)

    # block mode at the configured cutoff; in multiscale mode paths stop at
    # the zoom threshold below the level instead of crossing from inside it
    enter = eps / ratio if multiscale else 0.0
    _, rate0, drift0 = _sub_consts(params, eps)
    block = 64
    idx = np.flatnonzero(pos < level - enter)
    while idx.size:
        m = idx.size
        out.events += m * block
        if out.events > MAX_TOTAL_STEPS:
            raise ResourceLimitError("event budget exceeded in sub_cross")
        tau = gen.standard_exponential((m, block)) / rate0
        jump = eps * gen.random((m, block)) ** (-1.0 / a)
        ct = np.cumsum(tau, axis=1)
        cj = np.cumsum(jump, axis=1)
        pre_ev = pos[idx, None] + drift0 * ct + cj - jump
        post_ev = pre_ev + jump
        if multiscale:
            trig = post_ev > level - enter
        else:
            trig = (pre_ev >= level) | (post_ev > level)
        hs = trig.any(axis=1)
        k = trig.argmax(axis=1)
        rows = np.flatnonzero(hs)
        g = idx[rows]
        kk = k[rows]
        t[g] += ct[rows, kk]
        pre_g = pre_ev[rows, kk]
        post_g = post_ev[rows, kk]
        if multiscale:
            crossed = post_g > level
            gc = g[crossed]
            out.time[gc] = t[gc]
            out.pre[gc] = pre_g[crossed]
            out.post[gc] = post_g[crossed]
            out.overshoot[gc] = post_g[crossed] - level
            pos[g[~crossed]] = post_g[~crossed]
        else:
            dc = pre_g >= level
            out.time[g] = t[g]
            out.pre[g] = np.where(dc, level, pre_g)
            out.post[g] = np.where(dc, level, post_g)
            out.overshoot[g] = np.where(dc, 0.0, post_g - level)
            out.drift_crossed[g] = dc
        ok = ~hs
        pos[idx[ok]] += drift0 * ct[ok, -1] + cj[ok, -1]
        t[idx[ok]] += ct[ok, -1]
        idx = idx[ok]

    if not multiscale:
        return out

    # zoom mode: cutoff proportional to the gap, drift advance capped at
    # half the gap (memoryless restart), crossings resolved by jumps
    idx = np.flatnonzero(np.isnan(out.post))
    while idx.size:
        gap = level - pos[idx]
        at_floor = gap <= floor
        if at_floor.any():
            g = idx[at_floor]
            j = floor * gen.random(g.size) ** (-1.0 / a)
            out.time[g] = t[g]
            out.pre[g] = pos[g]
            out.post[g] = pos[g] + j
            out.overshoot[g] = out.post[g] - level
            out.drift_crossed[g] = True
            idx = idx[~at_floor]
            gap = gap[~at_floor]
            if not idx.size:
                break
        el = np.clip(ratio * gap, floor, eps)
        rt = c_a * el ** (-a) / a
        dr = c_a * el ** (1.0 - a) / (1.0 - a)
        out.events += idx.size
        if out.events > MAX_TOTAL_STEPS:
            raise ResourceLimitError("event budget exceeded in sub_cross")
        tau = gen.standard_exponential(idx.size) / rt
        t_cap = 0.5 * gap / dr
        halve = tau >= t_cap
        gh = idx[halve]
        pos[gh] += 0.5 * gap[halve]
        t[gh] += t_cap[halve]
        gi = idx[~halve]
        if gi.size:
            pre = pos[gi] + dr[~halve] * tau[~halve]
            j = el[~halve] * gen.random(gi.size) ** (-1.0 / a)
            post = pre + j
            t[gi] += tau[~halve]
            cross = post > level
            gc = gi[cross]
            out.time[gc] = t[gc]
            out.pre[gc] = pre[cross]
            out.post[gc] = post[cross]
            out.overshoot[gc] = post[cross] - level
            pos[gi[~cross]] = post[~cross]
        idx = np.flatnonzero(np.isnan(out.post))
    return out


@dataclass
class SubWalk:
    """State of n subordinator paths relative to the interval [-1, 1].

    ``cross_time`` is the first passage over -1 (inf while still below at the
    stop time); ``killed`` means the crossing landed inside the interval.
    """

    cross_time: np.ndarray
    cross_post: np.ndarray
    killed: np.ndarray
    jumped_over: np.ndarray
    mark_value: np.ndarray
    mark_alive: np.ndarray
    clock_won: np.ndarray
    drift_crossed: np.ndarray
    events: int = 0


def sub_walk(
    params: StableParams,
    x0: float,
    n: int,
    cfg: PathConfig,
    rng: RngStream,
    *,
    t_mark: float | None = None,
    clocks: np.ndarray | None = None,
    horizon: float | None = None,
) -> SubWalk:
    """Event-driven walk of killed subordinator paths from x0 < -1.

    Each path runs to the first of: crossing of -1 (landing in [-1, 1] kills
    it, landing above 1 leaves it alive forever), its private clock, or the
    horizon.  The position at ``t_mark`` is recorded for paths alive there;
    a path that jumped over before the mark gets its mark position in one
    exact stable increment since no barrier remains for it.
    """
    if params.regime is not Regime.SUBORDINATOR:
        raise DomainError("sub_walk requires the subordinator regime")
    if x0 >= -1.0:
        raise DomainError("sub_walk starts below the interval")
    if clocks is not None and horizon is not None:
        raise DomainError("use either clocks or a horizon, not both")
    a = params.alpha
    c_a = levy_coefficient(params)
    eps = cfg.eps
    multiscale = cfg.refine_levels >= 1
    ratio = _cutoff_ratio(a)
    floor = FLOOR_REL * max(1.0, abs(-1.0 - x0))
    level = -1.0
    gen = rng.generator

    out = SubWalk(
        cross_time=np.full(n, np.inf),
        cross_post=np.full(n, np.nan),
        killed=np.zeros(n, bool),
        jumped_over=np.zeros(n, bool),
        mark_value=np.full(n, np.nan),
        mark_alive=np.zeros(n, bool),
        clock_won=np.zeros(n, bool),
        drift_crossed=np.zeros(n, bool),
    )
    pos = np.full(n, float(x0))
    t = np.zeros(n)
    marked = np.zeros(n, bool)
    stopped = np.zeros(n, bool)  # clock or horizon reached while below
    if t_mark is None:
        marked[:] = True

    idx = np.arange(n)
    while idx.size:
        gap = level - pos[idx]
        at_floor = gap <= floor
        if multiscale and at_floor.any():
            # crossing resolved by the next jump at the resolution floor
            g = idx[at_floor]
            j = floor * gen.random(g.size) ** (-1.0 / a)
            out.cross_time[g] = t[g]
            out.cross_post[g] = pos[g] + j
            out.drift_crossed[g] = True
            idx = idx[~at_floor]
            if not idx.size:
                break
            gap = gap[~at_floor]
        el = np.clip(ratio * gap, floor, eps) if multiscale else np.full(
            idx.size, eps
        )
        rt = c_a * el ** (-a) / a
        dr = c_a * el ** (1.0 - a) / (1.0 - a)
        out.events += idx.size
        if out.events > MAX_TOTAL_STEPS:
            raise ResourceLimitError("event budget exceeded in sub_walk")
        tau = gen.standard_exponential(idx.size) / rt
        t_cap = 0.5 * gap / dr if multiscale else np.full(idx.size, np.inf)
        # nearest boundary ahead of each path (mark, then clock/horizon)
        t_bound = np.full(idx.size, np.inf)
        if t_mark is not None:
            t_bound = np.where(~marked[idx], t_mark - t[idx], t_bound)
        if clocks is not None:
            t_bound = np.minimum(t_bound, clocks[idx] - t[idx])
        if horizon is not None:
            t_bound = np.minimum(t_bound, horizon - t[idx])

        first = np.minimum(np.minimum(tau, t_cap), t_bound)
        is_bound = first >= t_bound  # boundary wins ties
        is_halve = ~is_bound & (first >= t_cap)
        is_jump = ~is_bound & ~is_halve

        if is_bound.any():
            bi = idx[is_bound]
            pos[bi] += dr[is_bound] * t_bound[is_bound]
            t[bi] += t_bound[is_bound]
            if t_mark is not None:
                hit_mark = ~marked[bi] & (t[bi] >= t_mark - 1e-12)
                mi = bi[hit_mark]
                out.mark_value[mi] = pos[mi]
                out.mark_alive[mi] = True
                marked[mi] = True
                if clocks is None and horizon is None:
                    stopped[mi] = True
                rest = bi[~hit_mark]
            else:
                rest = bi
            if clocks is not None:
                won = rest[t[rest] >= clocks[rest] - 1e-12]
                out.clock_won[won] = True
                stopped[won] = True
            if horizon is not None:
                cens = rest[t[rest] >= horizon - 1e-12]
                stopped[cens] = True
        if is_halve.any():
            hi = idx[is_halve]
            pos[hi] += 0.5 * gap[is_halve]
            t[hi] += t_cap[is_halve]
        if is_jump.any():
            ji = idx[is_jump]
            pre = pos[ji] + dr[is_jump] * tau[is_jump]
            if not multiscale:
                dc = pre >= level
                if dc.any():
                    # literal mode: drift crossing lands on the boundary
                    g = ji[dc]
                    out.cross_time[g] = t[g] + (level - pos[g]) / dr[is_jump][dc]
                    out.cross_post[g] = level
                    out.drift_crossed[g] = True
                ji = ji[~dc]
                pre = pre[~dc]
                keepj = ~dc
            else:
                keepj = np.ones(ji.size, bool)
            if ji.size:
                sel = np.flatnonzero(is_jump)[keepj]
                j = el[sel] * gen.random(ji.size) ** (-1.0 / a)
                post = pre + j
                t[ji] += tau[sel]
                pos[ji] = post
                crossed = post > level
                ci = ji[crossed]
                out.cross_time[ci] = t[ci]
                out.cross_post[ci] = post[crossed]

        done = ~np.isnan(out.cross_post[idx]) | stopped[idx]
        idx = idx[~done]

    crossed = ~np.isnan(out.cross_post)
    out.killed = crossed & (out.cross_post <= 1.0)
    out.jumped_over = crossed & (out.cross_post > 1.0)

    if t_mark is not None:
        # jump-over paths are barrier-free: one exact increment to the mark
        need = out.jumped_over & ~marked & (out.cross_time <= t_mark)
        ni = np.flatnonzero(need)
        if ni.size:
            dt_rest = np.maximum(t_mark - out.cross_time[ni], 1e-300)
            z = standard_increments(a, ni.size, gen)
            out.mark_value[ni] = (
                out.cross_post[ni]
                + params.scale ** (1.0 / a) * dt_rest ** (1.0 / a) * z
            )
            out.mark_alive[ni] = True
    if clocks is not None:
        # a path that jumped over can never be killed: its clock always wins
        out.clock_won |= out.jumped_over
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def simulate_skeleton(
    params: StableParams,
    x0: float,
    cfg: PathConfig,
    rng: RngStream,
) -> PathSample:
    """Discrete skeleton on the uniform grid {0, dt, ..., horizon}."""
    if params.regime is not Regime.SPECTRALLY_POSITIVE:
        raise DomainError("the skeleton sampler requires the spectrally "
                          "positive regime")
    n_steps = int(round(cfg.horizon / cfg.dt))
    if n_steps + 1 > MAX_SKELETON_POINTS:
        raise ResourceLimitError(
            f"horizon/dt = {n_steps} exceeds the {MAX_SKELETON_POINTS} point cap"
        )
    a = params.alpha
    z = standard_increments(a, n_steps, rng.generator)
    incs = params.scale ** (1.0 / a) * cfg.dt ** (1.0 / a) * z
    values = np.empty(n_steps + 1)
    values[0] = x0
    np.cumsum(incs, out=values[1:])
    values[1:] += x0
    times = np.linspace(0.0, n_steps * cfg.dt, n_steps + 1)
    return PathSample(times=times, values=values)


def first_passage_sample(
    params: StableParams,
    x0: float,
    level: float,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> SubCross:
    """Batch first-passage records, applying the drift re-run policy.

    In literal mode (refine_levels == 0) drift-caused crossings are re-run
    with eps/10, up to three attempts; survivors of the policy keep the
    drift flag so callers can report the residual fraction.
    """
    res = sub_cross(params, x0, level, n, cfg, rng)
    if cfg.refine_levels == 0:
        attempt = 1
        while res.drift_crossed.any() and attempt <= 3:
            redo = np.flatnonzero(res.drift_crossed)
            finer = PathConfig(
                dt=cfg.dt,
                horizon=cfg.horizon,
                eps=cfg.eps / 10.0 ** attempt,
                refine_levels=0,
                dt_cap=cfg.dt_cap,
            )
            sub = sub_cross(
                params, x0, level, redo.size, finer, rng.substream(1000 + attempt)
            )
            for name in ("time", "pre", "post", "overshoot"):
                getattr(res, name)[redo] = getattr(sub, name)
            res.drift_crossed[redo] = sub.drift_crossed
            res.events += sub.events
            attempt += 1
    return res


def first_passage_subordinator(
    params: StableParams,
    x0: float,
    level: float,
    cfg: PathConfig,
    rng: RngStream,
) -> HittingOutcome:
    """First time a subordinator path from x0 reaches ``level``."""
    res = first_passage_sample(params, x0, level, cfg, 1, rng)
    return HittingOutcome(
        hit=True,
        time=float(res.time[0]),
        pre_position=float(res.pre[0]),
        post_position=float(res.post[0]),
        overshoot=float(res.overshoot[0]) if not res.drift_crossed[0] else 0.0,
        censored=False,
    )


def hitting_sample(
    params: StableParams,
    x0: float,
    barrier: Barrier,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
    *,
    horizon: float | None = None,
) -> SPWalk:
    """Batch interval/half-line hitting walks for alpha > 1."""
    if -1.0 <= x0 <= 1.0:
        raise DomainError(f"x0={x0} lies in the interval [-1, 1]")
    return sp_walk(
        params,
        x0,
        n,
        cfg,
        rng,
        barrier=barrier,
        horizon=cfg.horizon if horizon is None else horizon,
    )


def hitting_time_interval(
    params: StableParams,
    x0: float,
    barrier: Barrier,
    cfg: PathConfig,
    rng: RngStream,
) -> HittingOutcome:
    """First entry of one path into the chosen barrier set, or censoring."""
    res = hitting_sample(params, x0, barrier, cfg, 1, rng)
    hit = bool(res.killed[0])
    if hit:
        post = float(res.post_kill[0])
        pre = float(res.pre_kill[0])
        over = 0.0
        if x0 < -1.0 and post >= -1.0:
            # upward crossings happen by jumps; record their excess
            over = max(post - (-1.0), 0.0)
        return HittingOutcome(
            hit=True,
            time=float(res.kill_time[0]),
            pre_position=pre,
            post_position=post,
            overshoot=over,
            censored=False,
        )
    return HittingOutcome(
        hit=False,
        time=float(res.end_time[0]),
        pre_position=float(x0),
        post_position=float(x0),
        overshoot=0.0,
        censored=True,
    )


def survival_probability(
    params: StableParams,
    x0: float,
    t: float,
    barrier: Barrier,
    cfg: PathConfig,
    n: int,
    rng: RngStream,
) -> MCEstimate:
    """Monte Carlo estimate of P_x0(t < T_barrier)."""
    if n < 1:
        raise DomainError("n must be at least 1")
    if params.regime is Regime.SUBORDINATOR:
        if _immediate_hit(x0, barrier):
            return MCEstimate(0.0, 0.0, n, rng.provenance())
        if x0 > 1.0:
            # increasing paths above the interval never return
            return MCEstimate(1.0, 0.0, n, rng.provenance())
        res = first_passage_sample(params, x0, -1.0, cfg, n, rng)
        if barrier is Barrier.ABOVE_MINUS_ONE:
            survive = res.time > t
        else:  # INTERVAL: landing beyond the interval means escape forever
            survive = (res.time > t) | (res.post > 1.0)
        return binomial_estimate(int(survive.sum()), n, rng)
    if _immediate_hit(x0, barrier):
        return MCEstimate(0.0, 0.0, n, rng.provenance())
    res = sp_walk(params, x0, n, cfg, rng, barrier=barrier, horizon=t)
    return binomial_estimate(int((~res.killed).sum()), n, rng)
