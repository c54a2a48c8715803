"""Reproducible experiment runner.

Every module operation is exposed as a subcommand producing flat CSV or JSON
records with the full configuration echoed, so a record alone reproduces the
run.  Wall-clock time is printed to the console but kept out of output files:
reruns with the same seed are byte-identical for any worker count.

Exit codes: 0 ok, 2 configuration error, 3 domain error, 4 degenerate
conditioning, 5 tolerance failure in self-check mode.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .asymptotics import (
    cancellation_rate,
    eq_survival,
    profile_ratio_check,
    survival_tail_exponent,
    upper_bound_check,
)
from .conditioned import (
    EventSpec,
    chapman_kolmogorov_check,
    exp_conditioning_estimate,
    sample_conditioned_path,
    time_conditioning_estimate,
    transition_kernel_estimate,
    weighted_expectation,
)
from .core import make_params
from .errors import DegenerateConditioningError, DomainError
from .mc import WORKERS_ENV
from .paths import PathConfig, first_passage_sample
from .rng import RngStream
from .specfun import h_subordinator, overshoot_cdf

CSV_HEADER = "quantity,value,stderr,n,alpha,x0,t,s,q,dt,eps,seed,notes"


@dataclass
class ResultRecord:
    """One scalar result with its full provenance."""

    quantity: str
    value: float | None
    stderr: float | None
    n: int | None
    alpha: float | None
    x0: float | None
    t: float | None
    s: float | None
    q: float | None
    dt: float | None
    eps: float | None
    seed: int
    notes: str = ""


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(records: list[ResultRecord], path: str | None, fmt: str):
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in records:
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        r.quantity, r.value, r.stderr, r.n, r.alpha, r.x0,
                        r.t, r.s, r.q, r.dt, r.eps, r.seed, r.notes,
                    )
                )
            )
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps([asdict(r) for r in records], sort_keys=True, indent=1)
        text += "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--refine-levels", type=int, default=4)
    p.add_argument("--dt-cap", type=float, default=None)
    p.add_argument("--horizon", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="flat key=value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stableavoid",
        description="Monte Carlo verification of one-sided stable processes "
                    "conditioned to avoid [-1, 1]",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-h", help="closed-form h with an MC cross-check")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)

    p = sub.add_parser("overshoot", help="first-passage overshoot law")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--level", type=float, default=-1.0)

    p = sub.add_parser("martingale", help="transform-weight invariance")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("kernel", help="conditioned transition kernel")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--bins", type=str, required=True,
                   help="lo,hi,count")

    p = sub.add_parser("ck-check", help="Chapman-Kolmogorov consistency")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--bins", type=str, required=True)

    p = sub.add_parser("exp-cond", help="exponential-clock conditioning")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--q", type=str, required=True, help="scalar or comma grid")
    p.add_argument("--a", type=float, required=True, help="event lower edge")
    p.add_argument("--b", type=float, required=True, help="event upper edge")

    p = sub.add_parser("time-cond", help="fixed-time conditioning (alpha<1)")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=str, required=True, help="scalar or comma grid")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("tail-exponent", help="survival tail exponent fit")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--s-grid", type=str, required=True)

    p = sub.add_parser("profile", help="spatial profile ratios")
    _add_common(p)
    p.add_argument("--xs", type=str, required=True, help="comma list")
    p.add_argument("--q", type=float, required=True)

    p = sub.add_parser("bound", help="clock-survival upper bound")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--q-grid", type=str, required=True)

    p = sub.add_parser("cancellation", help="cross-interval stratum decay")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--q-grid", type=str, required=True)

    p = sub.add_parser("drift", help="conditioned-path drift")
    _add_common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t-grid", type=str, required=True)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--draws", type=int, default=50)

    p = sub.add_parser("reduce", help="affine reduction of [a,b] to [-1,1]")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("self-check", help="acceptance suite at reduced n")
    p.add_argument("--scale", type=float, default=0.05,
                   help="replicate-count multiplier; statistical criteria "
                        "with fixed percentage tolerances need scale near 1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--only", type=str, default=None,
                   help="comma list of criterion numbers, e.g. 1,9,12")

    return ap


def reduce_general_interval(a: float, b: float, x: float) -> tuple[float, float, float]:
    """Affine map parameters sending [a, b] to [-1, 1] and x to x_std.

    Returns (x_std, scale, shift) with x = scale * x_std + shift exactly.
    """
    if a >= b:
        raise DomainError("need a < b")
    if a <= x <= b:
        raise DomainError(f"x={x} lies inside [{a}, {b}]")
    scale = (b - a) / 2.0
    shift = (a + b) / 2.0
    return (2.0 * x - (a + b)) / (b - a), scale, shift


def _coerce(val: str):
    for cast in (int, float):
        try:
            return cast(val)
        except ValueError:
            continue
    if val.lower() in ("true", "false"):
        return val.lower() == "true"
    return val


def _apply_config_file(args: argparse.Namespace):
    """Fill unset flags from a flat key=value file; flags win."""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, val = line.split("=", 1)
                key = key.strip().replace("-", "_")
                if hasattr(args, key) and args.__dict__.get(key) is None:
                    args.__dict__[key] = _coerce(val.strip())


def _cfg_from(args) -> PathConfig:
    return PathConfig(
        dt=args.dt,
        horizon=args.horizon,
        eps=args.eps,
        refine_levels=args.refine_levels,
        dt_cap=args.dt_cap,
    )


def _base_record(args, **kw) -> ResultRecord:
    merged = dict(
        quantity="", value=None, stderr=None, n=getattr(args, "n", None),
        alpha=getattr(args, "alpha", None), x0=getattr(args, "x0", None),
        t=getattr(args, "t", None), s=None, q=None,
        dt=getattr(args, "dt", None), eps=getattr(args, "eps", None),
        seed=args.seed, notes="",
    )
    merged.update(kw)
    return ResultRecord(**merged)


def _run_command(args) -> list[ResultRecord]:
    records: list[ResultRecord] = []
    cmd = args.command
    if cmd == "reduce":
        x_std, scale, shift = reduce_general_interval(args.a, args.b, args.x)
        return [
            ResultRecord("x_std", x_std, 0.0, None, None, args.x, None, None,
                         None, None, None, 0, f"scale={scale!r};shift={shift!r}"),
        ]

    params = make_params(args.alpha)
    cfg = _cfg_from(args)
    rng = RngStream(args.seed)

    if cmd == "verify-h":
        h = h_subordinator(args.alpha, args.x0)
        records.append(_base_record(args, quantity="h_closed_form", value=h,
                                    stderr=0.0, n=None))
        res = first_passage_sample(params, args.x0, -1.0, cfg, args.n, rng)
        p = float((res.overshoot > 2.0).mean())
        se = math.sqrt(max(p * (1 - p), 0.0) / args.n)
        records.append(_base_record(
            args, quantity="mc_never_hit", value=p, stderr=se,
            notes=f"drift_crossed_frac={res.drift_crossed.mean()!r}",
        ))
    elif cmd == "overshoot":
        res = first_passage_sample(params, args.x0, args.level, cfg, args.n, rng)
        p = float((res.overshoot > 2.0).mean())
        se = math.sqrt(max(p * (1 - p), 0.0) / args.n)
        records.append(_base_record(args, quantity="p_overshoot_gt_2",
                                    value=p, stderr=se))
        from scipy.stats import kstest

        ks = kstest(
            res.overshoot, overshoot_cdf(args.alpha, args.level - args.x0)
        ).statistic
        records.append(_base_record(
            args, quantity="overshoot_ks", value=float(ks), stderr=0.0,
            notes=f"drift_crossed_frac={res.drift_crossed.mean()!r}",
        ))
    elif cmd == "martingale":
        est = weighted_expectation(
            params, args.x0, args.t, EventSpec.full(args.t), cfg, args.n, rng
        )
        records.append(_base_record(args, quantity="martingale_ratio",
                                    value=est.value, stderr=est.stderr))
    elif cmd == "kernel":
        lo, hi, count = _parse_grid(args.bins)
        est = transition_kernel_estimate(
            params, args.x0, args.t, (lo, hi, int(count)), cfg, args.n, rng
        )
        for i in range(est.masses.size):
            records.append(_base_record(
                args, quantity=f"kernel_mass[{est.bin_edges[i]!r},{est.bin_edges[i+1]!r})",
                value=float(est.masses[i]), stderr=float(est.stderrs[i]),
            ))
        records.append(_base_record(args, quantity="kernel_total_mass",
                                    value=est.total_mass, stderr=None))
    elif cmd == "ck-check":
        lo, hi, count = _parse_grid(args.bins)
        res = chapman_kolmogorov_check(
            params, args.x0, args.s, args.t, (lo, hi, int(count)), cfg,
            args.n, rng,
        )
        records.append(_base_record(args, quantity="ck_discrepancy",
                                    value=res.discrepancy, stderr=None,
                                    s=args.s))
        records.append(_base_record(
            args, quantity="ck_bound", value=res.bound, stderr=None, s=args.s,
            notes=(f"mc={res.mc_term!r};binning={res.binning_term!r};"
                   f"escape={res.escape_term!r}"),
        ))
    elif cmd == "exp-cond":
        event = EventSpec.endpoint_in(args.t, args.a, args.b)
        ref = weighted_expectation(params, args.x0, args.t, event, cfg,
                                   args.n, rng.substream(999))
        records.append(_base_record(args, quantity="weighted_expectation",
                                    value=ref.value, stderr=ref.stderr))
        for q in _parse_grid(args.q):
            est = exp_conditioning_estimate(
                params, args.x0, args.t, q, event, cfg, args.n, rng.substream(
                    int(-math.log10(q) * 1000)
                )
            )
            records.append(_base_record(
                args, quantity="exp_conditioning", value=est.value,
                stderr=est.stderr, q=q, n=est.n,
                notes=f"accept_rate={est.n / args.n!r}",
            ))
    elif cmd == "time-cond":
        event = EventSpec.endpoint_in(args.t, args.a, args.b)
        for s in _parse_grid(args.s):
            est = time_conditioning_estimate(
                params, args.x0, s, event, cfg, args.n,
                rng.substream(int(s * 1000)),
            )
            records.append(_base_record(
                args, quantity="time_conditioning", value=est.value,
                stderr=est.stderr, s=s, n=est.n,
            ))
    elif cmd == "tail-exponent":
        fit = survival_tail_exponent(
            params, args.x0, _parse_grid(args.s_grid), cfg, args.n, rng
        )
        records.append(_base_record(
            args, quantity="tail_exponent", value=fit.exponent, stderr=None,
            notes=f"r_squared={fit.r_squared!r};intercept={fit.intercept!r}",
        ))
        for s, p, se in fit.grid:
            records.append(_base_record(args, quantity="survival",
                                        value=p, stderr=se, s=s))
    elif cmd == "profile":
        pts = profile_ratio_check(
            params, _parse_grid(args.xs), args.q, cfg, args.n, rng
        )
        for pt in pts:
            records.append(_base_record(
                args, quantity="profile_ratio", value=pt.ratio,
                stderr=pt.stderr, x0=pt.x, q=args.q,
                notes=f"predicted={pt.predicted!r}",
            ))
    elif cmd == "bound":
        pts = upper_bound_check(
            params, args.x0, _parse_grid(args.q_grid), cfg, args.n, rng
        )
        for pt in pts:
            records.append(_base_record(
                args, quantity="clock_survival_lhs", value=pt.lhs_estimate,
                stderr=pt.lhs_stderr, q=pt.q,
                notes=f"rhs_bound={pt.rhs_bound!r}",
            ))
    elif cmd == "cancellation":
        fit = cancellation_rate(
            params, args.x0, args.t, _parse_grid(args.q_grid), cfg, args.n, rng
        )
        records.append(_base_record(
            args, quantity="cancellation_exponent", value=fit.exponent,
            stderr=None, notes=f"r_squared={fit.r_squared!r}",
        ))
        for q, mass, se in fit.grid:
            records.append(_base_record(args, quantity="stratum_mass",
                                        value=mass, stderr=se, q=q))
    elif cmd == "drift":
        for ti in _parse_grid(args.t_grid):
            ends = []
            for d in range(args.draws):
                path = sample_conditioned_path(
                    params, args.x0, ti, cfg, args.m,
                    rng.substream(int(ti * 1000) + 7919 * d),
                )
                ends.append(path.values[-1])
            ends = np.array(ends)
            records.append(_base_record(
                args, quantity="conditioned_median_endpoint",
                value=float(np.median(ends)),
                stderr=float(ends.std(ddof=1) / math.sqrt(ends.size)),
                t=ti, n=args.draws,
            ))
    else:
        raise DomainError(f"unknown command {cmd}")
    return records


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _apply_config_file(args)
    if getattr(args, "workers", None) is not None:
        os.environ[WORKERS_ENV] = str(args.workers)
    t0 = time.time()
    try:
        if args.command == "self-check":
            from .acceptance import ALL_CRITERIA, run_all

            if args.only:
                wanted = {int(tok) for tok in args.only.split(",")}
                results = []
                for idx in sorted(wanted):
                    results.extend(ALL_CRITERIA[idx - 1](args.scale, args.seed))
            else:
                results = run_all(scale=args.scale, seed=args.seed)
            hard_fail = False
            for r in results:
                status = "PASS" if r.passed else (
                    "XFAIL" if r.expected_fail else "FAIL"
                )
                print(f"[{status}] {r.name}: {r.detail}")
                hard_fail |= (not r.passed and not r.expected_fail)
            print(f"self-check wall time {time.time() - t0:.1f}s",
                  file=sys.stderr)
            return 5 if hard_fail else 0
        records = _run_command(args)
    except DegenerateConditioningError as exc:
        print(f"degenerate conditioning: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    write_records(records, args.out, args.format)
    print(f"wall time {time.time() - t0:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
