"""Acceptance criteria as runnable checks.

Each criterion is a function returning per-subcheck results with pinned
tolerances.  ``scale`` multiplies replicate counts only (tolerances that
depend on reported standard errors widen automatically at smaller n); the
full-size run uses scale=1.

Two subchecks are mathematically unattainable as stated and are marked
``expected_fail`` with the analytic deviation recorded:

* the h limit checks at alpha=0.8 (|x|=1e6 end: the true gap is
  sin(0.8 pi)/pi * (2e-6)^0.2 / 0.2 = 6.8e-2 > 1e-3) and alpha=0.3
  (x=-1-1e-8 end: true gap 2.8e-3 > 1e-3); the 1e-3 tolerance holds only
  for alpha near 1/2 at those fixed evaluation points;
* the survival-law fits on the pinned grids: at x0=-2 the asymptotic
  regime of P(s < T) starts near s ~ 10^3, so the weighted fit on
  s in [1, 100] gives an exponent near -0.25 (target -1/3 +- 0.05) and
  q^(1/alpha-1) P(e_q < T) still drifts ~20% per decade across
  q in [1e-3, 1e-1].  Both limits are verified on asymptotic grids in the
  regular test suite instead.
"""

from __future__ import annotations

import io
import math
import time
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import kstest, ks_2samp

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
    transition_kernel_estimate,
    weighted_expectation,
)
from .core import make_params, sample_increments
from .mc import ks_critical
from .paths import PathConfig, first_passage_sample
from .rng import RngStream
from .specfun import h_subordinator, overshoot_cdf, overshoot_tail


@dataclass
class CriterionResult:
    """One subcheck outcome.

    ``expected_fail`` marks subchecks documented as unattainable as stated;
    ``strict`` distinguishes analytic impossibilities (always fail, asserted
    so) from statistically miscalibrated bands that pass or fail by seed.
    """

    name: str
    passed: bool
    detail: str
    expected_fail: bool = False
    strict: bool = True
    elapsed: float = field(default=0.0)


def _n(base: int, scale: float) -> int:
    return max(int(base * scale), 2_000)


def _eps_bias_allowance(alpha: float, d: float, z: float, eps: float) -> float:
    """Documented bias budget of the jump-cutoff scheme for P(overshoot > z).

    The cutoff distorts the pre-crossing gap by about eps * alpha/(1-alpha);
    multiplied by the overshoot density at z and a safety factor of 4.
    """
    dens = (
        math.sin(math.pi * alpha)
        / math.pi
        * (z / d) ** (-alpha)
        / (1.0 + z / d)
        / d
    )
    return 4.0 * dens * eps * alpha / (1.0 - alpha)


def criterion_1_closed_form_h(scale: float, seed: int) -> list[CriterionResult]:
    t0 = time.time()
    out = []
    val = h_subordinator(0.5, -3.0)
    ok = abs(val - 0.5) <= 1e-10
    out.append(
        CriterionResult(
            "C1 h(0.5,-3) = 0.5 to 1e-10",
            ok,
            f"h={val!r}, |dev|={abs(val - 0.5):.2e}",
        )
    )
    for alpha in (0.3, 0.5, 0.8):
        far = h_subordinator(alpha, -1e6)
        dev = abs(far - 1.0)
        out.append(
            CriterionResult(
                f"C1 h({alpha}, -1e6) -> 1 within 1e-3",
                dev <= 1e-3,
                f"|h-1|={dev:.3e}",
                expected_fail=(alpha == 0.8),
            )
        )
        near = h_subordinator(alpha, -1.0 - 1e-8)
        out.append(
            CriterionResult(
                f"C1 h({alpha}, -1-1e-8) -> 0 within 1e-3",
                near <= 1e-3,
                f"h={near:.3e}",
                expected_fail=(alpha == 0.3),
            )
        )
    elapsed = time.time() - t0
    out.append(
        CriterionResult("C1 runtime < 1 s", elapsed < 1.0, f"{elapsed:.3f}s")
    )
    for r in out:
        r.elapsed = elapsed
    return out


def criterion_2_overshoot_law(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    n = _n(100_000, scale)
    cfg = PathConfig(dt=1e-3, horizon=100.0, eps=1e-4, refine_levels=4)
    crit = ks_critical(n, 0.01)
    for i, alpha in enumerate((0.3, 0.5, 0.8)):
        params = make_params(alpha)
        for j, x0 in enumerate((-1.5, -3.0, -10.0)):
            t0 = time.time()
            rng = RngStream(seed, 200 + 10 * i + j)
            res = first_passage_sample(params, x0, -1.0, cfg, n, rng)
            d = -1.0 - x0
            p = float((res.overshoot > 2.0).mean())
            se = math.sqrt(max(p * (1.0 - p), 1e-12) / n)
            h = h_subordinator(alpha, x0)
            allow = 3.0 * se + _eps_bias_allowance(alpha, d, 2.0, cfg.eps)
            elapsed = time.time() - t0
            out.append(
                CriterionResult(
                    f"C2 P(overshoot>2) vs h, alpha={alpha}, x0={x0}",
                    abs(p - h) <= allow,
                    f"mc={p:.4f}, h={h:.4f}, allow={allow:.4f}",
                    elapsed=elapsed,
                )
            )
            ks = kstest(res.overshoot, overshoot_cdf(alpha, d)).statistic
            out.append(
                CriterionResult(
                    f"C2 overshoot KS, alpha={alpha}, x0={x0}",
                    ks < crit,
                    f"KS={ks:.5f}, crit={crit:.5f}, "
                    f"floor_frac={res.drift_crossed.mean():.1e}",
                    elapsed=elapsed,
                )
            )
            out.append(
                CriterionResult(
                    f"C2 runtime alpha={alpha}, x0={x0} < 120 s",
                    elapsed < 120.0,
                    f"{elapsed:.1f}s",
                )
            )
    return out


MARTINGALE_ALLOWANCE = 0.02


def criterion_3_martingale(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    n = _n(100_000, scale)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4)
    k = 0
    for alpha in (1.2, 1.5, 1.8):
        params = make_params(alpha)
        for x0 in (1.5, 2.0, -2.0, -3.0):
            for t in (0.1, 0.5):
                t0 = time.time()
                rng = RngStream(seed, 300 + k)
                k += 1
                est = weighted_expectation(
                    params, x0, t, EventSpec.full(t), cfg, n, rng
                )
                allow = 3.0 * est.stderr + MARTINGALE_ALLOWANCE
                elapsed = time.time() - t0
                # at alpha=1.2 above the interval the weight has tail index
                # 1.2: the sample mean fluctuates at scale n^(-1/6) ~ 0.15
                # with strong left skew, so the pinned band fails with
                # probability ~1/4 for any correct sampler (see the ledger);
                # reported, not asserted
                fragile = alpha == 1.2 and x0 > 1.0
                out.append(
                    CriterionResult(
                        f"C3 invariance alpha={alpha}, x0={x0}, t={t}",
                        abs(est.value - 1.0) <= allow,
                        f"est={est.value:.4f}+-{est.stderr:.4f}, "
                        f"allow={allow:.4f}"
                        + ("; heavy-tail band, see ledger" if fragile else ""),
                        expected_fail=fragile,
                        strict=False if fragile else True,
                        elapsed=elapsed,
                    )
                )
                out.append(
                    CriterionResult(
                        f"C3 runtime alpha={alpha}, x0={x0}, t={t} < 300 s",
                        elapsed < 300.0,
                        f"{elapsed:.1f}s",
                    )
                )
    # the discretization budget must not grow when dt is halved
    params = make_params(1.5)
    n2 = _n(400_000, scale)
    devs = {}
    for dt in (2e-3, 1e-3):
        cfg2 = PathConfig(dt=dt, horizon=10.0, eps=1e-4, refine_levels=4)
        est = weighted_expectation(
            params, 1.5, 0.5, EventSpec.full(0.5), cfg2, n2,
            RngStream(seed, 390 + int(dt * 1e6)),
        )
        devs[dt] = (abs(est.value - 1.0), est.stderr)
    noise = 3.0 * math.sqrt(devs[2e-3][1] ** 2 + devs[1e-3][1] ** 2)
    out.append(
        CriterionResult(
            "C3 allowance shrinks when dt halves (within noise)",
            devs[1e-3][0] <= devs[2e-3][0] + noise,
            f"|dev|(2e-3)={devs[2e-3][0]:.4f}, |dev|(1e-3)={devs[1e-3][0]:.4f}, "
            f"noise={noise:.4f}",
        )
    )
    return out


def criterion_4_lemma_exponents(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    t0 = time.time()
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=100.0, eps=1e-4, refine_levels=4, dt_cap=2.0)
    n = _n(1_000_000, scale)
    fit = survival_tail_exponent(
        params, -2.0, [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0], cfg, n,
        RngStream(seed, 400),
    )
    target = 1.0 / 1.5 - 1.0
    out.append(
        CriterionResult(
            "C4 s-exponent in -1/3 +- 0.05, r2 >= 0.98 on s in [1,100]",
            abs(fit.exponent - target) <= 0.05 and fit.r_squared >= 0.98,
            f"exponent={fit.exponent:.4f} (target {target:.4f}), "
            f"r2={fit.r_squared:.4f}; preasymptotic range, see ledger",
            expected_fail=True,
        )
    )
    nq = _n(200_000, scale)
    scaled = {}
    for i, q in enumerate((1e-1, 1e-2, 1e-3)):
        est = eq_survival(params, -2.0, q, cfg, nq, RngStream(seed, 410 + i))
        scaled[q] = q ** (1.0 / 1.5 - 1.0) * est.value
    spread = max(scaled.values()) / min(scaled.values()) - 1.0
    out.append(
        CriterionResult(
            "C4 q^(1/alpha-1) P(e_q<T) constant within 10% on q in [1e-3,1e-1]",
            spread <= 0.10,
            f"scaled={ {k: round(v, 4) for k, v in scaled.items()} }, "
            f"spread={spread:.1%}; preasymptotic range, see ledger",
            expected_fail=True,
        )
    )
    elapsed = time.time() - t0
    out.append(
        CriterionResult("C4 runtime < 10 min", elapsed < 600.0, f"{elapsed:.0f}s")
    )
    return out


def criterion_5_profile(scale: float, seed: int) -> list[CriterionResult]:
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=100.0, eps=1e-4, refine_levels=4, dt_cap=2.0)
    n = _n(1_000_000, scale)
    t0 = time.time()
    pts = profile_ratio_check(
        params, [-2.0, -3.0, -5.0], 1e-3, cfg, n, RngStream(seed, 500)
    )
    elapsed = time.time() - t0
    out = []
    for pt in pts[1:]:
        rel = abs(pt.ratio / pt.predicted - 1.0)
        out.append(
            CriterionResult(
                f"C5 profile ratio x0={pt.x} within 5%",
                rel <= 0.05,
                f"ratio={pt.ratio:.4f}, predicted={pt.predicted:.4f}, "
                f"rel={rel:.2%}",
                elapsed=elapsed,
            )
        )
    return out


def criterion_6_theorem2(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4, dt_cap=1.0)
    t = 0.25
    # events sit away from the barrier with moderate mass: the residual
    # cross-stratum dilution at q=1e-3 (~0.4% of the event mass, the same
    # leakage criterion 7 measures) must stay inside the 3-sigma band
    cases = [
        (2.0, EventSpec.endpoint_in(t, 2.0, 5.0)),
        (-2.0, EventSpec.endpoint_in(t, -4.0, -2.5)),
    ]
    qs = (1e-1, 1e-2, 1e-3)
    n_by_q = {1e-1: _n(200_000, scale), 1e-2: _n(400_000, scale),
              1e-3: _n(1_200_000, scale)}
    for ci, (x0, event) in enumerate(cases):
        ref = weighted_expectation(
            params, x0, t, event, cfg, _n(400_000, scale),
            RngStream(seed, 600 + ci),
        )
        diffs = {}
        sigmas = {}
        for qi, q in enumerate(qs):
            est = exp_conditioning_estimate(
                params, x0, t, q, event, cfg, n_by_q[q],
                RngStream(seed, 610 + 10 * ci + qi),
            )
            diffs[q] = abs(est.value - ref.value)
            sigmas[q] = math.sqrt(est.stderr ** 2 + ref.stderr ** 2)
        mono = True
        for qa, qb in ((1e-1, 1e-2), (1e-2, 1e-3)):
            noise = 3.0 * math.sqrt(sigmas[qa] ** 2 + sigmas[qb] ** 2)
            mono &= diffs[qb] <= diffs[qa] + noise
        out.append(
            CriterionResult(
                f"C6 |exp-cond - weighted| decreases along q, x0={x0}",
                mono,
                f"diffs={ {k: round(v, 4) for k, v in diffs.items()} }",
            )
        )
        out.append(
            CriterionResult(
                f"C6 agreement at q=1e-3 within 3 sigma, x0={x0}",
                diffs[1e-3] <= 3.0 * sigmas[1e-3],
                f"diff={diffs[1e-3]:.4f}, 3sigma={3.0 * sigmas[1e-3]:.4f}, "
                f"ref={ref.value:.4f}",
            )
        )
    return out


def criterion_7_cancellation(scale: float, seed: int) -> list[CriterionResult]:
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4, dt_cap=2.0)
    n = _n(1_000_000, scale)
    # the stratum rate is a q -> 0 limit; probe the small-q decade where the
    # clock race has left its transient (see the survival-law note above)
    q_grid = [10 ** -2.5, 1e-3, 10 ** -3.5, 1e-4]
    fit = cancellation_rate(
        params, -2.0, 0.25, q_grid, cfg, n, RngStream(seed, 700)
    )
    target = 2.0 / 1.5 - 1.0
    out = [
        CriterionResult(
            "C7 stratum q-exponent within 1/3 +- 0.1",
            abs(fit.exponent - target) <= 0.1,
            f"exponent={fit.exponent:.4f} (target {target:.4f})",
        )
    ]
    masses = [g[1] for g in fit.grid]
    ses = [g[2] for g in fit.grid]
    mono = True
    for i in range(len(masses) - 1):
        # grid is ordered by decreasing q; mass must decrease with q
        noise = 3.0 * math.sqrt(ses[i] ** 2 + ses[i + 1] ** 2)
        mono &= masses[i + 1] <= masses[i] + noise
    out.append(
        CriterionResult(
            "C7 stratum mass monotone decreasing in q within MC error",
            mono,
            f"masses={[round(m, 5) for m in masses]}",
        )
    )
    return out


def criterion_8_chapman_kolmogorov(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4)
    n = _n(100_000, scale)
    for ci, (x0, bins) in enumerate(
        ((2.0, (1.0, 10.0, 40)), (-2.0, (-10.0, -1.0, 40)))
    ):
        t0 = time.time()
        res = chapman_kolmogorov_check(
            params, x0, 0.25, 0.25, bins, cfg, n, RngStream(seed, 800 + ci)
        )
        out.append(
            CriterionResult(
                f"C8 CK discrepancy below reported bound, x0={x0}",
                res.discrepancy <= res.bound,
                f"discrepancy={res.discrepancy:.4f}, bound={res.bound:.4f} "
                f"(mc={res.mc_term:.4f}, bin={res.binning_term:.4f}, "
                f"escape={res.escape_term:.4f})",
                elapsed=time.time() - t0,
            )
        )
    return out


def criterion_9_structural_zeros(scale: float, seed: int) -> list[CriterionResult]:
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4)
    n = _n(20_000, scale)
    out = []
    for ci, (x0, bins) in enumerate(
        ((2.0, (-10.0, -1.0, 20)), (-2.0, (1.0, 10.0, 20)))
    ):
        est = transition_kernel_estimate(
            params, x0, 0.5, bins, cfg, n, RngStream(seed, 900 + ci)
        )
        zero = bool(np.all(est.masses == 0.0))
        out.append(
            CriterionResult(
                f"C9 opposite-side kernel mass exactly zero, x0={x0}",
                zero,
                f"max mass={est.masses.max()!r}",
            )
        )
    return out


def criterion_10_upper_bound(scale: float, seed: int) -> list[CriterionResult]:
    params = make_params(1.5)
    cfg = PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4, dt_cap=1.0)
    n = _n(100_000, scale)
    out = []
    for ci, x0 in enumerate((1.5, 2.0, 4.0)):
        pts = upper_bound_check(
            params, x0, [1e-1, 1e-2, 1e-3], cfg, n, RngStream(seed, 1000 + ci)
        )
        ok = all(
            pt.lhs_estimate <= pt.rhs_bound + 3.0 * pt.lhs_stderr for pt in pts
        )
        detail = "; ".join(
            f"q={pt.q:g}: lhs={pt.lhs_estimate:.5f} rhs={pt.rhs_bound:.5f}"
            for pt in pts
        )
        out.append(
            CriterionResult(f"C10 clock-survival bound, x0={x0}", ok, detail)
        )
    return out


def criterion_11_scaling(scale: float, seed: int) -> list[CriterionResult]:
    out = []
    n = _n(100_000, scale)
    for ri, alpha in enumerate((0.5, 1.5)):
        params = make_params(alpha)
        for ci, c in enumerate((0.5, 2.0)):
            rng_a = RngStream(seed, 1100 + 10 * ri + ci)
            rng_b = RngStream(seed, 1150 + 10 * ri + ci)
            a = c * sample_increments(params, c ** -alpha, n, rng_a)
            b = sample_increments(params, 1.0, n, rng_b)
            ks = ks_2samp(a, b).statistic
            crit = ks_critical(n, 0.01, n)
            out.append(
                CriterionResult(
                    f"C11 scaling KS, alpha={alpha}, c={c}",
                    ks < crit,
                    f"KS={ks:.5f}, crit={crit:.5f}",
                )
            )
    return out


def criterion_12_determinism(scale: float, seed: int) -> list[CriterionResult]:
    import os
    import tempfile

    from .cli import main as cli_main
    from .mc import WORKERS_ENV

    out = []
    with tempfile.TemporaryDirectory() as tmp:
        paths = [os.path.join(tmp, f"run{i}.csv") for i in range(3)]
        argv = [
            "martingale", "--alpha", "1.5", "--x0", "2", "--t", "0.1",
            "--n", "20000", "--seed", str(seed), "--format", "csv",
        ]
        worker_env = os.environ.get(WORKERS_ENV)
        buf = io.StringIO()
        with redirect_stdout(buf), redirect_stderr(buf):
            cli_main(argv + ["--out", paths[0], "--workers", "1"])
            cli_main(argv + ["--out", paths[1], "--workers", "1"])
            cli_main(argv + ["--out", paths[2], "--workers", "2"])
        if worker_env is None:
            os.environ.pop(WORKERS_ENV, None)
        else:
            os.environ[WORKERS_ENV] = worker_env
        blobs = [open(p, "rb").read() for p in paths]
        out.append(
            CriterionResult(
                "C12 identical bytes on rerun with the same seed",
                blobs[0] == blobs[1],
                f"{len(blobs[0])} bytes",
            )
        )
        out.append(
            CriterionResult(
                "C12 identical bytes for 1 vs 2 workers",
                blobs[0] == blobs[2],
                f"{len(blobs[2])} bytes",
            )
        )
    return out


ALL_CRITERIA = [
    criterion_1_closed_form_h,
    criterion_2_overshoot_law,
    criterion_3_martingale,
    criterion_4_lemma_exponents,
    criterion_5_profile,
    criterion_6_theorem2,
    criterion_7_cancellation,
    criterion_8_chapman_kolmogorov,
    criterion_9_structural_zeros,
    criterion_10_upper_bound,
    criterion_11_scaling,
    criterion_12_determinism,
]


def run_all(scale: float = 1.0, seed: int = 0) -> list[CriterionResult]:
    results = []
    for crit in ALL_CRITERIA:
        results.extend(crit(scale, seed))
    return results
