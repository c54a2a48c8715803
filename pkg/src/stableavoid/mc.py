"""Monte Carlo plumbing: estimates, deterministic batching, worker pool.

Work is split into fixed-size batches, one substream per batch, and results
are merged in batch order.  The partition and the reduction order depend only
on (n, batch_size), never on the worker count, so output is bit-identical
for any parallelism level.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

WORKERS_ENV = "STABLEAVOID_WORKERS"
DEFAULT_BATCH = 50_000


@dataclass(frozen=True)
class MCEstimate:
    """Point estimate with its standard error and seed provenance."""

    value: float
    stderr: float
    n: int
    seed: tuple[int, int]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("an estimate needs at least one replicate")
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")


def estimate_from_samples(values: np.ndarray, rng: RngStream) -> MCEstimate:
    """Sample mean with stderr = sample standard deviation / sqrt(n)."""
    n = values.size
    sd = float(values.std(ddof=1)) if n > 1 else 0.0
    return MCEstimate(
        value=float(values.mean()),
        stderr=sd / math.sqrt(n),
        n=n,
        seed=rng.provenance(),
    )


def binomial_estimate(k: int, n: int, rng: RngStream) -> MCEstimate:
    p = k / n
    return MCEstimate(
        value=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n),
        n=n,
        seed=rng.provenance(),
    )


def worker_count() -> int:
    try:
        w = int(os.environ.get(WORKERS_ENV, "1"))
    except ValueError:
        w = 1
    return max(w, 1)


def _call(task):
    fn, args, batch_n, stream = task
    return fn(*args, batch_n, stream)


def run_batched(fn, args: tuple, n: int, rng: RngStream,
                batch_size: int = DEFAULT_BATCH) -> list:
    """Run ``fn(*args, batch_n, stream)`` over fixed-size batches of n.

    Returns per-batch results in batch order.  ``fn`` must be picklable
    (module level) when more than one worker is configured.
    """
    sizes = [batch_size] * (n // batch_size)
    if n % batch_size:
        sizes.append(n % batch_size)
    tasks = [
        (fn, args, size, rng.substream(i)) for i, size in enumerate(sizes)
    ]
    workers = worker_count()
    if workers == 1 or len(tasks) == 1:
        return [_call(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, tasks))


def gather(batches: list, field: int | None = None) -> np.ndarray:
    """Concatenate per-batch arrays (or one tuple field of them) in order."""
    if field is None:
        return np.concatenate(batches)
    return np.concatenate([b[field] for b in batches])


def ks_critical(n: int, level: float = 0.01, m: int | None = None) -> float:
    """Asymptotic Kolmogorov-Smirnov critical value at the given level.

    One-sample for m=None, else two-sample with sizes n and m.
    """
    c = math.sqrt(-math.log(level / 2.0) / 2.0)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))
