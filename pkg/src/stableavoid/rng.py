"""Counter-based random streams for reproducible parallel Monte Carlo.

Streams are keyed by a ``(seed, stream_index)`` pair fed directly into the
128-bit Philox key, so any two distinct pairs give statistically independent
sequences and identical pairs reproduce bit-identical draws regardless of
what other streams exist or in which order they are consumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _mix(a: int, b: int) -> int:
    """Deterministic 64-bit mix of a stream index and a child index."""
    return _splitmix64((_splitmix64(a) ^ ((b + 1) * _GOLDEN)) & _MASK64)


@dataclass
class RngStream:
    """A named position in the Philox key space.

    The generator is created lazily and advances with use, so a given
    (seed, stream_index, call sequence) always reproduces the same draws.
    """

    seed: int
    stream_index: int = 0
    _gen: np.random.Generator | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array(
                [self.seed & _MASK64, self.stream_index & _MASK64],
                dtype=np.uint64,
            )
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def __getstate__(self):
        # generators do not cross process boundaries; recreated lazily
        return {"seed": self.seed, "stream_index": self.stream_index}

    def __setstate__(self, state):
        self.seed = state["seed"]
        self.stream_index = state["stream_index"]
        self._gen = None

    def substream(self, k: int) -> "RngStream":
        """Child stream k; distinct (stream_index, k) map to distinct keys."""
        return RngStream(self.seed, _mix(self.stream_index & _MASK64, k))

    def split(self, n: int) -> list["RngStream"]:
        return [self.substream(k) for k in range(n)]

    def provenance(self) -> tuple[int, int]:
        return (self.seed, self.stream_index)
