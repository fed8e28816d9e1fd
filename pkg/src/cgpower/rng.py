"""Seeded random streams.

Every stochastic routine takes an integer ``seed``. Independent streams for
chunks or workers are derived from the pair ``(seed, stream)`` through
:class:`numpy.random.SeedSequence`, so ``(seed, 0)`` and ``(seed + 1, 0)``
never collide with ``(seed, 1)``. The bit generator is PCG64 (64-bit).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

#: Samples per stream in chunked Monte-Carlo loops. Fixed, so results do not
#: depend on how chunks are distributed across workers.
CHUNK = 8192


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream)])))


def chunks(n_samples: int, chunk: int = CHUNK):
    """Yield ``(stream_index, size)`` pairs covering ``n_samples``."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    stream = 0
    left = n_samples
    while left > 0:
        size = min(chunk, left)
        yield stream, size
        left -= size
        stream += 1


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def within(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - target) <= n_sigma * self.std_error

    def as_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error,
                "n_samples": self.n_samples, "seed": self.seed}


def mc_mean(sample_fn: Callable[[np.random.Generator, int], np.ndarray],
            n_samples: int, seed: int, workers: int = 1) -> MonteCarloEstimate:
    """Mean and standard error of ``sample_fn`` draws.

    ``sample_fn(rng, size)`` returns ``size`` per-sample values. Chunk ``k``
    always uses stream ``k``, so the result is the same for any ``workers``.
    """
    parts = list(chunks(n_samples))

    def run(part):
        stream, size = part
        return np.asarray(sample_fn(make_rng(seed, stream), size), dtype=float)

    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(run, parts))
    else:
        values = [run(p) for p in parts]
    x = np.concatenate(values)
    se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return MonteCarloEstimate(float(x.mean()), se, int(n_samples), int(seed))


def haar_states(rng: np.random.Generator, size: int, d: int) -> np.ndarray:
    """``size`` Haar-random unit vectors in C^d (normalised complex Gaussians)."""
    z = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
