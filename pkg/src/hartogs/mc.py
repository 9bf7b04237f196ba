"""Deterministic chunked Monte-Carlo driver.

Samples are partitioned into fixed-size chunks; chunk i draws from
default_rng([seed, i]). Chunk partial sums are reduced in index order, so the
estimate is bit-identical for any worker count and any chunk execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Tuple

import numpy as np

SampleFn = Callable[[np.random.Generator, int], np.ndarray]


def chunk_layout(total: int, chunk_size: int) -> list[tuple[int, int]]:
    """(chunk index, samples in chunk) pairs covering `total` samples."""
    if total < 0:
        raise ValueError("sample count must be non-negative")
    out = []
    idx = 0
    remaining = total
    while remaining > 0:
        take = min(chunk_size, remaining)
        out.append((idx, take))
        idx += 1
        remaining -= take
    return out


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def mc_mean(values: SampleFn, total: int, seed: int,
            chunk_size: int = 1 << 15, workers: int = 1) -> Tuple[complex, float]:
    """Mean and standard error of `values(rng, count)` over `total` samples.

    `values` must return one value per sample (complex or real). The standard
    error is sqrt(Var/N) with Var the usual unbiased sample variance
    (E|x - mean|^2 for complex values).
    """
    layout = chunk_layout(total, chunk_size)
    if not layout:
        raise ValueError("mc_mean needs at least one sample")

    def partial(item):
        idx, count = item
        vals = np.asarray(values(chunk_rng(seed, idx), count))
        return complex(vals.sum()), float(np.sum(np.abs(vals) ** 2)), count

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(partial, layout))
    else:
        partials = [partial(item) for item in layout]

    s = sum(p[0] for p in partials)
    s2 = math.fsum(p[1] for p in partials)
    n = sum(p[2] for p in partials)
    mean = s / n
    var = max(s2 - n * abs(mean) ** 2, 0.0) / (n - 1) if n > 1 else 0.0
    stderr = math.sqrt(var / n)
    if mean.imag == 0.0:
        return mean.real, stderr
    return mean, stderr
