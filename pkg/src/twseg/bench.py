"""Wall-clock scaling measurements for the segmentation pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .refine import segment
from .synth import SynthSpec, generate

DEFAULT_SIZES = (500, 1000, 2000, 4000, 8000)


@dataclass(frozen=True)
class BenchResult:
    sizes: tuple[int, ...]
    seconds: tuple[float, ...]
    slope: float
    dims: int
    k: int

    def rows(self) -> list[tuple[int, float]]:
        return list(zip(self.sizes, self.seconds))


def fit_loglog_slope(sizes, seconds) -> float:
    """Least-squares slope of log(time) against log(n)."""
    return float(np.polyfit(np.log(np.asarray(sizes, dtype=float)),
                            np.log(np.asarray(seconds, dtype=float)), 1)[0])


def time_segmentation(n: int, dims: int, k: int, repeats: int, seed: int) -> float:
    """Best-of-repeats wall time for one synthetic video of ``n`` frames.

    Short runs are repeated more often (scaled so roughly the same wall time
    is spent per size) because single-digit-millisecond timings are dominated
    by scheduler noise otherwise.
    """
    seq, _ = generate(SynthSpec(k=k, n=n, d=dims, seed=seed))
    reps = max(repeats, repeats * 4000 // max(n, 1))
    best = np.inf
    for _ in range(reps):
        start = time.perf_counter()
        segment(seq, k)
        best = min(best, time.perf_counter() - start)
    return best


def run_scaling_benchmark(sizes=DEFAULT_SIZES, dims: int = 64, k: int = 2,
                          repeats: int = 3, seed: int = 0) -> BenchResult:
    # Warm up on the largest size: cold processes run noticeably slower for
    # the first moments, which would otherwise skew the small (early) sizes.
    time_segmentation(max(sizes), dims, k, repeats=1, seed=seed)
    seconds = tuple(time_segmentation(n, dims, k, repeats, seed) for n in sizes)
    return BenchResult(tuple(sizes), seconds, fit_loglog_slope(sizes, seconds), dims, k)
