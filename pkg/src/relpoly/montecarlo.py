"""Seeded Monte Carlo estimation of the failure probability.

The statistical fallback for instances too large for the exact sweep.
Cells are drawn independently (1 with probability q) from a counter-based
Philox generator, classified with the oracle's window detector, and the
failure frequency is reported with a 95% confidence interval.

Sampling is organized in fixed-size batches; batch i derives its stream
from (seed, i), and batch results merge by failure-count addition, so an
estimate depends only on (seed, samples, batch size), never on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import SystemShape
from .oracle import detect_failures

__all__ = ["DEFAULT_BATCH_SIZE", "McEstimate", "estimate_failure_probability"]

#: Samples per generator batch.  Part of the reproducibility contract:
#: changing it changes which stream each sample comes from.
DEFAULT_BATCH_SIZE = 1 << 14

#: Generator algorithm recorded in every estimate.
RNG_NAME = "philox4x64"

_Z_95 = 1.96


@dataclass(frozen=True)
class McEstimate:
    """A reproducible failure-probability estimate.

    ``ci95`` is the normal-approximation interval, replaced by the Wilson
    interval in the degenerate cases (no failures / all failures) where the
    normal width collapses to zero.  The seed and generator name are part
    of the record so any estimate can be regenerated.
    """

    shape: SystemShape
    q: float
    samples: int
    failures: int
    p_hat: float
    stderr: float
    ci95: tuple[float, float]
    seed: int
    rng: str = RNG_NAME


def _batch_generator(seed: int, batch_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(batch_index,))
    return np.random.Generator(np.random.Philox(ss))


def _count_batch(
    shape: SystemShape, q: float, seed: int, batch_index: int, size: int
) -> int:
    gen = _batch_generator(seed, batch_index)
    draws = gen.random((size, shape.volume))
    return int(detect_failures(shape, draws < q).sum())


def _wilson_interval(failures: int, samples: int) -> tuple[float, float]:
    z2 = _Z_95 * _Z_95
    p = failures / samples
    denom = 1.0 + z2 / samples
    center = (p + z2 / (2 * samples)) / denom
    half = (
        _Z_95
        * math.sqrt(p * (1 - p) / samples + z2 / (4 * samples * samples))
        / denom
    )
    # the Wilson interval contains the point estimate; keep that true under
    # floating-point rounding as well
    return max(0.0, min(p, center - half)), min(1.0, max(p, center + half))


def estimate_failure_probability(
    shape: SystemShape,
    q: float,
    samples: int,
    seed: int,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int | None = None,
) -> McEstimate:
    """Estimate P(q) from ``samples`` independent random configurations.

    Same (shape, q, samples, seed, batch_size) always yields the identical
    estimate.  ``workers=None`` reads RELPOLY_WORKERS and falls back to 1;
    the worker count never affects the result.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if samples < 1:
        raise ValueError(f"sample count must be positive, got {samples}")
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    if batch_size < 1:
        raise ValueError(f"batch size must be positive, got {batch_size}")
    if workers is None:
        workers = int(os.environ.get("RELPOLY_WORKERS", "1"))

    sizes = [
        min(batch_size, samples - start)
        for start in range(0, samples, batch_size)
    ]
    jobs = list(enumerate(sizes))
    if workers <= 1 or len(jobs) <= 1:
        counts = [_count_batch(shape, q, seed, i, sz) for i, sz in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(
                pool.map(lambda job: _count_batch(shape, q, seed, *job), jobs)
            )
    failures = sum(counts)

    p_hat = failures / samples
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    if failures in (0, samples):
        ci = _wilson_interval(failures, samples)
    else:
        ci = (
            max(0.0, p_hat - _Z_95 * stderr),
            min(1.0, p_hat + _Z_95 * stderr),
        )
    return McEstimate(
        shape=shape,
        q=q,
        samples=samples,
        failures=failures,
        p_hat=p_hat,
        stderr=stderr,
        ci95=ci,
        seed=seed,
    )
