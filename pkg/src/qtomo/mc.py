"""Streaming Monte Carlo aggregation of estimator values over records.

Accumulators are immutable values with a Chan-style merge, so a record
stream can be partitioned across workers in any layout: determinism comes
from the merge invariant, not from processing order.  Real and imaginary
second moments are tracked separately because error bars are checked per
component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "RunningEstimate",
    "empty_estimate",
    "update",
    "merge",
    "finalize",
    "reconstruct",
]


@dataclass(frozen=True)
class RunningEstimate:
    count: int = 0
    mean: complex = 0.0 + 0.0j
    m2_re: float = 0.0
    m2_im: float = 0.0


def empty_estimate() -> RunningEstimate:
    return RunningEstimate()


def update(acc: RunningEstimate, value: complex) -> RunningEstimate:
    """One Welford step on the complex value."""
    value = complex(value)
    count = acc.count + 1
    delta = value - acc.mean
    mean = acc.mean + delta / count
    delta2 = value - mean
    return RunningEstimate(
        count=count,
        mean=mean,
        m2_re=acc.m2_re + delta.real * delta2.real,
        m2_im=acc.m2_im + delta.imag * delta2.imag,
    )


def merge(a: RunningEstimate, b: RunningEstimate) -> RunningEstimate:
    """Combine accumulators of disjoint streams (associative, commutative)."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    count = a.count + b.count
    delta = b.mean - a.mean
    scale = a.count * b.count / count
    return RunningEstimate(
        count=count,
        mean=a.mean + delta * (b.count / count),
        m2_re=a.m2_re + b.m2_re + delta.real**2 * scale,
        m2_im=a.m2_im + b.m2_im + delta.imag**2 * scale,
    )


def finalize(acc: RunningEstimate) -> dict:
    """Mean with per-component standard errors; stderr is None below 2 samples."""
    if acc.count < 1:
        raise ValueError("cannot finalize an empty estimate")
    if acc.count >= 2:
        stderr_re = math.sqrt(acc.m2_re / (acc.count - 1)) / math.sqrt(acc.count)
        stderr_im = math.sqrt(acc.m2_im / (acc.count - 1)) / math.sqrt(acc.count)
    else:
        stderr_re = stderr_im = None
    return {
        "mean": acc.mean,
        "stderr_re": stderr_re,
        "stderr_im": stderr_im,
        "count": acc.count,
    }


def _accumulate(values: np.ndarray) -> RunningEstimate:
    acc = RunningEstimate()
    for v in values:
        acc = update(acc, v)
    return acc


def reconstruct(records: Sequence, kernel, shards: int = 1) -> dict:
    """Average the estimator kernel over a record stream.

    The stream is split into ``shards`` contiguous parts, each folded through
    :func:`update` and combined with :func:`merge`; the result is identical
    (to roundoff) for any shard count.
    """
    if len(records) == 0:
        raise ValueError("cannot reconstruct from an empty record stream")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    values = np.asarray(kernel.evaluate(records), dtype=complex)
    acc = RunningEstimate()
    for part in np.array_split(values, min(shards, len(records))):
        acc = merge(acc, _accumulate(part))
    return finalize(acc)
