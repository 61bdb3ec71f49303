"""Evaluation quantities derived from completion records.

Mean sojourn time, per-job slowdowns, equal-count size binning of slowdown,
empirical CDFs, size/estimate correlation and normal-approximation
confidence intervals.  All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RunSummary",
    "BinnedSlowdown",
    "EmpiricalCdf",
    "mean_sojourn",
    "slowdowns",
    "mean_conditional_slowdown",
    "empirical_cdf",
    "pearson_correlation",
    "ci95",
    "normalized_mst",
    "summarize",
]

_Z95 = 1.96


@dataclass(frozen=True)
class RunSummary:
    """One policy's outcome on one workload."""

    mst: float
    slowdowns: tuple[float, ...]
    njobs: int
    policy: str
    provenance: object


@dataclass(frozen=True)
class BinnedSlowdown:
    """Mean slowdown per equal-count size class, smallest sizes first."""

    bins: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class EmpiricalCdf:
    values: tuple[float, ...]

    @property
    def points(self) -> list[tuple[float, float]]:
        n = len(self.values)
        return [(v, (i + 1) / n) for i, v in enumerate(self.values)]

    def fraction_above(self, threshold: float) -> float:
        if not self.values:
            return 0.0
        return sum(1 for v in self.values if v > threshold) / len(self.values)


def mean_sojourn(records) -> float:
    """Arithmetic mean of completion minus arrival."""
    if not records:
        raise ValueError("no records: mean sojourn undefined")
    return sum(r.sojourn for r in records) / len(records)


def slowdowns(records) -> list[float]:
    """Sojourn over true size, per job, preserving record order."""
    return [r.slowdown for r in records]


def mean_conditional_slowdown(records, nbins: int = 100) -> BinnedSlowdown:
    """Average slowdown as a function of size, over equal-count size bins.

    Records are sorted by size and split into nbins contiguous groups whose
    counts differ by at most one (the first remainder groups take the extra
    job).  Each bin reports its mean size and mean slowdown.
    """
    n = len(records)
    if n < nbins:
        raise ValueError(
            f"{n} records cannot fill {nbins} bins; use nbins <= {n}"
        )
    ordered = sorted(records, key=lambda r: (r.size, r.id))
    base, extra = divmod(n, nbins)
    bins = []
    counts = []
    start = 0
    for b in range(nbins):
        count = base + (1 if b < extra else 0)
        group = ordered[start:start + count]
        start += count
        bins.append((
            sum(r.size for r in group) / count,
            sum(r.slowdown for r in group) / count,
        ))
        counts.append(count)
    return BinnedSlowdown(bins=tuple(bins), counts=tuple(counts))


def empirical_cdf(values) -> EmpiricalCdf:
    """Step CDF of the values; point i carries cumulative fraction (i+1)/n."""
    return EmpiricalCdf(values=tuple(sorted(float(v) for v in values)))


def pearson_correlation(xs, ys) -> float:
    """Sample Pearson coefficient on raw values."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError("length mismatch")
    if len(xs) < 2:
        raise ValueError("need at least 2 points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("zero variance: correlation undefined")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def ci95(samples) -> tuple[float, float]:
    """(mean, halfwidth) of a 95% normal-approximation interval.

    Uses 1.96 times the standard error with the ddof=1 sample deviation;
    with the repetition counts used here the Student-t correction would be
    negligible.
    """
    n = len(samples)
    if n < 2:
        raise ValueError("need at least 2 samples for an interval")
    mean = sum(samples) / n
    var = sum((s - mean) ** 2 for s in samples) / (n - 1)
    return mean, _Z95 * math.sqrt(var / n)


def normalized_mst(records_policy, records_baseline) -> float:
    """MST ratio of two runs over the same workload realization.

    Raises if the two record sets do not describe the same jobs, since the
    ratio is meaningless across different workloads.
    """
    base = {r.id: (r.arrival, r.size) for r in records_baseline}
    ours = {r.id: (r.arrival, r.size) for r in records_policy}
    if base != ours:
        raise ValueError("record sets come from different workloads")
    return mean_sojourn(records_policy) / mean_sojourn(records_baseline)


def summarize(records, policy: str, provenance=None) -> RunSummary:
    return RunSummary(
        mst=mean_sojourn(records),
        slowdowns=tuple(slowdowns(records)),
        njobs=len(records),
        policy=policy,
        provenance=provenance,
    )
