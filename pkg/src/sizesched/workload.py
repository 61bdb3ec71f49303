"""Job stream construction: synthetic generators and trace replay.

Synthetic workloads use Weibull job sizes (or a Lomax variant), Weibull
inter-arrival gaps and a multiplicative log-normal estimation error.  All
quantities are expressed in service-time units of a unit-rate server, so a
target load is obtained purely by spacing arrivals.

Reproducibility contract: every sampler draws from an explicit
``numpy.random.Generator``.  ``generate`` seeds a PCG64 stream and draws, in
this order: size uniforms (njobs), inter-arrival uniforms (njobs), error
normals (njobs).  Sizes and gaps use inverse-transform sampling on the
uniforms; error multipliers use ``Generator.standard_normal``.  The same spec
therefore always yields a bit-identical workload under a fixed numpy version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "InvalidParameter",
    "TraceError",
    "JobSpec",
    "WeibullSizes",
    "ParetoSizes",
    "WorkloadSpec",
    "SyntheticProvenance",
    "TraceProvenance",
    "Workload",
    "SwimColumns",
    "weibull_scale_for_unit_mean",
    "sample_sizes",
    "sample_arrivals",
    "apply_error",
    "generate",
    "ingest_trace",
    "scale_to_load",
]

# Floor for -log(1-U) so inverse-transform variates stay strictly positive
# even if a uniform lands exactly on 0.
_LOG_FLOOR = 1e-18


class InvalidParameter(ValueError):
    """A distribution or workload parameter is outside its domain."""


class TraceError(ValueError):
    """A trace file could not be turned into a workload."""


@dataclass(frozen=True)
class JobSpec:
    """One job: arrival time, true size and the size the scheduler sees."""

    id: int
    arrival: float
    size: float
    estimate: float

    def __post_init__(self):
        if self.arrival < 0:
            raise InvalidParameter(f"arrival must be >= 0, got {self.arrival}")
        if not self.size > 0 or not self.estimate > 0:
            raise InvalidParameter(
                f"size and estimate must be > 0, got {self.size}, {self.estimate}"
            )


@dataclass(frozen=True)
class WeibullSizes:
    shape: float

    def __post_init__(self):
        if not self.shape > 0:
            raise InvalidParameter(f"weibull shape must be > 0, got {self.shape}")


@dataclass(frozen=True)
class ParetoSizes:
    """Lomax (Pareto anchored at zero) job sizes with tail index alpha."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParameter(f"pareto alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class WorkloadSpec:
    """Synthetic-generation parameters: counts, distributions, load, seed."""

    njobs: int
    size_dist: WeibullSizes | ParetoSizes = WeibullSizes(0.25)
    timeshape: float = 1.0
    load: float = 0.9
    sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.njobs < 0:
            raise InvalidParameter(f"njobs must be >= 0, got {self.njobs}")
        if not 0 < self.load <= 1:
            raise InvalidParameter(f"load must be in (0, 1], got {self.load}")
        if not self.timeshape > 0:
            raise InvalidParameter(f"timeshape must be > 0, got {self.timeshape}")
        if self.sigma < 0:
            raise InvalidParameter(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class SyntheticProvenance:
    spec: WorkloadSpec


@dataclass(frozen=True)
class TraceProvenance:
    path: str
    target_load: float | None = None


@dataclass(frozen=True)
class Workload:
    """An arrival-ordered job list plus a record of where it came from."""

    jobs: tuple[JobSpec, ...]
    provenance: SyntheticProvenance | TraceProvenance

    def __len__(self):
        return len(self.jobs)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(arrivals, sizes, estimates) as float64 arrays indexed by job id."""
        n = len(self.jobs)
        arrivals = np.empty(n)
        sizes = np.empty(n)
        estimates = np.empty(n)
        for i, job in enumerate(self.jobs):
            arrivals[i] = job.arrival
            sizes[i] = job.size
            estimates[i] = job.estimate
        return arrivals, sizes, estimates

    def with_estimates(self, estimates) -> "Workload":
        """Same jobs with the estimate column replaced."""
        if len(estimates) != len(self.jobs):
            raise InvalidParameter("estimate count does not match job count")
        jobs = tuple(
            replace(job, estimate=float(est))
            for job, est in zip(self.jobs, estimates)
        )
        return Workload(jobs=jobs, provenance=self.provenance)

    @staticmethod
    def from_columns(arrivals, sizes, estimates, provenance) -> "Workload":
        """Build a workload, checking arrival order and positivity."""
        arrivals = [float(a) for a in arrivals]
        sizes = [float(s) for s in sizes]
        estimates = [float(e) for e in estimates]
        if not (len(arrivals) == len(sizes) == len(estimates)):
            raise InvalidParameter("column lengths differ")
        jobs = []
        prev = -math.inf
        for i, (a, s, e) in enumerate(zip(arrivals, sizes, estimates)):
            if a < prev:
                raise InvalidParameter(f"arrivals not sorted at index {i}")
            if not s > 0 or not e > 0:
                raise InvalidParameter(f"non-positive size or estimate at index {i}")
            if a < 0:
                raise InvalidParameter(f"negative arrival at index {i}")
            prev = a
            jobs.append(JobSpec(id=i, arrival=a, size=s, estimate=e))
        return Workload(jobs=tuple(jobs), provenance=provenance)


def weibull_scale_for_unit_mean(shape: float) -> float:
    """Scale making a Weibull(shape) variate have mean exactly 1."""
    if not shape > 0:
        raise InvalidParameter(f"shape must be > 0, got {shape}")
    return 1.0 / math.gamma(1.0 + 1.0 / shape)


def _positive_exponential(u: np.ndarray) -> np.ndarray:
    # -log(1-U) for U in [0, 1): an Exp(1) variate, floored away from zero.
    return np.maximum(-np.log1p(-u), _LOG_FLOOR)


def sample_sizes(spec: WorkloadSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw njobs job sizes by inverse transform from the spec's distribution.

    Weibull sizes are normalized to unit mean.  Lomax sizes are normalized to
    unit mean when alpha > 1; for alpha <= 1 the mean diverges and the scale
    is fixed at 1 (load then only makes sense empirically, see
    ``scale_to_load``).
    """
    u = rng.random(spec.njobs)
    y = _positive_exponential(u)
    dist = spec.size_dist
    if isinstance(dist, WeibullSizes):
        scale = weibull_scale_for_unit_mean(dist.shape)
        return scale * y ** (1.0 / dist.shape)
    scale = dist.alpha - 1.0 if dist.alpha > 1 else 1.0
    return scale * np.expm1(y / dist.alpha)


def sample_arrivals(
    timeshape: float, load: float, njobs: int, rng: np.random.Generator
) -> np.ndarray:
    """Arrival times with Weibull gaps whose mean is 1/load.

    With unit-mean sizes this offers the requested load to a unit-rate
    server.  The first arrival sits at the first gap, and times are the
    running sums of the gaps.
    """
    if not timeshape > 0:
        raise InvalidParameter(f"timeshape must be > 0, got {timeshape}")
    if not 0 < load <= 1:
        raise InvalidParameter(f"load must be in (0, 1], got {load}")
    if njobs < 0:
        raise InvalidParameter(f"njobs must be >= 0, got {njobs}")
    u = rng.random(njobs)
    y = _positive_exponential(u)
    scale = weibull_scale_for_unit_mean(timeshape) / load
    gaps = scale * y ** (1.0 / timeshape)
    return np.cumsum(gaps)


def apply_error(sizes, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Multiply each size by an independent Log-Normal(0, sigma^2) factor.

    sigma=0 returns the sizes unchanged (the multiplier is exactly 1), so
    exact-information runs carry bit-identical estimates.
    """
    if sigma < 0:
        raise InvalidParameter(f"sigma must be >= 0, got {sigma}")
    sizes = np.asarray(sizes, dtype=float)
    if np.any(sizes <= 0):
        raise InvalidParameter("sizes must be strictly positive")
    factors = np.exp(sigma * rng.standard_normal(len(sizes)))
    return sizes * factors


def generate(spec: WorkloadSpec) -> Workload:
    """Materialize a synthetic workload from its spec, deterministically."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    sizes = sample_sizes(spec, rng)
    arrivals = sample_arrivals(spec.timeshape, spec.load, spec.njobs, rng)
    estimates = apply_error(sizes, spec.sigma, rng)
    return Workload.from_columns(
        arrivals, sizes, estimates, SyntheticProvenance(spec)
    )


@dataclass(frozen=True)
class SwimColumns:
    """Column indices of a SWIM-style TSV.

    Defaults follow the FB-2010 sample layout: job name, submission time,
    inter-submission gap, input bytes, shuffle bytes, output bytes.
    """

    timestamp: int = 1
    input_bytes: int = 3
    shuffle_bytes: int = 4
    output_bytes: int = 5


def _parse_two_column(lines) -> list[tuple[float, float]]:
    rows = []
    for lineno, raw in lines:
        fields = raw.replace(",", " ").split()
        if len(fields) != 2:
            raise TraceError(f"line {lineno}: expected 'arrival size', got {raw!r}")
        try:
            arrival, size = float(fields[0]), float(fields[1])
        except ValueError:
            raise TraceError(f"line {lineno}: non-numeric field in {raw!r}") from None
        if not size > 0:
            raise TraceError(f"line {lineno}: non-positive size {size}")
        if arrival < 0:
            raise TraceError(f"line {lineno}: negative arrival {arrival}")
        rows.append((arrival, size))
    return rows


def _parse_swim_tsv(lines, columns: SwimColumns) -> list[tuple[float, float]]:
    needed = 1 + max(
        columns.timestamp,
        columns.input_bytes,
        columns.shuffle_bytes,
        columns.output_bytes,
    )
    rows = []
    for lineno, raw in lines:
        fields = raw.split("\t")
        if len(fields) < needed:
            raise TraceError(
                f"line {lineno}: expected at least {needed} tab-separated fields"
            )
        try:
            arrival = float(fields[columns.timestamp])
            size = (
                float(fields[columns.input_bytes])
                + float(fields[columns.shuffle_bytes])
                + float(fields[columns.output_bytes])
            )
        except ValueError:
            raise TraceError(f"line {lineno}: non-numeric field in {raw!r}") from None
        if not size > 0:
            raise TraceError(f"line {lineno}: non-positive job size {size}")
        if arrival < 0:
            raise TraceError(f"line {lineno}: negative timestamp {arrival}")
        rows.append((arrival, size))
    return rows


def ingest_trace(
    path, format: str = "two_column", swim_columns: SwimColumns = SwimColumns()
) -> Workload:
    """Read a trace into a workload; sizes stay in the file's raw units.

    ``two_column`` expects "arrival size" per line (space, tab or comma
    separated); ``swim_tsv`` sums input, shuffle and output byte columns of a
    SWIM-style TSV.  Lines starting with '#' and blank lines are skipped.
    Rows are sorted by arrival, file order breaking ties.
    """
    with open(path) as fh:
        lines = [
            (lineno, line.strip())
            for lineno, line in enumerate(fh, start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
    if format == "two_column":
        rows = _parse_two_column(lines)
    elif format == "swim_tsv":
        rows = _parse_swim_tsv(lines, swim_columns)
    else:
        raise InvalidParameter(f"unknown trace format {format!r}")
    if not rows:
        raise TraceError(f"{path}: no jobs found")
    rows.sort(key=lambda row: row[0])
    arrivals = [a for a, _ in rows]
    sizes = [s for _, s in rows]
    return Workload.from_columns(
        arrivals, sizes, sizes, TraceProvenance(path=str(path))
    )


def scale_to_load(workload: Workload, target_load: float) -> Workload:
    """Rescale sizes so a unit-rate server sees exactly the target load.

    The implied service rate is total_size / (target_load * span) with span
    the distance between first and last arrival; every size and estimate is
    divided by it.  Arrival times are untouched.
    """
    if not 0 < target_load <= 1:
        raise InvalidParameter(f"target_load must be in (0, 1], got {target_load}")
    jobs = workload.jobs
    if len(jobs) < 2:
        raise InvalidParameter("need at least 2 jobs to define a schedule span")
    span = jobs[-1].arrival - jobs[0].arrival
    total = sum(job.size for job in jobs)
    if span <= 0:
        raise InvalidParameter("zero schedule span, cannot normalize load")
    rate = total / (target_load * span)
    scaled = tuple(
        replace(job, size=job.size / rate, estimate=job.estimate / rate)
        for job in jobs
    )
    provenance = workload.provenance
    if isinstance(provenance, TraceProvenance):
        provenance = replace(provenance, target_load=target_load)
    return Workload(jobs=scaled, provenance=provenance)
