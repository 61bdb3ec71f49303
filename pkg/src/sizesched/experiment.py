"""Repetition-and-convergence driver behind the command line.

A plan runs every policy on the *same* workload per repetition (paired
comparison), draws a fresh workload per repetition from the seed schedule
``base_seed + rep``, and keeps repeating until the 95% confidence halfwidth
of every policy's mean sojourn time falls within ``ci_target`` of its mean,
subject to ``reps_min``/``reps_max``.  Sweeps rerun the plan per axis value
with seeds offset by ``point_index * reps_max`` so points never share seeds.

Output is CSV only.  Floats are written with ``%.10g`` so rerunning an
identical plan reproduces the files byte for byte.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import CompletionRecord, simulate
from .metrics import ci95, mean_sojourn
from .policies import canonical_name
from .workload import (
    ParetoSizes,
    WeibullSizes,
    Workload,
    WorkloadSpec,
    apply_error,
    generate,
)

__all__ = [
    "ExperimentPlan",
    "ResultRow",
    "SWEEP_AXES",
    "run_plan",
    "sweep",
    "write_summary_csv",
    "write_records_csv",
]

SWEEP_AXES = ("sigma", "shape", "timeshape", "load", "njobs", "alpha")

_SUMMARY_FIELDS = ("policy", "mst", "ci95", "reps", "converged")


@dataclass(frozen=True)
class ExperimentPlan:
    """What to run: workload family, policies, and stopping rules."""

    policies: tuple[str, ...]
    njobs: int = 10000
    size_dist: WeibullSizes | ParetoSizes = WeibullSizes(0.25)
    timeshape: float = 1.0
    load: float = 0.9
    sigma: float = 0.5
    reps_min: int = 30
    ci_target: float = 0.05
    reps_max: int = 5000
    base_seed: int = 0
    trace: Workload | None = None
    backend: str = "auto"

    def __post_init__(self):
        if not self.policies:
            raise ValueError("at least one policy is required")
        object.__setattr__(
            self, "policies", tuple(canonical_name(p) for p in self.policies)
        )
        if len(set(self.policies)) != len(self.policies):
            raise ValueError("duplicate policies in plan")
        if self.reps_min < 1:
            raise ValueError("reps_min must be >= 1")
        if not 0 < self.ci_target < 1:
            raise ValueError("ci_target must lie in (0, 1)")
        if self.reps_max < self.reps_min:
            raise ValueError("reps_max must be >= reps_min")

    def workload_for_rep(self, rep: int) -> Workload:
        seed = self.base_seed + rep
        if self.trace is not None:
            # Same trace every rep; only the estimate noise is redrawn.
            rng = np.random.Generator(np.random.PCG64(seed))
            _, sizes, _ = self.trace.arrays()
            return self.trace.with_estimates(apply_error(sizes, self.sigma, rng))
        return generate(WorkloadSpec(
            njobs=self.njobs, size_dist=self.size_dist, timeshape=self.timeshape,
            load=self.load, sigma=self.sigma, seed=seed,
        ))

    def params(self) -> dict[str, object]:
        """Parameter echo used for result rows and CSV headers."""
        out: dict[str, object] = {}
        if self.trace is not None:
            prov = self.trace.provenance
            out["trace"] = getattr(prov, "path", "trace")
            out["njobs"] = len(self.trace)
        else:
            out["njobs"] = self.njobs
            if isinstance(self.size_dist, WeibullSizes):
                out["size_dist"] = "weibull"
                out["shape"] = self.size_dist.shape
            else:
                out["size_dist"] = "pareto"
                out["alpha"] = self.size_dist.alpha
            out["timeshape"] = self.timeshape
            out["load"] = self.load
        out["sigma"] = self.sigma
        out["seed"] = self.base_seed
        return out


@dataclass(frozen=True)
class ResultRow:
    params: dict[str, object]
    policy: str
    mst: float
    ci: float
    vs: dict[str, float] = field(default_factory=dict)
    reps: int = 0
    converged: bool = True


def _converged(msts: dict[str, list[float]], ci_target: float) -> bool:
    for samples in msts.values():
        if len(samples) < 2:
            return False
        mean, halfwidth = ci95(samples)
        if halfwidth > ci_target * mean:
            return False
    return True


def _record_sink(per_job_dir: str, policy: str, rep: int, records):
    safe = policy.replace("+", "_")
    path = os.path.join(per_job_dir, f"jobs_{safe}_rep{rep:04d}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        write_records_csv(records, fh)


def run_plan(plan: ExperimentPlan, per_job_dir: str | None = None,
             progress=None) -> list[ResultRow]:
    """Execute a plan to convergence; one result row per policy.

    ``per_job_dir`` turns on per-(policy, rep) completion-record CSV files.
    ``progress`` is called as ``progress(rep, policy, mst)`` after each run.
    """
    if per_job_dir is not None:
        os.makedirs(per_job_dir, exist_ok=True)
    msts: dict[str, list[float]] = {p: [] for p in plan.policies}
    reps = 0
    while True:
        workload = plan.workload_for_rep(reps)
        for policy in plan.policies:
            records = simulate(workload, policy, backend=plan.backend)
            mst = mean_sojourn(records)
            msts[policy].append(mst)
            if per_job_dir is not None:
                _record_sink(per_job_dir, policy, reps, records)
            if progress is not None:
                progress(reps, policy, mst)
        reps += 1
        if reps >= plan.reps_min and _converged(msts, plan.ci_target):
            break
        if reps >= plan.reps_max:
            break

    converged = _converged(msts, plan.ci_target)
    params = plan.params()
    means = {p: float(np.mean(msts[p])) for p in plan.policies}
    rows = []
    for policy in plan.policies:
        if len(msts[policy]) >= 2:
            _, halfwidth = ci95(msts[policy])
        else:
            halfwidth = math.nan
        vs = {q: means[policy] / means[q] for q in plan.policies}
        rows.append(ResultRow(
            params=params, policy=policy, mst=means[policy], ci=halfwidth,
            vs=vs, reps=reps, converged=converged,
        ))
    return rows


def _plan_for_axis_value(plan: ExperimentPlan, axis: str, value,
                         point_index: int) -> ExperimentPlan:
    seed = plan.base_seed + point_index * plan.reps_max
    if axis == "shape":
        return replace(plan, size_dist=WeibullSizes(float(value)), base_seed=seed)
    if axis == "alpha":
        return replace(plan, size_dist=ParetoSizes(float(value)), base_seed=seed)
    if axis == "njobs":
        return replace(plan, njobs=int(value), base_seed=seed)
    if axis in ("sigma", "timeshape", "load"):
        return replace(plan, **{axis: float(value), "base_seed": seed})
    raise ValueError(f"unknown sweep axis {axis!r}; choices: {', '.join(SWEEP_AXES)}")


def sweep(plan: ExperimentPlan, axis: str, values,
          per_job_dir: str | None = None, progress=None) -> list[ResultRow]:
    """Rerun the plan once per axis value; rows concatenated in value order."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choices: {', '.join(SWEEP_AXES)}")
    if plan.trace is not None and axis not in ("sigma",):
        raise ValueError(f"axis {axis!r} does not apply to a trace workload")
    rows: list[ResultRow] = []
    for i, value in enumerate(values):
        point = _plan_for_axis_value(plan, axis, value, i)
        point_dir = None
        if per_job_dir is not None:
            point_dir = os.path.join(per_job_dir, f"{axis}_{_fmt(value)}")
        point_rows = run_plan(point, per_job_dir=point_dir, progress=progress)
        rows.extend(replace(r, params={**r.params, axis: value}) for r in point_rows)
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def write_summary_csv(rows: list[ResultRow], fh) -> None:
    """One CSV row per (parameter point, policy), stable column order."""
    if not rows:
        fh.write("policy,mst,ci95,reps,converged\n")
        return
    param_keys: list[str] = []
    vs_keys: list[str] = []
    for row in rows:
        for key in row.params:
            if key not in param_keys:
                param_keys.append(key)
        for key in row.vs:
            if key not in vs_keys:
                vs_keys.append(key)
    header = param_keys + ["policy", "mst", "ci95"]
    header += [f"vs_{k.replace('+', '_')}" for k in vs_keys]
    header += ["reps", "converged"]
    fh.write(",".join(header) + "\n")
    for row in rows:
        cells = [_fmt(row.params.get(k, "")) for k in param_keys]
        cells += [row.policy, _fmt(row.mst), _fmt(row.ci)]
        cells += [_fmt(row.vs[k]) if k in row.vs else "" for k in vs_keys]
        cells += [str(row.reps), "1" if row.converged else "0"]
        fh.write(",".join(cells) + "\n")


def write_records_csv(records: list[CompletionRecord], fh) -> None:
    fh.write("id,arrival,size,estimate,completion,sojourn,slowdown\n")
    for r in records:
        fh.write(",".join((
            str(r.id), _fmt(r.arrival), _fmt(r.size), _fmt(r.estimate),
            _fmt(r.completion), _fmt(r.sojourn), _fmt(r.slowdown),
        )) + "\n")
