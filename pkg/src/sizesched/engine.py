"""Event-driven single-server engine.

The engine owns true job sizes and remaining work; policies only ever see
arrival times and size estimates, plus their own allocation history.  Between
events the allocation is piecewise constant; completions are scheduled
exactly at ``now + remaining / fraction`` rather than detected by threshold,
so service accounting cannot drift.

Simultaneous events are dispatched in a fixed order: real completion, then
policy-internal, then arrival.  A departing job therefore never shares the
server with a job arriving at the same instant.

Policy contract (dict allocations, keyed by job id):

* ``on_arrival(time, job, estimate)`` -- the policy sees the estimate only
  (policies with ``needs_exact_sizes`` set get the true size here instead);
* ``on_real_completion(time, job)``;
* ``next_internal_event() -> float | None`` -- e.g. virtual completions or
  attained-service crossings;
* ``on_internal_event(time)``;
* ``allocate() -> dict[job, fraction]`` -- called after every event;
  fractions lie in (0, 1] and sum to at most 1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

__all__ = [
    "ContractViolation",
    "EngineEvent",
    "CompletionRecord",
    "check_allocation",
    "next_real_completion",
    "advance",
    "run_simulation",
    "simulate",
    "active_backend",
    "ARRIVAL",
    "REAL_COMPLETION",
    "POLICY_INTERNAL",
]

ARRIVAL = "arrival"
REAL_COMPLETION = "real_completion"
POLICY_INTERNAL = "policy_internal"

# Dispatch priority at equal timestamps.
_KIND_ORDER = {REAL_COMPLETION: 0, POLICY_INTERNAL: 1, ARRIVAL: 2}

_SUM_TOL = 1e-9
_FRACTION_TOL = 1e-12


class ContractViolation(RuntimeError):
    """A policy broke the allocation or event contract."""


@dataclass(frozen=True)
class EngineEvent:
    kind: str
    time: float
    job: Optional[int] = None


@dataclass(frozen=True)
class CompletionRecord:
    """Per-job outcome of a run."""

    id: int
    arrival: float
    size: float
    estimate: float
    completion: float

    @property
    def sojourn(self) -> float:
        return self.completion - self.arrival

    @property
    def slowdown(self) -> float:
        return self.sojourn / self.size


def check_allocation(alloc: Mapping[int, float], remaining: Mapping[int, float],
                     event: EngineEvent) -> None:
    """Validate an allocation against the current system state."""
    total = 0.0
    for job, fraction in alloc.items():
        if job not in remaining:
            raise ContractViolation(
                f"after {event}: allocated job {job} is not in the system"
            )
        if not fraction > 0 or fraction > 1 + _FRACTION_TOL:
            raise ContractViolation(
                f"after {event}: fraction {fraction} for job {job} not in (0, 1]"
            )
        total += fraction
    if total > 1 + _SUM_TOL:
        raise ContractViolation(
            f"after {event}: allocation fractions sum to {total} > 1"
        )


def next_real_completion(alloc: Mapping[int, float],
                         remaining: Mapping[int, float],
                         now: float) -> Optional[tuple[int, float]]:
    """Earliest completion under the current allocation, ties to lowest id."""
    best = None
    for job, fraction in alloc.items():
        try:
            time = now + remaining[job] / fraction
        except KeyError:
            raise RuntimeError(f"allocated job {job} missing from remaining map")
        if best is None or (time, job) < best:
            best = (time, job)
    if best is None:
        return None
    return best[1], best[0]


def advance(now: float, next_event_time: float, alloc: Mapping[int, float],
            remaining: dict[int, float]) -> dict[int, float]:
    """Apply fraction * dt of service to every allocated job, in place."""
    dt = next_event_time - now
    if dt < 0:
        raise ValueError(f"time went backwards: {now} -> {next_event_time}")
    if dt > 0:
        for job, fraction in alloc.items():
            remaining[job] -= fraction * dt
    return remaining


def run_simulation(workload, policy,
                   observer: Callable[[EngineEvent, Mapping[int, float]], None] | None = None,
                   ) -> list[CompletionRecord]:
    """Run one workload to completion under one policy instance.

    Returns one record per job, in completion order.  ``observer``, when
    given, is called with each dispatched event and the allocation chosen
    after it (test instrumentation).
    """
    jobs = workload.jobs
    n = len(jobs)
    by_id = {job.id: job for job in jobs}
    remaining: dict[int, float] = {}
    records: list[CompletionRecord] = []
    alloc: Mapping[int, float] = {}
    now = 0.0
    i = 0
    exact = getattr(policy, "needs_exact_sizes", False)

    while i < n or remaining:
        pending = next_real_completion(alloc, remaining, now)
        candidates = []
        if pending is not None:
            candidates.append((pending[1], _KIND_ORDER[REAL_COMPLETION],
                               EngineEvent(REAL_COMPLETION, pending[1], pending[0])))
        internal = policy.next_internal_event()
        if internal is not None:
            candidates.append((internal, _KIND_ORDER[POLICY_INTERNAL],
                               EngineEvent(POLICY_INTERNAL, internal)))
        if i < n:
            candidates.append((jobs[i].arrival, _KIND_ORDER[ARRIVAL],
                               EngineEvent(ARRIVAL, jobs[i].arrival, jobs[i].id)))
        if not candidates:
            raise ContractViolation(
                f"no next event at t={now} with {len(remaining)} jobs in system"
            )
        _, _, event = min(candidates, key=lambda c: (c[0], c[1]))
        # Rounding can place a computed event a few ulps in the past; never
        # let the clock move backwards.
        t_event = max(event.time, now)
        advance(now, t_event, alloc, remaining)
        now = t_event

        if event.kind == REAL_COMPLETION:
            job = by_id[event.job]
            del remaining[event.job]
            records.append(CompletionRecord(
                id=job.id, arrival=job.arrival, size=job.size,
                estimate=job.estimate, completion=now,
            ))
            policy.on_real_completion(now, event.job)
        elif event.kind == POLICY_INTERNAL:
            policy.on_internal_event(now)
        else:
            job = jobs[i]
            i += 1
            remaining[job.id] = job.size
            policy.on_arrival(now, job.id, job.size if exact else job.estimate)

        alloc = policy.allocate()
        check_allocation(alloc, remaining, event)
        if observer is not None:
            observer(event, alloc)
    return records


def _load_kernel():
    if os.environ.get("SIZESCHED_BACKEND", "").lower() == "python":
        return None
    try:
        from . import _speedups
    except ImportError:
        return None
    return _speedups


_kernel = _load_kernel()


def active_backend() -> str:
    """Which implementation ``simulate`` uses by default."""
    return "compiled" if _kernel is not None else "python"


def simulate(workload, policy: str, backend: str = "auto") -> list[CompletionRecord]:
    """Run a workload under a policy named by its canonical name.

    ``backend="auto"`` picks the compiled event loop when it is importable
    and falls back to the pure-Python engine otherwise; ``"compiled"`` and
    ``"python"`` force one side.  Both produce the same completions up to
    floating-point noise.
    """
    from . import policies as _policies

    name = _policies.canonical_name(policy)
    if backend not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and _kernel is None:
        raise RuntimeError("compiled kernel is not available")
    use_kernel = _kernel is not None and backend in ("auto", "compiled")
    if not use_kernel:
        return run_simulation(workload, _policies.make_policy(name))

    arrivals, sizes, estimates = workload.arrays()
    if _policies.POLICIES[name].needs_exact_sizes:
        estimates = sizes
    completions = _kernel.simulate(arrivals, sizes, estimates, name)
    order = sorted(range(len(workload)), key=lambda j: (completions[j], j))
    jobs = workload.jobs
    return [
        CompletionRecord(
            id=j, arrival=jobs[j].arrival, size=jobs[j].size,
            estimate=jobs[j].estimate, completion=float(completions[j]),
        )
        for j in order
    ]
