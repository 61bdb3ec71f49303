"""Brute-force fixed-step simulator used to cross-check the event engine.

Each tick recomputes the allocation from scratch out of the policy's
declarative rule; nothing is shared with the event-driven engine or with the
incremental policy bookkeeping.  For the fair-queuing policies the emulated
processor-sharing run is itself advanced tick by tick over the estimates.
Deliberately simple and slow; test use only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .engine import CompletionRecord

__all__ = ["OracleConfig", "discretized_run"]

_DONE_TOL = 1e-12


@dataclass(frozen=True)
class OracleConfig:
    dt: float = 1e-3
    tolerance: float = 1e-2

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.tolerance < self.dt:
            raise ValueError("tolerance below dt is not resolvable")


def discretized_run(workload, policy: str, dt: float = 1e-3) -> list[CompletionRecord]:
    """Simulate by ticking time forward in steps of dt.

    Arrivals take effect only on tick boundaries, so completion times drift
    by up to one tick per admission relative to an exact simulation.
    """
    jobs = workload.jobs
    n = len(jobs)
    if n == 0:
        return []
    min_size = min(job.size for job in jobs)
    if dt > min_size / 10:
        warnings.warn(f"dt={dt} is coarse for a minimum job size of {min_size}")

    fspe_family = policy in ("fspe", "fspe+ps")
    arrival = [job.arrival for job in jobs]
    size = [job.size for job in jobs]
    estimate = [job.size if policy == "srpt" else job.estimate for job in jobs]

    remaining = size[:]
    attained = [0.0] * n
    virtual_remaining = estimate[:]
    virtually_done = [False] * n
    late_order: list[int] = []
    arrived = [False] * n
    done = [False] * n
    completion = [0.0] * n

    now = 0.0
    next_to_arrive = 0
    n_done = 0
    budget = int((sum(size) + arrival[-1]) / dt * 4) + 1000

    for _ in range(budget):
        if n_done == n:
            break
        # Admit jobs whose arrival has passed.  Admission happens only on
        # tick boundaries; that quantization is the oracle's error model.
        while next_to_arrive < n and arrival[next_to_arrive] <= now + _DONE_TOL:
            arrived[next_to_arrive] = True
            next_to_arrive += 1
        virtual_busy = fspe_family and any(
            arrived[j] and not virtually_done[j] for j in range(n)
        )
        if not any(arrived[j] and not done[j] for j in range(n)) and not virtual_busy:
            # Dead air: jump to the next arrival's tick boundary.
            target = arrival[next_to_arrive]
            now += max(int((target - now) / dt), 1) * dt
            continue

        # Spend the tick in stages.  Each stage holds the allocation and
        # the virtual shares constant, and ends at the first completion
        # (real or virtual), attained-level merge, or the tick boundary,
        # so no service is lost to within-tick rounding.
        left = dt
        for _stage in range(4 * n + 16):
            present = [j for j in range(n) if arrived[j] and not done[j]]
            in_virtual = [
                j for j in range(n) if arrived[j] and not virtually_done[j]
            ] if fspe_family else []

            alloc: dict[int, float] = {}
            if present:
                if policy == "fifo":
                    head = min(present, key=lambda j: (arrival[j], j))
                    alloc[head] = 1.0
                elif policy == "ps":
                    share = 1.0 / len(present)
                    alloc = {j: share for j in present}
                elif policy == "las":
                    floor = min(attained[j] for j in present)
                    band = [j for j in present if attained[j] <= floor + 1e-9]
                    share = 1.0 / len(band)
                    alloc = {j: share for j in band}
                elif policy in ("srpt", "srpte"):
                    best = min(present, key=lambda j: (estimate[j] - attained[j], arrival[j], j))
                    alloc[best] = 1.0
                elif fspe_family:
                    late = [j for j in late_order if not done[j]]
                    if late:
                        if policy == "fspe+ps":
                            share = 1.0 / len(late)
                            alloc = {j: share for j in late}
                        else:
                            alloc[late[0]] = 1.0
                    else:
                        runnable = [j for j in present if not virtually_done[j]]
                        best = min(runnable, key=lambda j: (virtual_remaining[j], arrival[j], j))
                        alloc[best] = 1.0
                else:
                    raise ValueError(f"unknown policy {policy!r}")
            elif policy not in (
                "fifo", "ps", "las", "srpt", "srpte", "fspe", "fspe+ps",
            ):
                raise ValueError(f"unknown policy {policy!r}")

            if not alloc and not in_virtual:
                break
            step = left
            if alloc:
                step = min(step, min(remaining[j] / f for j, f in alloc.items()))
            if in_virtual:
                nv = len(in_virtual)
                step = min(step, min(virtual_remaining[j] for j in in_virtual) * nv)
            if policy == "las" and alloc:
                # stop where the served band catches the next attained level
                above = [
                    attained[j] for j in present if attained[j] > floor + 1e-9
                ]
                if above:
                    step = min(step, (min(above) - floor) * len(band))
            step = max(step, 0.0)

            for j, fraction in alloc.items():
                remaining[j] -= fraction * step
                attained[j] += fraction * step
                if remaining[j] <= _DONE_TOL:
                    done[j] = True
                    completion[j] = now + (dt - left) + step
                    n_done += 1
            if in_virtual:
                share = step / len(in_virtual)
                for j in in_virtual:
                    virtual_remaining[j] -= share
                    if virtual_remaining[j] <= _DONE_TOL:
                        virtually_done[j] = True
                        if not done[j]:
                            late_order.append(j)
            left -= step
            if left <= 1e-15:
                break
        else:
            raise RuntimeError("oracle made no progress within a tick")
        now += dt
    else:
        raise RuntimeError("oracle exceeded its tick budget; simulation is stuck")

    order = sorted(range(n), key=lambda j: (completion[j], j))
    return [
        CompletionRecord(
            id=j, arrival=arrival[j], size=size[j],
            estimate=jobs[j].estimate, completion=completion[j],
        )
        for j in order
    ]
