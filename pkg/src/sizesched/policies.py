"""The seven scheduling disciplines.

Size-oblivious: FIFO, PS (equal split) and LAS (least attained service,
ties shared PS-style).  Size-aware: SRPT on exact sizes, its estimate-driven
variant SRPTE, and the two fair-queuing variants FSPE and FSPE+PS built on an
emulated processor-sharing run over estimated sizes.

A job whose estimated remaining work has reached zero (SRPTE), or which has
finished in the emulated system but not in the real one (FSPE family), is
"late".  Late jobs cannot be preempted by fresh arrivals, whose positive
estimates always rank behind.  FSPE serves late jobs one at a time to
completion; FSPE+PS instead shares the whole server equally among the late
set, which is the only difference between the two.

Every policy keeps its own service accounting by integrating the allocations
it returned; none of them ever observes a true job size (SRPT is fed exact
values through the estimate channel by the engine).

Ties are broken the same way everywhere: smaller key, then earlier arrival,
then lower job id.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque

from .engine import ContractViolation

__all__ = [
    "Fifo",
    "Ps",
    "Las",
    "Srpt",
    "Srpte",
    "Fspe",
    "FspePs",
    "VirtualPsQueue",
    "POLICIES",
    "canonical_name",
    "make_policy",
]

# Attained-service levels closer than this are considered tied in LAS.
_LAS_TIE_TOL = 1e-9
# A virtual job must have run down to this close to zero when it completes.
_VIRTUAL_ZERO_TOL = 1e-6


class Fifo:
    """Serve the earliest-arrived job to completion."""

    needs_exact_sizes = False

    def __init__(self):
        self._queue = deque()

    def on_arrival(self, time, job, estimate):
        self._queue.append(job)

    def on_real_completion(self, time, job):
        self._queue.remove(job)

    def next_internal_event(self):
        return None

    def on_internal_event(self, time):
        pass

    def allocate(self):
        if not self._queue:
            return {}
        return {self._queue[0]: 1.0}


class Ps:
    """Split the server evenly among all present jobs."""

    needs_exact_sizes = False

    def __init__(self):
        self._present = set()

    def on_arrival(self, time, job, estimate):
        self._present.add(job)

    def on_real_completion(self, time, job):
        self._present.discard(job)

    def next_internal_event(self):
        return None

    def on_internal_event(self, time):
        pass

    def allocate(self):
        n = len(self._present)
        if n == 0:
            return {}
        share = 1.0 / n
        return {job: share for job in self._present}


class Las:
    """Serve the jobs with the least attained service, sharing ties equally.

    The internal event fires when the rising attained level of the served
    set catches up with the next-lowest level outside it, at which point the
    tie set grows.
    """

    needs_exact_sizes = False

    def __init__(self):
        self._attained = {}
        self._now = 0.0
        self._current = {}

    def _advance(self, time):
        dt = time - self._now
        if dt > 0:
            for job, fraction in self._current.items():
                self._attained[job] += fraction * dt
        self._now = time

    def on_arrival(self, time, job, estimate):
        self._advance(time)
        self._attained[job] = 0.0

    def on_real_completion(self, time, job):
        self._advance(time)
        del self._attained[job]

    def _band(self):
        floor = min(self._attained.values())
        members = [j for j, a in self._attained.items() if a <= floor + _LAS_TIE_TOL]
        return floor, members

    def next_internal_event(self):
        if not self._attained:
            return None
        floor, members = self._band()
        outside = [a for a in self._attained.values() if a > floor + _LAS_TIE_TOL]
        if not outside:
            return None
        return self._now + (min(outside) - floor) * len(members)

    def on_internal_event(self, time):
        # The tie set is recomputed on every allocate; catching up is enough.
        self._advance(time)

    def allocate(self):
        if not self._attained:
            self._current = {}
            return {}
        _, members = self._band()
        share = 1.0 / len(members)
        self._current = {job: share for job in members}
        return dict(self._current)


class Srpte:
    """Serve the job with the smallest estimated remaining work.

    Estimated remaining work may run negative; such a late job still holds
    the smallest key, so no fresh arrival (positive estimate) can take the
    server from it before its real completion.
    """

    needs_exact_sizes = False

    def __init__(self):
        self._est_remaining = {}
        self._arrived = {}
        self._now = 0.0
        self._current = {}

    def _advance(self, time):
        dt = time - self._now
        if dt > 0:
            for job, fraction in self._current.items():
                self._est_remaining[job] -= fraction * dt
        self._now = time

    def on_arrival(self, time, job, estimate):
        self._advance(time)
        self._est_remaining[job] = estimate
        self._arrived[job] = time

    def on_real_completion(self, time, job):
        self._advance(time)
        del self._est_remaining[job]
        del self._arrived[job]

    def next_internal_event(self):
        return None

    def on_internal_event(self, time):
        pass

    def allocate(self):
        if not self._est_remaining:
            self._current = {}
            return {}
        job = min(
            self._est_remaining,
            key=lambda j: (self._est_remaining[j], self._arrived[j], j),
        )
        self._current = {job: 1.0}
        return dict(self._current)


class Srpt(Srpte):
    """SRPTE fed exact sizes: the optimal mean-sojourn-time baseline."""

    needs_exact_sizes = True


class _VirtualJob:
    __slots__ = ("job", "remaining", "active")

    def __init__(self, job, remaining, active=True):
        self.job = job
        self.remaining = remaining
        self.active = active


class VirtualPsQueue:
    """Bookkeeping for an emulated processor-sharing run over estimates.

    Entries are kept sorted ascending by virtual remaining work; each entry
    carries an ``active`` flag that is cleared when the job finishes in the
    real system (the entry still counts toward the emulated sharing until
    its own virtual completion).  Jobs that finish virtually while still
    active are moved to the late set, in virtual-completion order.
    """

    def __init__(self):
        self.entries: list[_VirtualJob] = []
        self.late: dict[int, None] = {}
        self.updated_at = 0.0

    def update(self, now):
        """Advance the emulation: every entry loses (now - t) / |entries|."""
        if now < self.updated_at - 1e-9:
            raise ContractViolation(
                f"virtual time went backwards: {self.updated_at} -> {now}"
            )
        if self.entries and now > self.updated_at:
            share = (now - self.updated_at) / len(self.entries)
            for entry in self.entries:
                entry.remaining -= share
        self.updated_at = now

    def insert(self, now, job, estimated):
        """Admit a job with its estimated size, keeping the order stable."""
        self.update(now)
        keys = [entry.remaining for entry in self.entries]
        self.entries.insert(bisect_right(keys, estimated),
                            _VirtualJob(job, estimated))

    def next_completion(self):
        """When the head empties at the current sharing rate, if ever."""
        if not self.entries:
            return None
        return self.updated_at + self.entries[0].remaining * len(self.entries)

    def complete_head(self, now):
        """Retire the head entry; an active head becomes late."""
        expected = self.next_completion()
        if expected is None or abs(now - expected) > 1e-9 + 1e-12 * abs(expected):
            raise ContractViolation(
                f"virtual completion dispatched at {now}, expected {expected}"
            )
        self.update(now)
        head = self.entries[0]
        if abs(head.remaining) > _VIRTUAL_ZERO_TOL:
            raise RuntimeError(
                f"virtual head remaining {head.remaining} not at zero"
            )
        if head.active:
            self.late[head.job] = None
        self.entries.pop(0)

    def mark_real_completion(self, job):
        """Record a real completion: deactivate the entry or drop the late job."""
        for entry in self.entries:
            if entry.job == job:
                entry.active = False
                return
        if job in self.late:
            del self.late[job]
            return
        raise ContractViolation(f"job {job} neither queued nor late")

    def allocation(self, mode):
        """Pick the served set: late jobs first, else the best active entry.

        ``fspe_ps`` shares the server equally over the whole late set;
        ``fspe`` devotes it to the earliest-late job until that one really
        completes.
        """
        if self.late:
            if mode == "fspe_ps":
                share = 1.0 / len(self.late)
                return {job: share for job in self.late}
            first = next(iter(self.late))
            return {first: 1.0}
        for entry in self.entries:
            if entry.active:
                return {entry.job: 1.0}
        return {}


class Fspe:
    """Serve jobs in emulated-completion order; late jobs run one at a time."""

    needs_exact_sizes = False
    mode = "fspe"

    def __init__(self):
        self.queue = VirtualPsQueue()

    def on_arrival(self, time, job, estimate):
        self.queue.insert(time, job, estimate)

    def on_real_completion(self, time, job):
        self.queue.mark_real_completion(job)

    def next_internal_event(self):
        return self.queue.next_completion()

    def on_internal_event(self, time):
        self.queue.complete_head(time)

    def allocate(self):
        return self.queue.allocation(self.mode)


class FspePs(Fspe):
    """FSPE with the late set served concurrently in a PS fashion."""

    mode = "fspe_ps"


POLICIES = {
    "fifo": Fifo,
    "ps": Ps,
    "las": Las,
    "srpt": Srpt,
    "srpte": Srpte,
    "fspe": Fspe,
    "fspe+ps": FspePs,
}

_ALIASES = {"fspe_ps": "fspe+ps", "fspe-ps": "fspe+ps"}


def canonical_name(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in POLICIES:
        raise ValueError(f"unknown policy {name!r}; choices: {', '.join(POLICIES)}")
    return key


def make_policy(name: str):
    """Fresh single-run policy instance for a canonical policy name."""
    return POLICIES[canonical_name(name)]()
