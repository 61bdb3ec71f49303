import numpy as np
import pytest

from sizesched.workload import TraceProvenance, Workload

ALL_POLICIES = ("fifo", "ps", "las", "srpt", "srpte", "fspe", "fspe+ps")


def make_workload(arrivals, sizes, estimates=None) -> Workload:
    """Hand-built workload for unit tests; estimates default to exact."""
    if estimates is None:
        estimates = sizes
    return Workload.from_columns(
        arrivals, sizes, estimates, TraceProvenance("test")
    )


def completions_by_id(records) -> dict[int, float]:
    return {r.id: r.completion for r in records}


def random_instance(rng: np.random.Generator, max_jobs: int = 6) -> Workload:
    """Small random workload in the oracle-comparison regime."""
    n = int(rng.integers(1, max_jobs + 1))
    arrivals = np.sort(rng.uniform(0.0, 4.0, n))
    sizes = rng.uniform(0.5, 5.0, n)
    estimates = sizes * np.exp(rng.standard_normal(n))
    return make_workload(arrivals, sizes, estimates)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
