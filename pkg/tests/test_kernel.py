import subprocess
import sys

import numpy as np
import pytest

from conftest import ALL_POLICIES, completions_by_id, make_workload
from sizesched.engine import active_backend, simulate
from sizesched.workload import ParetoSizes, WeibullSizes, WorkloadSpec, generate

compiled = pytest.mark.skipif(
    active_backend() != "compiled",
    reason="compiled kernel not built",
)


@compiled
class TestBackendEquivalence:
    @pytest.mark.parametrize("policy", ALL_POLICIES)
    @pytest.mark.parametrize("sigma,shape", [
        (0.0, 0.25), (0.5, 0.25), (2.0, 0.25), (1.0, 1.0), (1.0, 4.0),
    ])
    def test_synthetic_workloads(self, policy, sigma, shape):
        workload = generate(WorkloadSpec(
            njobs=400, size_dist=WeibullSizes(shape), sigma=sigma, seed=17))
        py = completions_by_id(simulate(workload, policy, backend="python"))
        cc = completions_by_id(simulate(workload, policy, backend="compiled"))
        for job_id, value in py.items():
            assert cc[job_id] == pytest.approx(value, rel=1e-9, abs=1e-9), (
                f"{policy} diverges at job {job_id}"
            )

    @pytest.mark.parametrize("policy", ALL_POLICIES)
    def test_pareto_sizes(self, policy):
        workload = generate(WorkloadSpec(
            njobs=300, size_dist=ParetoSizes(1.5), sigma=1.0, seed=23))
        py = completions_by_id(simulate(workload, policy, backend="python"))
        cc = completions_by_id(simulate(workload, policy, backend="compiled"))
        for job_id, value in py.items():
            assert cc[job_id] == pytest.approx(value, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize("policy", ALL_POLICIES)
    def test_simultaneous_arrivals_and_ties(self, policy):
        arrivals = [0.0, 0.0, 0.0, 2.0, 2.0, 7.0]
        sizes = [2.0, 2.0, 1.0, 3.0, 3.0, 1.0]
        workload = make_workload(arrivals, sizes)
        py = completions_by_id(simulate(workload, policy, backend="python"))
        cc = completions_by_id(simulate(workload, policy, backend="compiled"))
        for job_id, value in py.items():
            assert cc[job_id] == pytest.approx(value, rel=1e-12, abs=1e-12)

    def test_empty_workload(self):
        assert simulate(make_workload([], []), "ps", backend="compiled") == []

    def test_records_sorted_by_completion(self):
        workload = generate(WorkloadSpec(njobs=500, seed=3))
        records = simulate(workload, "srpte", backend="compiled")
        times = [r.completion for r in records]
        assert times == sorted(times)


class TestBackendSelection:
    def test_active_backend_reports_a_known_value(self):
        assert active_backend() in ("compiled", "python")

    def test_python_backend_always_available(self):
        workload = make_workload([0.0], [1.0])
        records = simulate(workload, "fifo", backend="python")
        assert records[0].completion == pytest.approx(1.0)

    def test_env_var_forces_python(self):
        code = (
            "import sizesched; print(sizesched.active_backend())"
        )
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True, text=True, check=True,
            env={"SIZESCHED_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        )
        assert out.stdout.strip() == "python"
