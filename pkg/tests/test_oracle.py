import numpy as np
import pytest

from conftest import ALL_POLICIES, completions_by_id, make_workload, random_instance
from sizesched.engine import simulate
from sizesched.oracle import OracleConfig, discretized_run


class TestConfig:
    def test_defaults(self):
        config = OracleConfig()
        assert config.dt == pytest.approx(1e-3)
        assert config.tolerance >= config.dt

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            OracleConfig(dt=0.0)

    def test_unresolvable_tolerance_rejected(self):
        with pytest.raises(ValueError):
            OracleConfig(dt=1e-2, tolerance=1e-3)


class TestHandExamples:
    @pytest.mark.parametrize("policy", ALL_POLICIES)
    def test_single_job(self, policy):
        workload = make_workload([0.0], [5.0])
        records = discretized_run(workload, policy, dt=1e-3)
        assert records[0].completion == pytest.approx(5.0, abs=2e-3)

    def test_ps_two_jobs(self):
        workload = make_workload([0.0, 0.0], [4.0, 2.0])
        done = completions_by_id(discretized_run(workload, "ps", dt=1e-3))
        assert done[1] == pytest.approx(4.0, abs=1e-2)
        assert done[0] == pytest.approx(6.0, abs=1e-2)

    def test_srpte_late_job_blocks_short_arrival(self):
        workload = make_workload([0.0, 4.0], [6.0, 1.0], [3.0, 1.0])
        done = completions_by_id(discretized_run(workload, "srpte", dt=1e-3))
        assert done[0] == pytest.approx(6.0, abs=1e-2)
        assert done[1] == pytest.approx(7.0, abs=1e-2)

    def test_empty_workload(self):
        assert discretized_run(make_workload([], []), "ps") == []

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            discretized_run(make_workload([0.0], [1.0]), "edf")

    def test_coarse_dt_warns(self):
        workload = make_workload([0.0], [0.05])
        with pytest.warns(UserWarning, match="coarse"):
            discretized_run(workload, "fifo", dt=1e-2)


class TestSelfConsistency:
    @pytest.mark.parametrize("policy", ALL_POLICIES)
    def test_halving_dt_moves_completions_by_less_than_dt(self, policy):
        workload = make_workload(
            [0.0, 0.7, 1.3, 2.9], [2.0, 1.1, 3.4, 0.9], [2.5, 0.8, 4.1, 1.2])
        coarse = completions_by_id(discretized_run(workload, policy, dt=2e-3))
        fine = completions_by_id(discretized_run(workload, policy, dt=1e-3))
        for job_id, value in coarse.items():
            assert fine[job_id] == pytest.approx(value, abs=2e-3 + 1e-9)


class TestAgreementWithEngine:
    @pytest.mark.parametrize("backend", ["python", "auto"])
    def test_random_small_instances(self, backend):
        # 25 instances here; the acceptance suite runs the full 200.
        rng = np.random.default_rng(99)
        for _ in range(25):
            workload = random_instance(rng)
            for policy in ALL_POLICIES:
                exact = completions_by_id(simulate(workload, policy,
                                                   backend=backend))
                approx = completions_by_id(discretized_run(workload, policy,
                                                           dt=1e-3))
                for job_id, value in exact.items():
                    assert approx[job_id] == pytest.approx(value, abs=1e-2), (
                        f"{policy}: job {job_id}"
                    )
