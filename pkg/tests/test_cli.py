import numpy as np
import pytest

from sizesched.cli import EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, main

FAST = ["--njobs", "50", "--reps-min", "2", "--reps-max", "8",
        "--ci-target", "0.99"]


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse reports usage errors this way
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsageErrors:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--help"])
        assert info.value.code == 0
        assert "--policy" in capsys.readouterr().out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0

    @pytest.mark.parametrize("argv", [
        ["--policy", "edf"],
        ["--njobs", "0"],
        ["--sweep", "sigma"],                      # missing --values
        ["--values", "1,2"],                       # missing --sweep
        ["--sweep", "priority", "--values", "1"],  # unknown axis
        ["--values", "a,b", "--sweep", "sigma"],
        ["--per-job"],                             # needs --out
        ["--size-dist", "pareto"],                 # needs --alpha
        ["--alpha", "2.0"],                        # only with pareto
        ["--target-load", "0.5"],                  # needs --trace
        ["--ci-target", "0"],
        ["--reps-min", "5", "--reps-max", "2"],
    ])
    def test_bad_invocations(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == EXIT_USAGE
        assert err != ""


class TestBasicRuns:
    def test_summary_on_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "--policy", "ps", *FAST)
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0].startswith("njobs,")
        assert ",ps," in lines[1]

    def test_default_policy_is_fspe_ps(self, capsys):
        code, out, _ = run_cli(capsys, *FAST)
        assert code == EXIT_OK
        assert ",fspe+ps," in out

    def test_multiple_policies_and_ratios(self, capsys):
        code, out, _ = run_cli(capsys, "--policy", "ps", "--policy", "srpt",
                               *FAST)
        assert code == EXIT_OK
        header = out.strip().splitlines()[0]
        assert "vs_ps" in header and "vs_srpt" in header

    def test_out_directory(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "--policy", "fifo", "--out",
                               str(tmp_path), *FAST)
        assert code == EXIT_OK
        summary = tmp_path / "summary.csv"
        assert summary.exists()
        assert str(summary) in out

    def test_per_job_files(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "--policy", "fifo", "--out",
                             str(tmp_path), "--per-job", *FAST)
        assert code == EXIT_OK
        assert (tmp_path / "jobs" / "jobs_fifo_rep0000.csv").exists()
        assert (tmp_path / "jobs" / "jobs_fifo_rep0001.csv").exists()

    def test_not_converged_exit_code(self, capsys):
        code, out, err = run_cli(capsys, "--policy", "ps", "--njobs", "30",
                                 "--reps-min", "2", "--reps-max", "2",
                                 "--ci-target", "1e-9")
        assert code == EXIT_NOT_CONVERGED
        assert "converge" in err.lower()
        assert out != ""  # results still written

    def test_python_backend_flag(self, capsys):
        code, out, _ = run_cli(capsys, "--policy", "ps", "--backend",
                               "python", *FAST)
        assert code == EXIT_OK

    def test_stdout_reproducible(self, capsys):
        argv = ["--policy", "fspe+ps", "--seed", "3", *FAST]
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second


class TestSweepRuns:
    def test_sigma_sweep(self, capsys):
        code, out, _ = run_cli(capsys, "--policy", "ps", "--sweep", "sigma",
                               "--values", "0.5,1.0", *FAST)
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("0.5,") or ",0.5," in lines[1]

    def test_njobs_sweep_parses_ints(self, capsys):
        code, out, _ = run_cli(capsys, "--policy", "fifo", "--sweep", "njobs",
                               "--values", "10,20", "--reps-min", "2",
                               "--reps-max", "20", "--ci-target", "0.99")
        assert code == EXIT_OK

    def test_sweep_out_subdirectories(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "--policy", "fifo", "--sweep", "sigma",
                             "--values", "0.5,1.0", "--out", str(tmp_path),
                             "--per-job", *FAST)
        assert code == EXIT_OK
        jobs = tmp_path / "jobs"
        assert (jobs / "sigma_0.5" / "jobs_fifo_rep0000.csv").exists()
        assert (jobs / "sigma_1" / "jobs_fifo_rep0000.csv").exists()


class TestTraceRuns:
    @pytest.fixture()
    def trace_file(self, tmp_path):
        rng = np.random.default_rng(0)
        path = tmp_path / "trace.txt"
        lines = [f"{t:.6f} {s:.6f}"
                 for t, s in zip(np.sort(rng.uniform(0, 40, 40)),
                                 rng.uniform(0.2, 2.0, 40))]
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_trace_run(self, capsys, trace_file):
        code, out, _ = run_cli(capsys, "--trace", str(trace_file),
                               "--policy", "ps", "--reps-min", "2",
                               "--reps-max", "2")
        assert code == EXIT_OK
        assert "trace" in out.splitlines()[0]

    def test_trace_with_target_load(self, capsys, trace_file):
        code, _, _ = run_cli(capsys, "--trace", str(trace_file),
                             "--target-load", "0.5", "--policy", "ps",
                             "--reps-min", "2", "--reps-max", "2")
        assert code == EXIT_OK

    def test_missing_trace_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "--trace", str(tmp_path / "nope.txt"))
        assert code == EXIT_USAGE
        assert err != ""
