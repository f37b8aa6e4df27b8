"""Tests for the command line entry point."""

import json

import pytest

from dist_pagerank.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, run_cli
from dist_pagerank.errors import NonConvergenceError
from dist_pagerank.graph.loader import load_edge_list_file
from dist_pagerank.harness.experiments import EXAMPLE_WEB
from dist_pagerank.harness.verify import CheckResult


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    """Run every command from an empty directory without settings variables."""
    for name in ("WORKERS", "LOG_LEVEL", "SAMPLE_EVERY", "REFERENCE_TOL"):
        monkeypatch.delenv(f"DIST_PAGERANK_{name}", raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def web4_file(tmp_path):
    """Write the four-page web to an edge-list file."""
    path = tmp_path / "web4.txt"
    path.write_text(EXAMPLE_WEB, encoding="utf-8")
    return str(path)


class TestSolve:
    """Test the solve command."""

    def test_prints_pagerank(self, web4_file, capsys):
        """Test the three-decimal PageRank line."""
        assert run_cli(["solve", "--graph", web4_file]) == EXIT_OK
        assert "x* = [0.119, 0.331, 0.260, 0.289]" in capsys.readouterr().out

    def test_writes_values(self, web4_file, tmp_path):
        """Test the page,value output file."""
        out = tmp_path / "x.csv"
        assert run_cli(["solve", "--graph", web4_file, "--out", str(out)]) == EXIT_OK
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "page,value"
        assert len(lines) == 5


class TestSimulationCommands:
    """Test the scheme commands."""

    def test_single_csv_to_stdout(self, web4_file, capsys):
        """Test the trace CSV on stdout."""
        argv = ["sim-single", "--graph", web4_file, "--steps", "100", "--sample-every", "10"]
        assert run_cli(argv) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,err_l1,err_linf,sum_y,ms_bound"
        assert len(lines) == 12

    def test_simul_json(self, web4_file, capsys):
        """Test JSON output with the run parameters."""
        argv = ["sim-simul", "--graph", web4_file, "--steps", "50", "--alpha", "0.3"]
        argv += ["--seed", "5", "--format", "json"]
        assert run_cli(argv) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["meta"]["scheme"] == "simul"
        assert data["meta"]["alpha"] == 0.3
        assert data["meta"]["seed"] == 5

    def test_terminate_writes_companion_file(self, web4_file, tmp_path):
        """Test that termination times go next to the trace."""
        out = tmp_path / "term.csv"
        argv = ["sim-terminate", "--graph", web4_file, "--delta", "0.5", "--ns", "1"]
        argv += ["--steps", "1000", "--out", str(out)]
        assert run_cli(argv) == EXIT_OK
        assert out.exists()
        assert (tmp_path / "term_term.csv").exists()

    def test_async(self, web4_file, capsys):
        """Test that the asynchronous run reports convergence."""
        argv = ["sim-async", "--graph", web4_file, "--steps", "100000", "--format", "json"]
        assert run_cli(argv) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["meta"]["converged_at"] is not None

    def test_consensus(self, web4_file, capsys):
        """Test a consensus run from explicit initial values."""
        argv = ["consensus", "--graph", web4_file, "--x0", "1", "0", "0", "0"]
        argv += ["--steps", "100000", "--format", "json"]
        assert run_cli(argv) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["meta"]["scheme"] == "consensus"

    def test_mc_summary(self, web4_file, capsys):
        """Test the Monte Carlo summary CSV."""
        argv = ["mc", "--graph", web4_file, "--runs", "2", "--steps", "50"]
        argv += ["--sample-every", "10"]
        assert run_cli(argv) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,mean_sq_error,sq_error_var,ms_bound"
        assert len(lines) == 7


class TestVerify:
    """Test the verify command."""

    def test_example_web_passes(self, web4_file, capsys):
        """Test the table and the exit code on the example web."""
        assert run_cli(["verify", "--graph", web4_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "FAIL" not in out

    def test_failure_exit_code(self, web4_file, mocker, capsys):
        """Test that a failed check exits with 1."""
        mocker.patch(
            "dist_pagerank.cli.run_checks",
            return_value=[CheckResult(name="broken", passed=False, detail="gap 1e-3")],
        )
        assert run_cli(["verify", "--graph", web4_file]) == EXIT_FAILED
        assert "broken  FAIL  gap 1e-3" in capsys.readouterr().out


class TestGenerate:
    """Test the generate command."""

    def test_writes_edge_list(self, tmp_path):
        """Test that the written graph loads back."""
        out = tmp_path / "web.txt"
        argv = ["generate", "--n", "20", "--hubs", "1", "--max-deg", "4", "--seed", "3"]
        assert run_cli(argv + ["--out", str(out)]) == EXIT_OK
        graph = load_edge_list_file(out)
        assert graph.n == 20
        assert not graph.dangling_pages()


class TestErrors:
    """Test exit codes on bad input."""

    def test_missing_command(self):
        """Test that argparse usage errors exit with 2."""
        assert run_cli([]) == EXIT_USAGE

    def test_missing_file(self, tmp_path, capsys):
        """Test that an unreadable graph exits with 2."""
        assert run_cli(["solve", "--graph", str(tmp_path / "none.txt")]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_malformed_edge_list(self, tmp_path, capsys):
        """Test that parse errors exit with 2."""
        path = tmp_path / "bad.txt"
        path.write_text("0 1\n1 x\n", encoding="utf-8")
        assert run_cli(["solve", "--graph", str(path)]) == EXIT_USAGE
        assert "line 2" in capsys.readouterr().err

    def test_invalid_parameter(self, web4_file, capsys):
        """Test that an out-of-range damping exits with 2."""
        assert run_cli(["sim-single", "--graph", web4_file, "--m", "1.5"]) == EXIT_USAGE
        assert "invalid m" in capsys.readouterr().err

    @pytest.mark.parametrize("m", ["1.5", "-0.2", "0"])
    def test_solve_rejects_damping(self, web4_file, capsys, m):
        """Test that solve checks 0 < m < 1 before iterating."""
        assert run_cli(["solve", "--graph", web4_file, "--m", m]) == EXIT_USAGE
        captured = capsys.readouterr()
        assert "invalid m" in captured.err
        assert "x* =" not in captured.out

    @pytest.mark.parametrize("command", ["sim-single", "sim-simul", "sim-async", "consensus"])
    def test_rejects_non_positive_steps(self, web4_file, capsys, command):
        """Test that a step count below one exits with 2."""
        assert run_cli([command, "--graph", web4_file, "--steps", "-5"]) == EXIT_USAGE
        assert "invalid steps" in capsys.readouterr().err

    def test_invalid_environment(self, web4_file, monkeypatch):
        """Test that bad settings exit with 2."""
        monkeypatch.setenv("DIST_PAGERANK_WORKERS", "0")
        assert run_cli(["solve", "--graph", web4_file]) == EXIT_USAGE

    def test_non_convergence(self, web4_file, mocker):
        """Test that a run that cannot complete exits with 1."""
        mocker.patch(
            "dist_pagerank.cli.power_method",
            side_effect=NonConvergenceError("no convergence", iterations=10),
        )
        assert run_cli(["solve", "--graph", web4_file]) == EXIT_FAILED
