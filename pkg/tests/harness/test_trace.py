"""Unit tests for trace recording and trace files."""

import io
import json

import numpy as np
import pytest
from pydantic import ValidationError

from dist_pagerank.config import SchemeParams, TerminationParams
from dist_pagerank.harness.trace import (
    MCSummary,
    OutputFormat,
    SimTrace,
    TraceMeta,
    TraceRecorder,
    TraceSample,
    read_term_times_csv,
    read_trace_csv,
    save_trace,
    write_summary_csv,
    write_term_times_csv,
    write_trace_csv,
)
from dist_pagerank.schemes.single import simulate_single
from dist_pagerank.schemes.termination import run_with_termination


class TestTraceRecorder:
    """Test sampling and metrics."""

    def test_errors_against_reference(self):
        """Test l1 and l-inf errors of the estimate."""
        recorder = TraceRecorder(np.array([0.5, 0.5]))
        recorder.record(0, np.array([0.7, 0.3]), np.array([0.6, 0.4]))
        sample = recorder.samples[0]
        assert sample.err_l1 == pytest.approx(0.2)
        assert sample.err_linf == pytest.approx(0.1)
        assert sample.sum_y == pytest.approx(1.0)
        assert sample.ms_bound is None

    def test_disagreement_without_reference(self):
        """Test the spread metrics used for consensus."""
        recorder = TraceRecorder(None)
        values = np.array([1.0, 0.0, 0.5])
        recorder.record(0, values, values)
        assert recorder.samples[0].err_linf == pytest.approx(1.0)
        assert recorder.samples[0].err_l1 == pytest.approx(1.0)

    def test_off_grid_steps_skipped(self):
        """Test that only multiples of sample_every are stored unless forced."""
        recorder = TraceRecorder(np.zeros(1), sample_every=5)
        for k in range(12):
            recorder.record(k, np.zeros(1), np.zeros(1))
        recorder.record(12, np.zeros(1), np.zeros(1), force=True)
        assert [s.k for s in recorder.samples] == [0, 5, 10, 12]

    def test_rejects_bad_period(self):
        """Test the sampling period check."""
        with pytest.raises(ValueError, match="sample_every"):
            TraceRecorder(None, sample_every=0)


class TestSimTrace:
    """Test trace validation."""

    def test_first_sample_at_zero(self):
        """Test that traces must start at k=0."""
        sample = TraceSample(k=3, err_l1=0.0, err_linf=0.0, sum_y=1.0)
        with pytest.raises(ValidationError, match="k=0"):
            SimTrace(meta=TraceMeta(scheme="single", n=2), samples=[sample])

    def test_increasing_steps(self):
        """Test that sample steps must increase."""
        samples = [TraceSample(k=k, err_l1=0.0, err_linf=0.0, sum_y=1.0) for k in (0, 2, 2)]
        with pytest.raises(ValidationError, match="increasing"):
            SimTrace(meta=TraceMeta(scheme="single", n=2), samples=samples)


class TestTraceFiles:
    """Test CSV and JSON output."""

    def test_trace_csv_round_trip(self, web4):
        """Test that a written trace reads back unchanged."""
        trace = simulate_single(web4, SchemeParams(seed=1), 500, sample_every=50)
        buffer = io.StringIO()
        write_trace_csv(trace, buffer)
        assert buffer.getvalue().splitlines()[0] == "k,err_l1,err_linf,sum_y,ms_bound"
        buffer.seek(0)
        assert read_trace_csv(buffer) == trace.samples

    def test_rejects_foreign_header(self):
        """Test that a file with other columns is refused."""
        with pytest.raises(ValueError, match="header"):
            read_trace_csv(io.StringIO("a,b\n1,2\n"))

    def test_term_times_csv(self):
        """Test that pages that never froze are written empty."""
        buffer = io.StringIO()
        write_term_times_csv([12, None, 3], buffer)
        assert buffer.getvalue() == "page,term_k\n0,12\n1,\n2,3\n"
        buffer.seek(0)
        assert read_term_times_csv(buffer) == [12, None, 3]

    def test_summary_csv(self):
        """Test the Monte Carlo summary layout."""
        summary = MCSummary(
            scheme="single",
            runs=2,
            seed_base=0,
            streams=[0, 1],
            ks=[0, 10],
            mean_sq_error=[0.5, 0.25],
            sq_error_var=[0.0, 0.01],
            ms_bound=[100.0, 10.0],
        )
        buffer = io.StringIO()
        write_summary_csv(summary, buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "k,mean_sq_error,sq_error_var,ms_bound"
        assert lines[2] == "10,0.25,0.01,10.0"

    def test_save_csv_with_term_times(self, web4, tmp_path):
        """Test that a terminating run also writes its termination times."""
        trace = run_with_termination(
            web4, SchemeParams(alpha=0.5, seed=1), TerminationParams(delta=0.5, ns=1), 1000
        )
        written = save_trace(trace, tmp_path / "run.csv")
        assert written == [tmp_path / "run.csv", tmp_path / "run_term.csv"]
        with open(written[1], encoding="utf-8") as handle:
            assert read_term_times_csv(handle) == trace.term_times

    def test_save_json(self, web4, tmp_path):
        """Test that JSON output carries the meta block but no state vectors."""
        trace = simulate_single(web4, SchemeParams(seed=2), 100, sample_every=10)
        path = tmp_path / "run.json"
        save_trace(trace, path, OutputFormat.JSON)
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["meta"]["scheme"] == "single"
        assert data["meta"]["seed"] == 2
        assert len(data["samples"]) == len(trace.samples)
        assert "states" not in data and "final_y" not in data
