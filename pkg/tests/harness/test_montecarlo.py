"""Unit tests for Monte Carlo mean-square runs."""

import numpy as np
import pytest

from dist_pagerank.analysis.spectral import power_method
from dist_pagerank.config import SchemeParams
from dist_pagerank.graph.webgraph import uniform_vector
from dist_pagerank.harness.montecarlo import mc_mean_square
from dist_pagerank.schemes.state import Scheme


class TestMCMeanSquare:
    """Test mc_mean_square."""

    def test_repeated_stream_has_no_variance(self, web4):
        """Test that two runs on the same stream agree exactly."""
        summary = mc_mean_square(
            Scheme.SINGLE, web4, SchemeParams(seed=1), 2, 200, sample_every=20, streams=[0, 0]
        )
        assert summary.sq_error_var == [0.0] * len(summary.ks)

    def test_start_error(self, web4, web4_link):
        """Test that every run starts at the uniform vector."""
        summary = mc_mean_square(Scheme.SIMUL, web4, SchemeParams(alpha=0.5), 3, 50, 10)
        x_star = power_method(web4_link, 0.15, tol=1e-12).x_star
        expected = float(((uniform_vector(4) - x_star) ** 2).sum())
        assert summary.ks[0] == 0
        assert summary.mean_sq_error[0] == pytest.approx(expected)
        assert summary.sq_error_var[0] == pytest.approx(0.0, abs=1e-20)

    def test_summary_layout(self, web4):
        """Test lengths, streams and the bound column."""
        summary = mc_mean_square(Scheme.SINGLE, web4, SchemeParams(seed=7), 3, 100, 25)
        assert summary.ks == [0, 25, 50, 75, 100]
        assert summary.streams == [0, 1, 2]
        assert summary.seed_base == 7
        assert len(summary.mean_sq_error) == len(summary.ms_bound) == 5
        assert all(b > 0 for b in summary.ms_bound)

    def test_worker_count_does_not_change_result(self, web4):
        """Test that process-parallel runs reduce to the in-process result."""
        params = SchemeParams(alpha=0.5, seed=3)
        serial = mc_mean_square(Scheme.SIMUL, web4, params, 3, 100, 20, workers=1)
        parallel = mc_mean_square(Scheme.SIMUL, web4, params, 3, 100, 20, workers=2)
        assert serial.mean_sq_error == parallel.mean_sq_error
        assert serial.sq_error_var == parallel.sq_error_var

    def test_rejects_unsupported_scheme(self, web4):
        """Test that only the two time-averaged schemes are accepted."""
        with pytest.raises(ValueError, match="support"):
            mc_mean_square(Scheme.ASYNC, web4, SchemeParams(), 2, 10)

    def test_rejects_single_run(self, web4):
        """Test the run count check."""
        with pytest.raises(ValueError, match="at least 2 runs"):
            mc_mean_square(Scheme.SINGLE, web4, SchemeParams(), 1, 10)

    def test_rejects_stream_mismatch(self, web4):
        """Test that explicit streams must match the run count."""
        with pytest.raises(ValueError, match="streams"):
            mc_mean_square(Scheme.SINGLE, web4, SchemeParams(), 3, 10, streams=[0, 1])

    @pytest.mark.slow
    def test_single_update_within_bound(self, web4):
        """Test the mean squared error against its bound over 200 runs."""
        summary = mc_mean_square(
            Scheme.SINGLE, web4, SchemeParams(seed=11), 200, 20_000, sample_every=1000
        )
        assert (np.array(summary.mean_sq_error) <= np.array(summary.ms_bound)).all()

    @pytest.mark.slow
    def test_simultaneous_error_order_one_over_k(self, web4):
        """Test the order 1/k decay between k = 4000 and k = 16000."""
        summary = mc_mean_square(
            Scheme.SIMUL, web4, SchemeParams(alpha=0.5, seed=12), 200, 16_000, sample_every=4000
        )
        mean = dict(zip(summary.ks, summary.mean_sq_error))
        assert mean[16_000] < 0.7 * mean[4000]
        assert all(e <= b for e, b in zip(summary.mean_sq_error, summary.ms_bound))
