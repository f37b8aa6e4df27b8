"""Unit tests for randomized averaging consensus."""

import numpy as np
import pytest

from dist_pagerank.builders.update_matrices import single_update_matrix
from dist_pagerank.errors import GraphValidationError, MatrixValidationError
from dist_pagerank.graph.webgraph import WebGraph
from dist_pagerank.schemes.consensus import (
    ConsensusPattern,
    consensus_matrices,
    consensus_step,
    disagreement_ranges,
    require_strongly_connected,
    simulate_consensus,
    transposed_contraction,
)

WEB4_CONSENSUS = [
    [[1 / 2, 0, 0, 1 / 2], [1 / 2, 1 / 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[1, 0, 0, 0], [1 / 4, 1 / 4, 1 / 4, 1 / 4], [0, 1 / 2, 1 / 2, 0], [0, 1 / 2, 0, 1 / 2]],
    [[1, 0, 0, 0], [0, 1 / 2, 1 / 2, 0], [0, 1 / 3, 1 / 3, 1 / 3], [0, 0, 1 / 2, 1 / 2]],
    [[1 / 2, 0, 0, 1 / 2], [0, 1 / 2, 0, 1 / 2], [0, 0, 1 / 2, 1 / 2], [0, 1 / 3, 1 / 3, 1 / 3]],
]


class TestConsensusMatrices:
    """Test construction of the averaging matrices."""

    def test_four_page_web(self, web4):
        """Test the hand-derived matrices of the four-page web."""
        pattern = consensus_matrices(web4)
        assert pattern.d == 4 and pattern.n == 4
        np.testing.assert_allclose(pattern.matrices, np.array(WEB4_CONSENSUS), atol=1e-15)

    def test_two_cycle(self, two_cycle):
        """Test that both pages average the pair."""
        pattern = consensus_matrices(two_cycle)
        for matrix in pattern.matrices:
            np.testing.assert_allclose(matrix, [[0.5, 0.5], [0.5, 0.5]])

    def test_row_stochastic_not_column_stochastic(self, web4, web4_link):
        """Test the orientation against the PageRank update matrices."""
        consensus = consensus_matrices(web4).matrices[0]
        pagerank = single_update_matrix(web4_link, 0)
        np.testing.assert_allclose(consensus.sum(axis=1), 1.0)
        assert not np.allclose(consensus.sum(axis=0), 1.0)
        np.testing.assert_allclose(pagerank.sum(axis=0), 1.0)

    def test_average_covers_links(self, web4):
        """Test a positive diagonal and a positive entry for every link."""
        average = consensus_matrices(web4).average()
        assert (np.diag(average) > 0).all()
        for src, dst in web4.edges():
            assert average[dst, src] > 0

    def test_matrices_read_only(self, web4):
        """Test that the stored matrices cannot be modified."""
        pattern = consensus_matrices(web4)
        with pytest.raises(ValueError):
            pattern.matrices[0, 0, 0] = 1.0

    def test_requires_strong_connectivity(self):
        """Test that an unreachable page is rejected."""
        graph = WebGraph(3, [[1], [2], [1]])
        with pytest.raises(GraphValidationError, match="strongly connected"):
            consensus_matrices(graph)
        with pytest.raises(GraphValidationError):
            require_strongly_connected(graph)


class TestConsensusPattern:
    """Test validation of user-supplied matrices."""

    def test_rejects_bad_rows(self):
        """Test that rows must sum to one."""
        with pytest.raises(MatrixValidationError, match="rows"):
            ConsensusPattern([[[0.5, 0.4], [0.5, 0.5]]])

    def test_rejects_zero_diagonal(self):
        """Test that diagonals must be positive."""
        with pytest.raises(MatrixValidationError, match="diagonal"):
            ConsensusPattern([[[0.0, 1.0], [0.5, 0.5]]])

    def test_rejects_non_square(self):
        """Test that matrices must be square."""
        with pytest.raises(MatrixValidationError, match="square"):
            ConsensusPattern([np.ones((2, 3)) / 3])


class TestConsensusStep:
    """Test the sparse consensus update."""

    def test_matches_matrices(self, web4, rng):
        """Test the O(deg) update against the dense matrices."""
        pattern = consensus_matrices(web4)
        for _ in range(10):
            x = rng.random(4)
            for page in range(4):
                np.testing.assert_allclose(
                    consensus_step(web4, x, page), pattern.matrices[page] @ x, atol=1e-15
                )

    def test_ring_with_chords(self, rng):
        """Test the update on a larger strongly connected graph."""
        graph = WebGraph(12, [[(i + 1) % 12, (i + 5) % 12] for i in range(12)])
        pattern = consensus_matrices(graph)
        x = rng.random(12)
        for page in (0, 7, 11):
            np.testing.assert_allclose(
                consensus_step(graph, x, page), pattern.matrices[page] @ x, atol=1e-14
            )


class TestSimulateConsensus:
    """Test consensus runs."""

    def test_constant_start(self, web4):
        """Test that agreement at the start stops at step 0."""
        trace = simulate_consensus(web4, np.full(4, 0.3), seed=0, steps=100)
        assert trace.meta.converged_at == 0
        assert trace.samples[-1].err_linf == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_reaches_agreement(self, web4, seed):
        """Test convergence from a unit vector."""
        x0 = np.array([1.0, 0.0, 0.0, 0.0])
        trace = simulate_consensus(web4, x0, seed=seed, steps=100_000, tol=1e-8)
        assert trace.meta.converged_at is not None
        assert np.ptp(trace.final_x) <= 1e-8
        assert 0.0 <= trace.final_x.mean() <= 1.0

    def test_range_contracts(self, web4):
        """Test that min never decreases and max never increases."""
        trace = simulate_consensus(
            web4, np.array([1.0, 0.0, 0.5, 0.2]), seed=4, steps=500, keep_states=True
        )
        ranges = disagreement_ranges(trace.states)
        assert (np.diff(ranges[:, 0]) >= -1e-15).all()
        assert (np.diff(ranges[:, 1]) <= 1e-15).all()

    def test_rejects_wrong_length(self, web4):
        """Test the initial vector length check."""
        with pytest.raises(ValueError, match="shape"):
            simulate_consensus(web4, np.zeros(3), seed=0, steps=10)


class TestTransposedContraction:
    """Test contraction of consensus products."""

    def test_long_product_contracts(self, web4, rng):
        """Test that many random patterns shrink the disagreement."""
        pattern = consensus_matrices(web4)
        modes = rng.integers(0, 4, size=200)
        report = transposed_contraction(pattern, modes)
        assert report.product_tau <= report.factor_bound + 1e-10
        assert report.product_tau < 0.5

    def test_single_factor(self, web4):
        """Test that one factor reports its own coefficient."""
        pattern = consensus_matrices(web4)
        report = transposed_contraction(pattern, [1])
        assert report.product_tau == pytest.approx(report.factor_taus[0])
