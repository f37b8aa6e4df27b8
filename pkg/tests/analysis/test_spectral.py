"""Unit tests for the power method and eigenvalue estimates."""

import numpy as np
import pytest

from dist_pagerank.analysis.spectral import (
    average_second_eigen_bound,
    power_method,
    second_eigen_modulus,
)
from dist_pagerank.errors import NonConvergenceError
from dist_pagerank.graph.generator import random_web
from dist_pagerank.graph.webgraph import apply_google, link_matrix


class TestPowerMethod:
    """Test the centralized power method."""

    def test_four_page_web(self, web4_link, web4_rounded):
        """Test the three-decimal PageRank values of the four-page web."""
        result = power_method(web4_link, 0.15, tol=1e-10)
        np.testing.assert_allclose(result.x_star, web4_rounded, atol=5e-4)
        assert result.x_star.sum() == pytest.approx(1.0, abs=1e-12)
        assert result.residual <= 1e-9

    def test_page_one_ranks_highest(self, web4_x_star):
        """Test that the page linked from all others ranks first."""
        assert int(np.argmax(web4_x_star)) == 1
        assert int(np.argmin(web4_x_star)) == 0

    def test_fixed_point(self, web4_link, web4_x_star):
        """Test that the result is a fixed point of M."""
        np.testing.assert_allclose(
            apply_google(web4_link, 0.15, web4_x_star), web4_x_star, atol=1e-12
        )

    def test_custom_start(self, web4_link):
        """Test that the limit does not depend on the start vector."""
        start = np.array([1.0, 0.0, 0.0, 0.0])
        a = power_method(web4_link, 0.15, x0=start, tol=1e-13).x_star
        b = power_method(web4_link, 0.15, tol=1e-13).x_star
        np.testing.assert_allclose(a, b, atol=1e-11)

    def test_iteration_cap(self, web4_link):
        """Test that reaching the cap raises with the last iterate attached."""
        with pytest.raises(NonConvergenceError, match="after 2 iterations") as exc_info:
            power_method(web4_link, 0.15, tol=1e-15, max_iter=2)
        assert exc_info.value.iterations == 2
        assert exc_info.value.last_iterate is not None

    def test_rejects_non_positive_tolerance(self, web4_link):
        """Test tolerance validation."""
        with pytest.raises(ValueError, match="tol"):
            power_method(web4_link, 0.15, tol=0.0)

    def test_matches_dense_solve(self):
        """Test against solving (I - (1-m)A) x = (m/n) 1 directly."""
        link = link_matrix(random_web(5, seed=3, min_deg=1, max_deg=2))
        expected = np.linalg.solve(np.eye(5) - 0.85 * link.to_dense(), np.full(5, 0.15 / 5))
        result = power_method(link, 0.15, tol=1e-14)
        np.testing.assert_allclose(result.x_star, expected, atol=1e-10)


class TestSecondEigenvalue:
    """Test the second eigenvalue estimate."""

    def test_two_cycle_attains_bound(self, two_cycle):
        """Test that the periodic two-cycle has |lambda_2| = 1 - m."""
        link = link_matrix(two_cycle)
        x_star = power_method(link, 0.15, tol=1e-14).x_star
        assert second_eigen_modulus(link, 0.15, x_star) == pytest.approx(0.85, abs=1e-8)

    def test_matches_dense_eigenvalues(self):
        """Test the estimate against numpy on a random web."""
        link = link_matrix(random_web(30, seed=11, hub_count=2, min_deg=1, max_deg=4))
        x_star = power_method(link, 0.15, tol=1e-14).x_star
        dense = 0.85 * link.to_dense() + 0.15 / 30
        moduli = np.sort(np.abs(np.linalg.eigvals(dense)))[::-1]
        assert second_eigen_modulus(link, 0.15, x_star) == pytest.approx(moduli[1], abs=1e-6)

    def test_below_damping_bound(self, web4_link, web4_x_star):
        """Test that |lambda_2| <= 1 - m on the four-page web."""
        assert 0.0 < second_eigen_modulus(web4_link, 0.15, web4_x_star) <= 0.85 + 1e-8

    @pytest.mark.parametrize("n", [5, 12, 25, 50])
    @pytest.mark.parametrize("m", [0.15, 0.5, 0.99])
    def test_dense_spectrum_within_damping_bound(self, n, m):
        """Test |lambda_2(M)| <= 1 - m on generated webs up to 50 pages."""
        hubs = 1 if n >= 10 else 0
        for seed in range(3):
            link = link_matrix(random_web(n, seed=seed, hub_count=hubs, min_deg=1, max_deg=3))
            dense = (1 - m) * link.to_dense() + m / n
            moduli = np.sort(np.abs(np.linalg.eigvals(dense)))[::-1]
            assert moduli[0] == pytest.approx(1.0, abs=1e-10)
            assert moduli[1] <= 1 - m + 1e-10

    def test_heavy_damping(self, web4_link):
        """Test that m = 0.99 leaves |lambda_2| at most 0.01."""
        x_star = power_method(web4_link, 0.99, tol=1e-14).x_star
        assert second_eigen_modulus(web4_link, 0.99, x_star) <= 0.01 + 1e-8


class TestAverageEigenBound:
    """Test the bound for the simultaneous-update average matrix."""

    def test_alpha_one(self):
        """Test that alpha = 1 gives 1 - m."""
        assert average_second_eigen_bound(0.15, 1.0) == pytest.approx(0.85)

    def test_decreasing_in_alpha(self):
        """Test monotonicity over a grid of alphas."""
        values = [average_second_eigen_bound(0.15, a) for a in np.linspace(0.01, 1.0, 50)]
        assert all(b < a for a, b in zip(values, values[1:]))
