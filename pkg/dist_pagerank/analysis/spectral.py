"""Power method, second-eigenvalue estimation and eigenvalue bounds."""

from typing import Any, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from ..errors import NonConvergenceError
from ..graph.webgraph import LinkMatrix, apply_google, uniform_vector


class PowerResult(BaseModel):
    """Converged PageRank vector of the centralized power method."""

    x_star: Any = Field(repr=False)
    iterations: int
    residual: float


def power_method(
    link: LinkMatrix,
    m: float,
    x0: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> PowerResult:
    """Iterate ``x <- Mx`` until the l1 step difference is at most ``tol``.

    Args:
        link: Link matrix
        m: Damping factor
        x0: Starting probability vector, uniform when omitted
        tol: Stopping threshold on ``||x(k+1) - x(k)||_1``
        max_iter: Iteration cap

    Returns:
        Probability vector, iteration count and l1 residual ``||Mx - x||_1``

    Raises:
        NonConvergenceError: If the cap is reached; carries the last iterate
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    x = uniform_vector(link.n) if x0 is None else np.array(x0, dtype=float)

    for iteration in range(1, max_iter + 1):
        nxt = apply_google(link, m, x)
        step = float(np.abs(nxt - x).sum())
        x = nxt
        if step <= tol:
            break
    else:
        raise NonConvergenceError(
            f"power method did not reach tol={tol:g}", iterations=max_iter, last_iterate=x
        )

    x = x / x.sum()
    residual = float(np.abs(apply_google(link, m, x) - x).sum())
    logger.debug(f"Power method converged in {iteration} iterations, residual {residual:.3e}")
    return PowerResult(x_star=x, iterations=iteration, residual=residual)


def second_eigen_modulus(
    link: LinkMatrix,
    m: float,
    x_star: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 50_000,
    block: int = 6,
) -> float:
    """Estimate ``|lambda_2(M)|``.

    Runs block power iteration on ``x -> Mx - (sum x) x_star``, which removes
    the eigenvalue 1 because ``1^T`` is a left eigenvector of ``M``, and reads
    the largest Ritz value modulus. The block handles complex and sign-paired
    eigenvalues of equal modulus. Intended for ``n <= 200``.

    Raises:
        NonConvergenceError: If successive estimates do not settle within ``tol``
    """
    n = link.n
    width = min(n, block)
    rng = np.random.default_rng(0)
    basis, _ = np.linalg.qr(rng.standard_normal((n, width)))
    estimate = np.inf

    for iteration in range(1, max_iter + 1):
        image = apply_google(link, m, basis) - np.outer(x_star, basis.sum(axis=0))
        ritz = np.linalg.eigvals(basis.T @ image)
        previous, estimate = estimate, float(np.abs(ritz).max())
        if abs(estimate - previous) < tol:
            logger.debug(f"|lambda_2| ~ {estimate:.10f} after {iteration} block iterations")
            return estimate
        basis, _ = np.linalg.qr(image)

    raise NonConvergenceError(
        "second eigenvalue estimate did not settle", iterations=max_iter, last_iterate=estimate
    )


def average_second_eigen_bound(m: float, alpha: float) -> float:
    """Bound ``(1-m) / (1 - m(1-alpha)^2)`` on the second eigenvalue modulus of the
    simultaneous-update average matrix; decreasing in ``alpha``."""
    return (1.0 - m) / (1.0 - m * (1.0 - alpha) ** 2)
