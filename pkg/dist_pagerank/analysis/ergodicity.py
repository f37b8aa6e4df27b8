"""Coefficient of ergodicity and contraction checks for stochastic matrices.

All matrices here are dense and column-stochastic. Row-stochastic matrices
(consensus) are transposed by the caller.
"""

from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel

from ..builders.averages import average_matrix_single
from ..builders.update_matrices import modified_matrix, require_dense, single_update_matrix
from ..errors import ConsistencyError, MatrixValidationError
from ..graph.webgraph import LinkMatrix
from ..schemes.damping import rescaled_damping_single

STOCHASTIC_TOL = 1e-9
BOUND_SLACK = 1e-10
DENSE_ANALYSIS_LIMIT = 200


class ProductReport(BaseModel):
    """Contraction of a backward product ``P(k) ... P(0)``."""

    factor_taus: List[float]
    product_tau: float
    factor_bound: float
    column_spread: float


class ModifiedBoundsReport(BaseModel):
    """Ergodicity coefficients of the single-update modified matrices."""

    mhat: float
    bound: float
    factor_taus: List[float]
    average_tau: float


def validate_column_stochastic(matrix: np.ndarray, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """Return ``matrix`` as a float array after checking it is column-stochastic.

    Raises:
        MatrixValidationError: If it is not square, has negative entries or a
            column sum away from 1
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MatrixValidationError(f"expected a square matrix, got shape {matrix.shape}")
    if np.any(matrix < -tol):
        raise MatrixValidationError("stochastic matrix has negative entries")
    if np.any(np.abs(matrix.sum(axis=0) - 1.0) > tol):
        raise MatrixValidationError("matrix columns do not sum to 1")
    return matrix


def _tau_with_pair(matrix: np.ndarray) -> Tuple[float, int, int]:
    best, pair = 0.0, (0, 0)
    for i in range(matrix.shape[1]):
        spread = np.abs(matrix - matrix[:, [i]]).sum(axis=0)
        j = int(spread.argmax())
        if spread[j] > best:
            best, pair = float(spread[j]), (i, j)
    return 0.5 * best, pair[0], pair[1]


def ergodicity_coefficient(matrix: np.ndarray) -> float:
    """Half the largest l1 distance between two columns; in ``[0, 1]``."""
    matrix = validate_column_stochastic(matrix)
    return _tau_with_pair(matrix)[0]


def product_contraction_check(factors: Sequence[np.ndarray]) -> ProductReport:
    """Check submultiplicativity on the backward product of ``factors``.

    ``factors[0]`` is applied first. The column spread of the product (largest
    row-wise gap between its entries) measures how far the columns are from
    coalescing.

    Raises:
        MatrixValidationError: On an empty sequence or mismatched dimensions
        ConsistencyError: If the product's coefficient exceeds the product of
            the factors' coefficients
    """
    if not factors:
        raise MatrixValidationError("need at least one factor")
    validated = [validate_column_stochastic(p) for p in factors]
    n = validated[0].shape[0]
    if any(p.shape != (n, n) for p in validated):
        raise MatrixValidationError("all factors must have the same dimension")

    product = np.eye(n)
    for factor in validated:
        product = factor @ product

    taus = [_tau_with_pair(p)[0] for p in validated]
    product_tau = _tau_with_pair(product)[0]
    factor_bound = float(np.prod(taus))
    if product_tau > factor_bound + BOUND_SLACK:
        raise ConsistencyError(
            f"product coefficient {product_tau:.3e} exceeds factor bound {factor_bound:.3e}"
        )
    spread = float((product.max(axis=1) - product.min(axis=1)).max())
    return ProductReport(
        factor_taus=taus, product_tau=product_tau, factor_bound=factor_bound, column_spread=spread
    )


def variational_check(matrix: np.ndarray, trials: int, rng: np.random.Generator) -> bool:
    """Check the coefficient as a bound on ``||Px||_1`` over zero-sum unit vectors.

    Random zero-sum vectors with ``||x||_1 = 1`` must satisfy
    ``||Px||_1 <= tau(P)``, and ``x = (e_i - e_j)/2`` at the maximizing column
    pair must attain it.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    matrix = validate_column_stochastic(matrix)
    n = matrix.shape[0]
    tau, i, j = _tau_with_pair(matrix)

    for _ in range(trials):
        x = rng.standard_normal(n)
        x -= x.mean()
        norm = np.abs(x).sum()
        if norm == 0.0:
            continue
        if np.abs(matrix @ (x / norm)).sum() > tau + BOUND_SLACK:
            return False

    extreme = np.zeros(n)
    extreme[i] += 0.5
    extreme[j] -= 0.5
    return bool(abs(np.abs(matrix @ extreme).sum() - tau) <= 1e-12)


def mean_square_bound(mhat: float, k: int) -> float:
    """Bound ``4(2+mhat) / (mhat(k+1))`` on ``E||y(k) - x*||^2`` for the stochastic schemes."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return 4.0 * (2.0 + mhat) / (mhat * (k + 1))


def modified_matrix_bounds(link: LinkMatrix, m: float) -> ModifiedBoundsReport:
    """Check ``tau(M_i) <= 1 - mhat`` for every single-update matrix and for their mean.

    Raises:
        ConsistencyError: If a coefficient exceeds the bound
    """
    require_dense(link.n, DENSE_ANALYSIS_LIMIT)
    mhat = rescaled_damping_single(m, link.n)
    bound = 1.0 - mhat

    taus = [
        ergodicity_coefficient(modified_matrix(single_update_matrix(link, page), mhat))
        for page in range(link.n)
    ]
    average_tau = ergodicity_coefficient(modified_matrix(average_matrix_single(link), mhat))

    worst = max(max(taus), average_tau)
    if worst > bound + BOUND_SLACK:
        raise ConsistencyError(f"ergodicity coefficient {worst:.6f} exceeds 1 - mhat = {bound:.6f}")
    logger.debug(f"Modified matrices: max tau {worst:.6f} <= {bound:.6f}")
    return ModifiedBoundsReport(mhat=mhat, bound=bound, factor_taus=taus, average_tau=average_tau)
