"""Dense distributed link matrices.

The simulators never build these; they exist as oracles for the sparse
kernels and as inputs to the ergodicity toolkit.
"""

import numpy as np

from ..errors import CapacityError, MatrixValidationError
from ..graph.webgraph import LinkMatrix

DENSE_LIMIT = 2000


def require_dense(n: int, limit: int = DENSE_LIMIT) -> None:
    """Refuse dense construction above ``limit`` pages."""
    if n > limit:
        raise CapacityError(f"dense construction is limited to n <= {limit}, got n={n}")


def google_matrix_dense(link: LinkMatrix, m: float) -> np.ndarray:
    """Dense ``M = (1-m)A + (m/n)S``."""
    require_dense(link.n)
    return (1.0 - m) * link.to_dense() + m / link.n


def single_update_matrix(link: LinkMatrix, page: int) -> np.ndarray:
    """Dense link matrix for an update initiated by ``page`` alone.

    Row and column ``page`` copy ``A``; every other diagonal entry ``(l, l)``
    is ``1 - a_{page,l}``; all remaining entries are zero.
    """
    require_dense(link.n)
    if not 0 <= page < link.n:
        raise MatrixValidationError(f"page {page} outside [0, {link.n})")
    full = link.to_dense()
    matrix = np.diag(1.0 - full[page, :])
    matrix[page, :] = full[page, :]
    matrix[:, page] = full[:, page]
    return matrix


def pattern_matrix(link: LinkMatrix, pattern: np.ndarray) -> np.ndarray:
    """Dense link matrix for a set of simultaneously updating pages.

    Entry ``(i, j)`` is ``a_ij`` when ``i`` or ``j`` updates. A page ``j`` that
    does not update keeps ``1 - sum_h a_hj`` over updating ``h`` on the diagonal.
    """
    require_dense(link.n)
    flags = np.asarray(pattern, dtype=bool)
    if flags.shape != (link.n,):
        raise MatrixValidationError(f"pattern of shape {flags.shape} does not match n={link.n}")
    full = link.to_dense()
    matrix = full * (flags[:, None] | flags[None, :])
    idle = ~flags
    matrix[idle, idle] = 1.0 - full[flags, :][:, idle].sum(axis=0)
    return matrix


def modified_matrix(update: np.ndarray, mhat: float) -> np.ndarray:
    """Positive stochastic matrix ``(1-mhat) U + (mhat/n) S`` for a dense update matrix."""
    return (1.0 - mhat) * update + mhat / update.shape[0]
