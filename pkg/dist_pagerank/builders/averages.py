"""Average link matrices, pattern sums and frozen-page blocks."""

import itertools
import math
from typing import Tuple

import numpy as np
from loguru import logger

from ..errors import CapacityError, ConsistencyError
from ..graph.webgraph import LinkMatrix
from .update_matrices import (
    google_matrix_dense,
    pattern_matrix,
    require_dense,
    single_update_matrix,
)

IDENTITY_TOL = 1e-12
BRUTE_FORCE_LIMIT = 12
BINOMIAL_LIMIT = 64


def average_matrix_single(link: LinkMatrix) -> np.ndarray:
    """Mean of the single-page update matrices under uniform page choice.

    The enumerated mean is checked against ``(2/n)A + ((n-2)/n)I``.

    Raises:
        ConsistencyError: If enumeration and closed form disagree
    """
    require_dense(link.n)
    n = link.n
    average = sum(single_update_matrix(link, page) for page in range(n)) / n
    closed = (2.0 / n) * link.to_dense() + ((n - 2.0) / n) * np.eye(n)
    gap = float(np.abs(average - closed).max())
    if gap > IDENTITY_TOL:
        raise ConsistencyError(f"single-update average deviates from closed form by {gap:.3e}")
    return average


def average_matrix_simul_closed(link: LinkMatrix, alpha: float) -> np.ndarray:
    """Mean pattern matrix ``[1-(1-a)^2] A + (1-a)^2 I`` for update probability ``alpha``."""
    require_dense(link.n)
    idle_pair = (1.0 - alpha) ** 2
    return (1.0 - idle_pair) * link.to_dense() + idle_pair * np.eye(link.n)


def average_matrix_simul_bruteforce(link: LinkMatrix, alpha: float) -> np.ndarray:
    """Mean pattern matrix by enumerating all ``2^n`` update patterns.

    Raises:
        CapacityError: If ``n`` exceeds the enumeration limit
    """
    n = link.n
    if n > BRUTE_FORCE_LIMIT:
        raise CapacityError(f"pattern enumeration is limited to n <= {BRUTE_FORCE_LIMIT}")
    total = np.zeros((n, n))
    for bits in itertools.product((False, True), repeat=n):
        flags = np.array(bits, dtype=bool)
        count = int(flags.sum())
        weight = alpha**count * (1.0 - alpha) ** (n - count)
        if weight:
            total += weight * pattern_matrix(link, flags)
    return total


def binomial(r: int, k: int) -> int:
    """Exact binomial coefficient, zero outside ``0 <= k <= r``."""
    if r > BINOMIAL_LIMIT:
        raise CapacityError(f"binomial coefficients are limited to r <= {BINOMIAL_LIMIT}")
    if k < 0 or r < 0 or k > r:
        return 0
    return math.comb(r, k)


def pattern_sum_closed(link: LinkMatrix, count: int) -> np.ndarray:
    """Sum of the pattern matrices over all patterns with ``count`` updating pages.

    Equal to ``A`` for ``count = n``, ``nA`` for ``count = n-1`` and
    ``(C(n,l) - C(n-2,l)) A + C(n-2,l) I`` otherwise.
    """
    n = link.n
    if not 0 <= count <= n:
        raise ValueError(f"count must be in [0, {n}], got {count}")
    require_dense(n)
    full = link.to_dense()
    if count == n:
        return full
    if count == n - 1:
        return n * full
    both = binomial(n - 2, count)
    return (binomial(n, count) - both) * full + both * np.eye(n)


def pattern_sum_bruteforce(link: LinkMatrix, count: int) -> np.ndarray:
    """Enumerated sum of the pattern matrices with exactly ``count`` updating pages."""
    n = link.n
    if n > BRUTE_FORCE_LIMIT:
        raise CapacityError(f"pattern enumeration is limited to n <= {BRUTE_FORCE_LIMIT}")
    total = np.zeros((n, n))
    for pages in itertools.combinations(range(n), count):
        flags = np.zeros(n, dtype=bool)
        flags[list(pages)] = True
        total += pattern_matrix(link, flags)
    return total


def modified_average_gap(link: LinkMatrix, m: float, mhat: float, average: np.ndarray) -> float:
    """Largest entrywise gap in ``(1-mhat)Abar + (mhat/n)S = (mhat/m)M + (1-mhat/m)I``."""
    n = link.n
    left = (1.0 - mhat) * average + mhat / n
    right = (mhat / m) * google_matrix_dense(link, m) + (1.0 - mhat / m) * np.eye(n)
    gap = float(np.abs(left - right).max())
    logger.debug(f"Modified average identity gap {gap:.3e} (n={n}, mhat={mhat:.6g})")
    return gap


def frozen_blocks(
    link: LinkMatrix, alpha: float, mhat: float, frozen: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Blocks of ``(1-mhat) Abar`` seen by the pages that still update.

    Args:
        link: Link matrix
        alpha: Update probability
        mhat: Rescaled damping
        frozen: Boolean mask of frozen pages

    Returns:
        ``(NN, NC)``: rows of non-frozen pages restricted to non-frozen and
        to frozen columns
    """
    frozen = np.asarray(frozen, dtype=bool)
    if frozen.all():
        raise ValueError("at least one page must still be updating")
    scaled = (1.0 - mhat) * average_matrix_simul_closed(link, alpha)
    active = ~frozen
    return scaled[np.ix_(active, active)], scaled[np.ix_(active, frozen)]
