"""Randomized averaging consensus over a web graph.

Pattern ``i`` involves the links of page ``i`` in both directions: page ``i``
averages itself with the pages linking to it, and every page ``i`` links to
averages itself with page ``i``. All other pages hold their value.
"""

from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from loguru import logger
from scipy.sparse.csgraph import connected_components

from ..analysis.ergodicity import ProductReport, product_contraction_check
from ..builders.update_matrices import DENSE_LIMIT, require_dense
from ..errors import GraphValidationError, MatrixValidationError
from ..graph.webgraph import WebGraph
from ..harness.trace import SimTrace, TraceMeta, TraceRecorder
from .single import page_draws
from .state import Scheme, make_rng

ROW_SUM_TOL = 1e-12


class ConsensusPattern:
    """Row-stochastic averaging matrices ``A_1 .. A_d`` with positive diagonals."""

    def __init__(self, matrices: Sequence[np.ndarray]):
        stacked = np.array([np.asarray(a, dtype=float) for a in matrices])
        if stacked.ndim != 3 or stacked.shape[1] != stacked.shape[2]:
            raise MatrixValidationError("consensus matrices must be square and equally sized")
        row_gap = np.abs(stacked.sum(axis=2) - 1.0).max()
        if row_gap > ROW_SUM_TOL:
            raise MatrixValidationError(f"consensus matrix rows deviate from 1 by {row_gap:.2e}")
        if (stacked < 0).any():
            raise MatrixValidationError("consensus matrices must be nonnegative")
        if (np.diagonal(stacked, axis1=1, axis2=2) <= 0).any():
            raise MatrixValidationError("consensus matrices need positive diagonals")
        self._matrices = stacked
        self._matrices.setflags(write=False)

    @property
    def matrices(self) -> np.ndarray:
        return self._matrices

    @property
    def d(self) -> int:
        return self._matrices.shape[0]

    @property
    def n(self) -> int:
        return self._matrices.shape[1]

    def average(self) -> np.ndarray:
        """Average pattern matrix ``(1/d) sum_i A_i``."""
        return self._matrices.mean(axis=0)


def require_strongly_connected(graph: WebGraph) -> None:
    """Raise ``GraphValidationError`` unless every page reaches every other page."""
    rows, cols = zip(*graph.edges()) if graph.edge_count else ((), ())
    adjacency = sp.csr_matrix(
        (np.ones(len(rows)), (np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp))),
        shape=(graph.n, graph.n),
    )
    count, _ = connected_components(adjacency, directed=True, connection="strong")
    if count != 1:
        raise GraphValidationError(
            f"consensus needs a strongly connected graph, found {count} components"
        )


def consensus_matrices(graph: WebGraph) -> ConsensusPattern:
    """Build the ``d = n`` averaging matrices of ``graph``.

    Raises:
        GraphValidationError: If the graph is not strongly connected
        CapacityError: If ``n`` exceeds the dense limit
    """
    require_strongly_connected(graph)
    require_dense(graph.n, DENSE_LIMIT)
    n = graph.n
    matrices = []
    for page in range(n):
        a = np.eye(n)
        senders = graph.in_links[page]
        a[page, :] = 0.0
        a[page, [page, *senders]] = 1.0 / (len(senders) + 1)
        for target in graph.out_links[page]:
            a[target, target] = 0.5
            a[target, page] = 0.5
        matrices.append(a)
    return ConsensusPattern(matrices)


def consensus_step(graph: WebGraph, x: np.ndarray, page: int) -> np.ndarray:
    """Apply pattern ``page`` to ``x`` in O(deg(page))."""
    x_next = x.copy()
    senders = list(graph.in_links[page])
    x_next[page] = (x[page] + x[senders].sum()) / (len(senders) + 1)
    targets = list(graph.out_links[page])
    x_next[targets] = 0.5 * (x[targets] + x[page])
    return x_next


def transposed_contraction(pattern: ConsensusPattern, modes: Sequence[int]) -> ProductReport:
    """Contraction of a consensus product measured on its column-stochastic transpose.

    ``modes`` lists the patterns in application order. The transpose of
    ``A_{theta(k)} .. A_{theta(0)}`` is the product of the transposes in
    reverse order, so its coefficient bounds the disagreement decay.
    """
    factors = [pattern.matrices[mode].T for mode in reversed(list(modes))]
    return product_contraction_check(factors)


def simulate_consensus(
    graph: WebGraph,
    x0: np.ndarray,
    seed: int,
    steps: int,
    tol: float = 1e-8,
    stream: int = 0,
    sample_every: int = 1,
    track_pages: Sequence[int] = (),
    keep_states: bool = False,
) -> SimTrace:
    """Iterate ``x <- A_theta x`` with ``theta`` uniform over the pages.

    Stops once ``max(x) - min(x) <= tol`` or after ``steps`` steps. Trace
    metrics measure disagreement: ``err_linf`` is ``max - min`` and
    ``err_l1`` the l1 distance to the mean.

    Raises:
        GraphValidationError: If the graph is not strongly connected
    """
    require_strongly_connected(graph)
    x = np.array(x0, dtype=float)
    if x.shape != (graph.n,):
        raise ValueError(f"initial vector has shape {x.shape}, expected ({graph.n},)")
    rng = make_rng(seed, stream)
    recorder = TraceRecorder(None, sample_every, keep_states=keep_states, track_pages=track_pages)
    recorder.record(0, x, x)

    k = 0
    converged_at: Optional[int] = 0 if x.max() - x.min() <= tol else None
    if converged_at is None:
        for page in page_draws(rng, graph.n, steps):
            x = consensus_step(graph, x, page)
            k += 1
            recorder.record(k, x, x)
            if x.max() - x.min() <= tol:
                converged_at = k
                break

    meta = TraceMeta(
        scheme=Scheme.CONSENSUS.value,
        n=graph.n,
        seed=seed,
        stream=stream,
        steps=k,
        converged_at=converged_at,
    )
    if converged_at is None:
        logger.info(f"No consensus within tol={tol:g} after {k} steps (seed={seed})")
    else:
        logger.debug(f"Consensus at k={converged_at} on value {x.mean():.6g} (seed={seed})")
    return recorder.build(meta, x, x)


def disagreement_ranges(states: List[tuple]) -> np.ndarray:
    """``(min, max)`` of each recorded state, one row per sample."""
    return np.array([(x.min(), x.max()) for x, _ in states])
