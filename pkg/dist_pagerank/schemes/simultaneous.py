"""Distributed scheme where every page initiates independently with probability alpha."""

from typing import Optional, Sequence

import numpy as np
from loguru import logger

from ..analysis.ergodicity import mean_square_bound
from ..analysis.spectral import power_method
from ..config import SchemeParams
from ..graph.webgraph import LinkMatrix, WebGraph, link_matrix, uniform_vector
from ..harness.trace import SimTrace, TraceMeta, TraceRecorder
from .damping import rescaled_damping_simul
from .state import Scheme, SimState, UpdatePattern, make_rng, sample_pattern

__all__ = ["rescaled_damping_simul", "pattern_product", "step_simul", "simulate_simul"]


def pattern_product(link: LinkMatrix, x: np.ndarray, pattern: UpdatePattern) -> np.ndarray:
    """Compute ``A_p x`` for the pattern matrix of ``pattern`` without forming it.

    A flagged page takes its whole row of ``A``. An unflagged page keeps
    ``(1 - sum_{h flagged} a_hj) x_j`` and receives ``a_jh x_h`` from every
    flagged in-neighbor ``h``. Only rows and columns of flagged pages are read.
    """
    flagged = np.flatnonzero(pattern)
    if flagged.size == 0:
        return x.copy()
    if flagged.size == link.n:
        return link.matvec(x)

    n = link.n
    owner, cols, row_vals = link.rows_of(flagged)
    own_rows = np.bincount(owner, weights=row_vals * x[cols], minlength=flagged.size)
    loss = np.bincount(cols, weights=row_vals, minlength=n)

    col_owner, rows, col_vals = link.columns_of(flagged)
    gain = np.bincount(rows, weights=col_vals * x[flagged[col_owner]], minlength=n)

    z = x - loss * x + gain
    z[flagged] = own_rows
    return z


def step_simul(
    state: SimState, link: LinkMatrix, pattern: UpdatePattern, mhat: float
) -> SimState:
    """Apply ``x <- (1-mhat) A_p x + (mhat/n) 1`` for update pattern ``pattern``."""
    z = pattern_product(link, state.x, pattern)
    return state.advance((1.0 - mhat) * z + mhat / link.n)


def simulate_simul(
    graph: WebGraph,
    params: SchemeParams,
    steps: int,
    sample_every: int = 100,
    x0: Optional[np.ndarray] = None,
    stream: int = 0,
    x_star: Optional[np.ndarray] = None,
    link: Optional[LinkMatrix] = None,
    track_pages: Sequence[int] = (),
    keep_states: bool = True,
    reference_tol: float = 1e-12,
) -> SimTrace:
    """Run the simultaneous-update scheme for ``steps`` steps.

    A fresh Bernoulli(alpha) pattern is drawn per step, one variate per page
    in page-id order. With ``alpha = 1`` every step is a centralized power
    step with damping ``m``.

    Args:
        graph: Web graph without dangling pages
        params: Damping, update probability and seed
        steps: Number of steps ``K``
        sample_every: Sampling period of the trace
        x0: Initial probability vector, uniform when omitted
        stream: Run index within the seed's streams
        x_star: Reference PageRank vector, computed when omitted
        link: Precomputed link matrix of ``graph``
        track_pages: Pages whose ``y_i`` paths are recorded
        keep_states: Keep sampled ``(x, y)`` vectors in the trace
        reference_tol: Tolerance of the reference power method

    Returns:
        Trace with l1/l-inf errors of ``y`` and the mean-square bound column
    """
    link = link if link is not None else link_matrix(graph)
    n = link.n
    if x_star is None:
        x_star = power_method(link, params.m, tol=reference_tol).x_star
    mhat = rescaled_damping_simul(params.m, params.alpha)
    rng = make_rng(params.seed, stream)

    state = SimState.start(uniform_vector(n) if x0 is None else x0, rng)
    recorder = TraceRecorder(
        x_star,
        sample_every,
        bound=lambda k: mean_square_bound(mhat, k),
        keep_states=keep_states,
        track_pages=track_pages,
    )
    recorder.record(0, state.x, state.y)

    for _ in range(steps):
        pattern = sample_pattern(rng, n, params.alpha)
        state = step_simul(state, link, pattern, mhat)
        recorder.record(state.k, state.x, state.y)

    meta = TraceMeta(
        scheme=Scheme.SIMUL.value,
        n=n,
        m=params.m,
        alpha=params.alpha,
        mhat=mhat,
        seed=params.seed,
        stream=stream,
        steps=state.k,
    )
    trace = recorder.build(meta, state.x, state.y)
    logger.debug(
        f"Simultaneous-update run seed={params.seed} stream={stream} alpha={params.alpha}: "
        f"{state.k} steps, ||y-x*||_inf={trace.samples[-1].err_linf:.3e}"
    )
    return trace
