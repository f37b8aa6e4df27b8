"""Randomized asynchronous power iteration.

Flagged pages recompute their own row of ``M``; the others hold their value.
The raw state converges, so no time average is taken.
"""

from typing import Optional, Sequence

import numpy as np
from loguru import logger

from ..analysis.spectral import power_method
from ..config import SchemeParams
from ..graph.webgraph import LinkMatrix, WebGraph, link_matrix, uniform_vector
from ..harness.trace import SimTrace, TraceMeta, TraceRecorder
from .state import Scheme, SimState, UpdatePattern, make_rng, sample_pattern


def step_async(state: SimState, link: LinkMatrix, pattern: UpdatePattern, m: float) -> SimState:
    """Set ``x_i <- (1-m)(Ax)_i + m/n`` for every flagged page ``i``.

    The teleport term is the constant ``m/n``, so ``x*`` is the only fixed
    point and a start off the simplex is pulled back onto it. The returned
    state carries the raw iterate in both ``x`` and ``y``.
    """
    x = state.x
    teleport = m / link.n
    flagged = np.flatnonzero(pattern)
    if flagged.size == link.n:
        x_next = (1.0 - m) * link.matvec(x) + teleport
    else:
        x_next = x.copy()
        if flagged.size:
            owner, cols, vals = link.rows_of(flagged)
            rows = np.bincount(owner, weights=vals * x[cols], minlength=flagged.size)
            x_next[flagged] = (1.0 - m) * rows + teleport
    return SimState(k=state.k + 1, x=x_next, y=x_next, rng=state.rng)


def simulate_async(
    graph: WebGraph,
    params: SchemeParams,
    steps: int,
    tol: float = 1e-8,
    x0: Optional[np.ndarray] = None,
    stream: int = 0,
    sample_every: int = 1,
    x_star: Optional[np.ndarray] = None,
    link: Optional[LinkMatrix] = None,
    track_pages: Sequence[int] = (),
    keep_states: bool = False,
    reference_tol: float = 1e-12,
) -> SimTrace:
    """Iterate with Bernoulli(alpha) patterns until ``||x - x*||_inf <= tol`` or ``steps``.

    Patterns are drawn exactly as in the simultaneous-update scheme, so both
    schemes see the same flags under one seed.

    Returns:
        Trace of the raw iterate's errors; ``meta.converged_at`` is the first
        step within ``tol``, or None when the cap was reached
    """
    link = link if link is not None else link_matrix(graph)
    n = link.n
    if x_star is None:
        x_star = power_method(link, params.m, tol=reference_tol).x_star
    rng = make_rng(params.seed, stream)

    state = SimState.start(uniform_vector(n) if x0 is None else x0, rng)
    recorder = TraceRecorder(
        x_star, sample_every, keep_states=keep_states, track_pages=track_pages
    )
    recorder.record(0, state.x, state.x)

    converged_at: Optional[int] = None
    if np.abs(state.x - x_star).max() <= tol:
        converged_at = 0
    while converged_at is None and state.k < steps:
        pattern = sample_pattern(rng, n, params.alpha)
        state = step_async(state, link, pattern, params.m)
        recorder.record(state.k, state.x, state.x)
        if np.abs(state.x - x_star).max() <= tol:
            converged_at = state.k

    meta = TraceMeta(
        scheme=Scheme.ASYNC.value,
        n=n,
        m=params.m,
        alpha=params.alpha,
        seed=params.seed,
        stream=stream,
        steps=state.k,
        converged_at=converged_at,
    )
    if converged_at is None:
        logger.info(f"Asynchronous iteration did not reach tol={tol:g} in {steps} steps")
    else:
        logger.debug(f"Asynchronous iteration reached tol={tol:g} at k={converged_at}")
    return recorder.build(meta, state.x, state.x)
