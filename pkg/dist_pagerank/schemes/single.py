"""Distributed scheme where one uniformly chosen page updates per step."""

from typing import Iterator, Optional, Sequence

import numpy as np
from loguru import logger

from ..analysis.ergodicity import mean_square_bound
from ..analysis.spectral import power_method
from ..config import SchemeParams
from ..graph.webgraph import LinkMatrix, WebGraph, link_matrix, uniform_vector
from ..harness.trace import SimTrace, TraceMeta, TraceRecorder
from .damping import rescaled_damping_single
from .state import Scheme, SimState, make_rng

DRAW_CHUNK = 4096

__all__ = ["rescaled_damping_single", "step_single", "simulate_single", "page_draws"]


def step_single(state: SimState, link: LinkMatrix, page: int, mhat: float) -> SimState:
    """Apply ``x <- (1-mhat) A_page x + (mhat/n) 1`` without forming ``A_page``.

    Page ``page`` takes ``sum_l a_{page,l} x_l``. Every other page ``j`` keeps
    ``(1 - a_{page,j}) x_j`` and receives ``a_{j,page} x_page``. Cost is
    O(n + deg(page)).
    """
    x = state.x
    targets, out_weights = link.column(page)
    sources, in_weights = link.row(page)

    z = x.copy()
    z[sources] -= in_weights * x[sources]
    z[targets] += out_weights * x[page]
    z[page] = in_weights @ x[sources]

    return state.advance((1.0 - mhat) * z + mhat / link.n)


def page_draws(rng: np.random.Generator, n: int, steps: int) -> Iterator[int]:
    """Yield ``steps`` i.i.d. uniform page ids, drawn in fixed-size chunks."""
    remaining = steps
    while remaining > 0:
        chunk = rng.integers(0, n, size=min(DRAW_CHUNK, remaining))
        remaining -= len(chunk)
        yield from chunk.tolist()


def simulate_single(
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
    """Run the single-update scheme for ``steps`` steps.

    Args:
        graph: Web graph without dangling pages
        params: Damping and seed; ``alpha`` is unused
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
    mhat = rescaled_damping_single(params.m, n)
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

    # Same arithmetic as step_single, applied in place on one x and one y.
    columns = [link.column(page) for page in range(n)]
    rows = [link.row(page) for page in range(n)]
    scale, teleport = 1.0 - mhat, mhat / n
    x, y = state.x, state.y
    k = 0
    for page in page_draws(rng, n, steps):
        targets, out_weights = columns[page]
        sources, in_weights = rows[page]
        held = x[sources]
        inflow = in_weights @ held
        pushed = out_weights * x[page]
        x[sources] = held - in_weights * held
        x[targets] += pushed
        x[page] = inflow
        x *= scale
        x += teleport
        k += 1
        y += (x - y) / (k + 1)
        if k % sample_every == 0:
            recorder.record(k, x, y)
    state = SimState(k=k, x=x, y=y, rng=rng)

    meta = TraceMeta(
        scheme=Scheme.SINGLE.value,
        n=n,
        m=params.m,
        mhat=mhat,
        seed=params.seed,
        stream=stream,
        steps=state.k,
    )
    trace = recorder.build(meta, state.x, state.y)
    logger.debug(
        f"Single-update run seed={params.seed} stream={stream}: {state.k} steps, "
        f"||y-x*||_inf={trace.samples[-1].err_linf:.3e}"
    )
    return trace
