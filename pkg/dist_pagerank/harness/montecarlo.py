"""Independent seeded runs and their mean squared error."""

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..analysis.ergodicity import mean_square_bound
from ..analysis.spectral import power_method
from ..config import SchemeParams
from ..graph.webgraph import WebGraph, link_matrix
from ..schemes.damping import rescaled_damping_simul, rescaled_damping_single
from ..schemes.simultaneous import simulate_simul
from ..schemes.single import simulate_single
from ..schemes.state import Scheme
from .trace import MCSummary

MC_SCHEMES = (Scheme.SINGLE, Scheme.SIMUL)


def _squared_errors(
    scheme: Scheme,
    graph: WebGraph,
    params: SchemeParams,
    steps: int,
    sample_every: int,
    stream: int,
    x_star: np.ndarray,
) -> Tuple[List[int], np.ndarray]:
    """One run's ``||y(k) - x*||_2^2`` at the sampled steps."""
    simulate = simulate_single if scheme is Scheme.SINGLE else simulate_simul
    trace = simulate(
        graph,
        params,
        steps,
        sample_every=sample_every,
        stream=stream,
        x_star=x_star,
        keep_states=True,
    )
    errors = np.array([float(((y - x_star) ** 2).sum()) for _, y in trace.states])
    return trace.ks, errors


def mc_mean_square(
    scheme: Scheme,
    graph: WebGraph,
    params: SchemeParams,
    runs: int,
    steps: int,
    sample_every: int = 100,
    workers: int = 1,
    streams: Optional[Sequence[int]] = None,
    reference_tol: float = 1e-12,
) -> MCSummary:
    """Average squared l2 errors of ``y(k)`` over independent runs.

    Run ``r`` uses stream ``r`` of ``params.seed`` unless ``streams`` says
    otherwise. Runs are reduced in run order, so the result does not depend
    on ``workers``.

    Args:
        scheme: ``Scheme.SINGLE`` or ``Scheme.SIMUL``
        graph: Web graph without dangling pages
        params: Shared scheme parameters; ``seed`` is the base seed
        runs: Number of runs, at least 2
        steps: Horizon ``K`` of every run
        sample_every: Sampling period
        workers: Worker processes; 1 runs in-process
        streams: Explicit stream index per run
        reference_tol: Tolerance of the reference power method

    Returns:
        Per-k mean and variance of the squared error, with the mean-square bound
    """
    if scheme not in MC_SCHEMES:
        supported = [s.value for s in MC_SCHEMES]
        raise ValueError(f"mean-square runs support {supported}, got {scheme.value!r}")
    if runs < 2:
        raise ValueError(f"need at least 2 runs, got {runs}")
    streams = list(range(runs)) if streams is None else [int(s) for s in streams]
    if len(streams) != runs:
        raise ValueError(f"got {len(streams)} streams for {runs} runs")

    x_star = power_method(link_matrix(graph), params.m, tol=reference_tol).x_star
    args = [(scheme, graph, params, steps, sample_every, stream, x_star) for stream in streams]

    logger.info(
        f"Monte Carlo: {runs} {scheme.value} runs of {steps} steps on n={graph.n} "
        f"with {workers} worker(s)"
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_squared_errors, *zip(*args)))
    else:
        results = [_squared_errors(*a) for a in args]

    ks = results[0][0]
    errors = np.vstack([err for _, err in results])
    if scheme is Scheme.SINGLE:
        mhat = rescaled_damping_single(params.m, graph.n)
    else:
        mhat = rescaled_damping_simul(params.m, params.alpha)

    return MCSummary(
        scheme=scheme.value,
        runs=runs,
        seed_base=params.seed,
        streams=streams,
        ks=ks,
        mean_sq_error=errors.mean(axis=0).tolist(),
        sq_error_var=errors.var(axis=0).tolist(),
        ms_bound=[mean_square_bound(mhat, k) for k in ks],
    )
