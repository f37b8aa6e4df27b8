"""Simultaneous-update scheme with per-page update termination.

A page freezes once its time average has stayed within a relative ``delta``
band over the last ``ns`` steps. From then on its ``x`` and ``y`` entries hold
the frozen value, which the remaining pages keep reading; the recursion of the
remaining pages is no longer stochastic.
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from ..analysis.spectral import power_method
from ..builders.averages import frozen_blocks
from ..config import SchemeParams, TerminationParams
from ..errors import NonConvergenceError
from ..graph.webgraph import LinkMatrix, WebGraph, link_matrix, uniform_vector
from ..harness.trace import SimTrace, TraceMeta, TraceRecorder
from .damping import rescaled_damping_simul
from .simultaneous import pattern_product
from .state import Scheme, SimState, UpdatePattern, make_rng, sample_pattern

EQUILIBRIUM_TOL = 1e-12
EQUILIBRIUM_MAX_ITER = 1_000_000


def check_converged(history: Sequence[float], y_now: float, tp: TerminationParams) -> bool:
    """Whether ``|y_now - h| <= delta * y_now`` for each of the last ``ns`` values.

    Args:
        history: Earlier time-average values of one page, oldest first
        y_now: Current time-average value
        tp: Relative error level and window length

    Returns:
        False when fewer than ``ns`` earlier values exist
    """
    if len(history) < tp.ns:
        return False
    window = np.asarray(history[-tp.ns :], dtype=float)
    return bool(np.all(np.abs(y_now - window) <= tp.delta * y_now))


class HistoryBuffer:
    """Ring buffer of the last ``ns`` time-average vectors."""

    def __init__(self, ns: int, n: int):
        self.ns = ns
        self._data = np.zeros((ns, n))
        self._head = 0
        self.count = 0

    @property
    def full(self) -> bool:
        return self.count >= self.ns

    def push(self, y: np.ndarray) -> None:
        self._data[self._head] = y
        self._head = (self._head + 1) % self.ns
        self.count += 1

    def page_history(self, page: int) -> List[float]:
        """Stored values of one page, oldest first."""
        size = min(self.count, self.ns)
        order = [(self._head - size + i) % self.ns for i in range(size)]
        return [float(self._data[row, page]) for row in order]

    def converged(self, y_now: np.ndarray, delta: float, active: np.ndarray) -> np.ndarray:
        """Mask of active pages whose window check holds at ``y_now``.

        The newest and oldest entries are tested first; the full window is
        scanned only for pages passing both.
        """
        mask = np.zeros(len(y_now), dtype=bool)
        if not self.full:
            return mask

        bound = delta * y_now
        newest = self._data[(self._head - 1) % self.ns]
        oldest = self._data[self._head]
        candidates = (
            active
            & (np.abs(y_now - newest) <= bound)
            & (np.abs(y_now - oldest) <= bound)
        )
        pages = np.flatnonzero(candidates)
        if pages.size:
            window = self._data[:, pages]
            mask[pages] = np.all(np.abs(window - y_now[pages]) <= bound[pages], axis=0)
        return mask


@dataclass
class TermState:
    """Run state of the terminating scheme.

    ``term_time[i]`` is the step page ``i`` froze at, or -1 while it updates.
    """

    base: SimState
    history: HistoryBuffer
    frozen: np.ndarray
    term_time: np.ndarray

    @classmethod
    def start(cls, x0: np.ndarray, rng: np.random.Generator, ns: int) -> "TermState":
        base = SimState.start(x0, rng)
        n = len(base.x)
        return cls(
            base=base,
            history=HistoryBuffer(ns, n),
            frozen=np.zeros(n, dtype=bool),
            term_time=np.full(n, -1, dtype=np.int64),
        )

    @property
    def all_frozen(self) -> bool:
        return bool(self.frozen.all())

    def term_times(self) -> List[Optional[int]]:
        return [None if t < 0 else int(t) for t in self.term_time]


def step_terminated(
    state: TermState, link: LinkMatrix, pattern: UpdatePattern, mhat: float
) -> TermState:
    """One step of the partitioned recursion.

    Updating pages follow ``x_N <- (1-mhat)[A_p x]_N + mhat/n``, reading the
    frozen values wherever their columns hit frozen pages. Frozen pages keep
    ``x`` and ``y``; their flags still push their value to updating pages.
    """
    base = state.base
    if state.all_frozen:
        return state

    x_next = (1.0 - mhat) * pattern_product(link, base.x, pattern) + mhat / link.n
    x_next[state.frozen] = base.x[state.frozen]
    advanced = base.advance(x_next)
    # x_C equals y_C, so the running average leaves frozen entries unchanged.
    return replace(state, base=advanced)


def freeze_converged(state: TermState, tp: TerminationParams) -> TermState:
    """Freeze every page whose window check holds, then push ``y`` to the history.

    All pages qualifying at the same step freeze together.
    """
    base = state.base
    newly = state.history.converged(base.y, tp.delta, ~state.frozen)
    if newly.any():
        x = base.x.copy()
        x[newly] = base.y[newly]
        frozen = state.frozen | newly
        term_time = state.term_time.copy()
        term_time[newly] = base.k
        logger.debug(
            f"k={base.k}: froze {int(newly.sum())} pages, {int(frozen.sum())}/{len(x)} frozen"
        )
        state = replace(
            state, base=replace(base, x=x), frozen=frozen, term_time=term_time
        )
    state.history.push(state.base.y)
    return state


def frozen_equilibrium(
    link: LinkMatrix,
    m: float,
    alpha: float,
    frozen: np.ndarray,
    y_frozen: np.ndarray,
    tol: float = EQUILIBRIUM_TOL,
    max_iter: int = EQUILIBRIUM_MAX_ITER,
) -> np.ndarray:
    """Equilibrium of the average recursion of the updating pages.

    Solves ``x_N = Ahat_NN x_N + Ahat_NC y_C + (mhat/n) 1`` by fixed-point
    iteration, where ``Ahat = (1-mhat) Abar`` and ``mhat`` is the
    simultaneous-update damping. ``Ahat_NN`` has l1 norm at most ``1-mhat``.

    Args:
        link: Link matrix
        m: Damping factor
        alpha: Update probability
        frozen: Boolean mask of frozen pages, not all set
        y_frozen: Frozen values, one per frozen page in page order
        tol: Stop once the l1 step falls below it
        max_iter: Iteration cap

    Returns:
        Equilibrium values of the updating pages, in page order

    Raises:
        NonConvergenceError: If the cap is reached
    """
    frozen = np.asarray(frozen, dtype=bool)
    mhat = rescaled_damping_simul(m, alpha)
    block_nn, block_nc = frozen_blocks(link, alpha, mhat, frozen)
    y_frozen = np.asarray(y_frozen, dtype=float)
    if y_frozen.shape != (int(frozen.sum()),):
        raise ValueError(
            f"expected {int(frozen.sum())} frozen values, got shape {y_frozen.shape}"
        )

    drive = block_nc @ y_frozen + mhat / link.n
    x = drive.copy()
    for iteration in range(1, max_iter + 1):
        x_next = block_nn @ x + drive
        step = float(np.abs(x_next - x).sum())
        x = x_next
        if step < tol:
            logger.debug(f"Frozen equilibrium after {iteration} iterations (step {step:.2e})")
            return x

    raise NonConvergenceError(
        "frozen equilibrium iteration did not converge", iterations=max_iter, last_iterate=x
    )


def neumann_partial_sums(block: np.ndarray, terms: int) -> List[np.ndarray]:
    """Partial sums ``sum_{j<=t} block^j`` for ``t = 0 .. terms-1``."""
    block = np.asarray(block, dtype=float)
    power = np.eye(block.shape[0])
    total = power.copy()
    sums = [total.copy()]
    for _ in range(1, terms):
        power = power @ block
        total = total + power
        sums.append(total.copy())
    return sums


def run_with_termination(
    graph: WebGraph,
    params: SchemeParams,
    tp: TerminationParams,
    steps: int,
    sample_every: int = 100,
    x0: Optional[np.ndarray] = None,
    stream: int = 0,
    x_star: Optional[np.ndarray] = None,
    link: Optional[LinkMatrix] = None,
    track_pages: Sequence[int] = (),
    keep_states: bool = False,
    reference_tol: float = 1e-12,
) -> SimTrace:
    """Run the terminating scheme until every page froze or ``steps`` steps passed.

    Each step draws one Bernoulli(alpha) flag per page, applies
    ``step_terminated``, then freezes the pages whose time averages stabilized.
    The damping stays at the simultaneous-update value as pages freeze.

    Args:
        graph: Web graph without dangling pages
        params: Damping, update probability and seed
        tp: Relative error level and stability window
        steps: Step cap ``K``
        sample_every: Sampling period of the trace
        x0: Initial probability vector, uniform when omitted
        stream: Run index within the seed's streams
        x_star: Reference PageRank vector, computed when omitted
        link: Precomputed link matrix of ``graph``
        track_pages: Pages whose ``y_i`` paths are recorded
        keep_states: Keep sampled ``(x, y)`` vectors in the trace
        reference_tol: Tolerance of the reference power method

    Returns:
        Trace with per-page termination times; ``meta.converged_at`` is the
        step at which the last page froze, or None
    """
    link = link if link is not None else link_matrix(graph)
    n = link.n
    if x_star is None:
        x_star = power_method(link, params.m, tol=reference_tol).x_star
    mhat = rescaled_damping_simul(params.m, params.alpha)
    rng = make_rng(params.seed, stream)

    state = TermState.start(uniform_vector(n) if x0 is None else x0, rng, tp.ns)
    recorder = TraceRecorder(
        x_star, sample_every, keep_states=keep_states, track_pages=track_pages
    )
    recorder.record(0, state.base.x, state.base.y)
    state.history.push(state.base.y)

    converged_at: Optional[int] = None
    for _ in range(steps):
        pattern = sample_pattern(rng, n, params.alpha)
        state = step_terminated(state, link, pattern, mhat)
        state = freeze_converged(state, tp)
        recorder.record(state.base.k, state.base.x, state.base.y)
        if state.all_frozen:
            converged_at = state.base.k
            break

    meta = TraceMeta(
        scheme=Scheme.TERMINATE.value,
        n=n,
        m=params.m,
        alpha=params.alpha,
        mhat=mhat,
        delta=tp.delta,
        ns=tp.ns,
        seed=params.seed,
        stream=stream,
        steps=state.base.k,
        converged_at=converged_at,
    )
    trace = recorder.build(meta, state.base.x, state.base.y, term_times=state.term_times())

    frozen_count = int(state.frozen.sum())
    if converged_at is not None:
        logger.info(f"All {n} pages terminated by k={converged_at} (seed={params.seed})")
    else:
        logger.info(
            f"{frozen_count}/{n} pages terminated within {state.base.k} steps (seed={params.seed})"
        )
    return trace
