"""Reproduction experiments: the four-page web and the large random web."""

from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from ..analysis.spectral import power_method, second_eigen_modulus
from ..builders.update_matrices import google_matrix_dense
from ..config import DEFAULT_DAMPING, SchemeParams, TerminationParams
from ..graph.generator import random_web
from ..graph.loader import load_edge_list
from ..graph.webgraph import WebGraph, link_matrix, random_probability_vector
from ..schemes.state import make_rng
from ..schemes.termination import run_with_termination
from .trace import SimTrace

# Pages 0..3; page 1 is linked from the three others.
EXAMPLE_WEB = """\
n 4
0 1
1 2
1 3
2 1
2 3
3 0
3 1
3 2
"""

# Stream of the base seed used for the random initial vector of the scaled run.
INITIAL_VECTOR_STREAM = 1


class ExampleReport(BaseModel):
    """Link matrix, damped matrix, PageRank vector and second eigenvalue of a small web."""

    m: float
    link: List[List[float]]
    google: List[List[float]]
    x_star: List[float]
    lambda2: float
    lambda2_bound: float


class BandReport(BaseModel):
    """Which estimates lie within ``[(1-delta) x*_i, (1+delta) x*_i]``."""

    delta: float
    within: List[bool]
    fraction: float = Field(ge=0.0, le=1.0)


class ScaledReport(BaseModel):
    """Outcome of the large random-web termination run."""

    seed_base: int
    n: int
    steps: int
    term_times: List[Optional[int]]
    ks: List[int]
    err_l1: List[float]
    err_linf: List[float]
    sum_y: float
    band: BandReport
    page_paths: Dict[int, List[float]] = Field(default_factory=dict)
    trace: Any = Field(default=None, exclude=True, repr=False)


def example_web() -> WebGraph:
    """The four-page web with eight links."""
    return load_edge_list(EXAMPLE_WEB)


def example_report(m: float = DEFAULT_DAMPING) -> ExampleReport:
    link = link_matrix(example_web())
    x_star = power_method(link, m, tol=1e-12).x_star
    return ExampleReport(
        m=m,
        link=link.to_dense().tolist(),
        google=google_matrix_dense(link, m).tolist(),
        x_star=x_star.tolist(),
        lambda2=second_eigen_modulus(link, m, x_star),
        lambda2_bound=1.0 - m,
    )


def band_report(y: np.ndarray, x_star: np.ndarray, delta: float) -> BandReport:
    """Check every estimate against its relative ``delta`` band around ``x*``."""
    y = np.asarray(y, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    within = np.abs(y - x_star) <= delta * x_star
    return BandReport(delta=delta, within=within.tolist(), fraction=float(within.mean()))


def scaled_web_experiment(
    seed_base: int = 0,
    n: int = 1000,
    hub_count: int = 10,
    min_deg: int = 2,
    max_deg: int = 333,
    m: float = DEFAULT_DAMPING,
    alpha: float = 0.01,
    delta: float = 0.01,
    ns: int = 800,
    steps: int = 8000,
    sample_every: int = 100,
    track_pages: Sequence[int] = (),
) -> ScaledReport:
    """Run the terminating scheme on a large random web with hub pages.

    The graph is drawn from ``seed_base`` and the run starts from a random
    probability vector. Equal ``seed_base`` values give equal reports.

    Returns:
        Termination times, sampled l1 and l-inf error curves, the final
        ``sum(y)`` and the ``delta`` band check of the final estimates
    """
    graph = random_web(n, seed_base, hub_count=hub_count, min_deg=min_deg, max_deg=max_deg)
    link = link_matrix(graph)
    x_star = power_method(link, m, tol=1e-12).x_star
    x0 = random_probability_vector(make_rng(seed_base, INITIAL_VECTOR_STREAM), n)
    logger.info(
        f"Scaled run: n={n}, {graph.edge_count} links, alpha={alpha}, delta={delta}, "
        f"ns={ns}, K={steps}"
    )

    trace: SimTrace = run_with_termination(
        graph,
        SchemeParams(m=m, alpha=alpha, seed=seed_base),
        TerminationParams(delta=delta, ns=ns),
        steps,
        sample_every=sample_every,
        x0=x0,
        x_star=x_star,
        link=link,
        track_pages=track_pages,
    )
    sum_y = float(trace.final_y.sum())
    logger.info(f"Scaled run finished at k={trace.meta.steps}, sum(y)={sum_y:.4f}")
    return ScaledReport(
        seed_base=seed_base,
        n=n,
        steps=trace.meta.steps,
        term_times=trace.term_times or [],
        ks=trace.ks,
        err_l1=trace.column("err_l1").tolist(),
        err_linf=trace.column("err_linf").tolist(),
        sum_y=sum_y,
        band=band_report(trace.final_y, x_star, delta),
        page_paths=trace.page_paths,
        trace=trace,
    )
