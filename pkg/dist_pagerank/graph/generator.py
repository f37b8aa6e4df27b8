"""Seeded random web generator with hub pages."""

import math

import numpy as np
from loguru import logger

from ..errors import GraphValidationError
from .webgraph import WebGraph, patch_dangling

HUB_MIN_SHARE = 0.9
HUB_TARGET_SHARE = 0.95


def random_web(
    n: int,
    seed: int,
    hub_count: int = 0,
    min_deg: int = 2,
    max_deg: int = 3,
) -> WebGraph:
    """Generate a random web where a few hub pages are linked from most pages.

    Pages ``0 .. hub_count-1`` are hubs. Each hub is linked from a random set
    of ``max(ceil(0.9 n), floor(0.95 (n-1)))`` other pages. Independently, every
    page links to ``d`` distinct non-hub pages other than itself, with ``d``
    uniform in ``[min_deg, max_deg]``.

    Args:
        n: Page count
        seed: Generator seed; equal seeds give equal graphs
        hub_count: Number of hub pages
        min_deg: Smallest number of non-hub out-links per page
        max_deg: Largest number of non-hub out-links per page

    Returns:
        Generated graph, passed through ``patch_dangling``

    Raises:
        GraphValidationError: If the bounds cannot be met
    """
    if n < 2:
        raise GraphValidationError(f"a web graph needs at least 2 pages, got n={n}")
    if not 0 <= hub_count < n:
        raise GraphValidationError(f"hub_count must be in [0, {n}), got {hub_count}")
    if not 1 <= min_deg <= max_deg < n:
        raise GraphValidationError(
            f"need 1 <= min_deg <= max_deg < n, got min_deg={min_deg}, max_deg={max_deg}, n={n}"
        )
    non_hubs = n - hub_count
    # A non-hub page cannot link to itself.
    if max_deg > non_hubs - 1:
        raise GraphValidationError(
            f"max_deg={max_deg} exceeds the {non_hubs - 1} non-hub pages a page can link to"
        )
    hub_fanin = max(math.ceil(HUB_MIN_SHARE * n), math.floor(HUB_TARGET_SHARE * (n - 1)))
    if hub_count and hub_fanin > n - 1:
        raise GraphValidationError(
            f"n={n} is too small for hubs linked from {HUB_MIN_SHARE:.0%} of the pages"
        )

    rng = np.random.default_rng(seed)
    out_links = [set() for _ in range(n)]

    for hub in range(hub_count):
        others = np.delete(np.arange(n), hub)
        for page in rng.choice(others, size=hub_fanin, replace=False):
            out_links[int(page)].add(hub)

    pool = np.arange(hub_count, n)
    degrees = rng.integers(min_deg, max_deg + 1, size=n)
    for page in range(n):
        candidates = pool[pool != page]
        targets = rng.choice(candidates, size=int(degrees[page]), replace=False)
        out_links[page].update(int(t) for t in targets)

    graph = WebGraph(n, [sorted(targets) for targets in out_links])
    logger.debug(f"Generated random web n={n}, hubs={hub_count}, edges={graph.edge_count}")
    return patch_dangling(graph)
