"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from dist_pagerank.analysis.spectral import power_method
from dist_pagerank.graph.generator import random_web
from dist_pagerank.graph.loader import load_edge_list
from dist_pagerank.graph.webgraph import WebGraph, link_matrix
from dist_pagerank.harness.experiments import EXAMPLE_WEB


@pytest.fixture
def web4():
    """Provide the four-page example web."""
    return load_edge_list(EXAMPLE_WEB)


@pytest.fixture
def web4_link(web4):
    """Provide the link matrix of the four-page web."""
    return link_matrix(web4)


@pytest.fixture
def web4_x_star(web4_link):
    """Provide a tight PageRank reference for the four-page web at m = 0.15."""
    return power_method(web4_link, 0.15, tol=1e-14).x_star


@pytest.fixture
def web4_rounded():
    """Provide the three-decimal PageRank values of the four-page web."""
    return np.array([0.119, 0.331, 0.260, 0.289])


@pytest.fixture
def two_cycle():
    """Provide the two-page cycle 0 <-> 1."""
    return WebGraph(2, [[1], [0]])


@pytest.fixture
def small_graphs():
    """Provide random webs with 3 to 10 pages."""
    return [random_web(n, seed=n, min_deg=1, max_deg=2) for n in range(3, 11)]


@pytest.fixture
def rng():
    """Provide a seeded generator for test data."""
    return np.random.default_rng(1234)
