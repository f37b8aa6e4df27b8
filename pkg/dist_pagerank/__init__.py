"""Simulation and verification of randomized distributed PageRank schemes."""

__version__ = "0.1.0"
