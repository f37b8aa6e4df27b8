"""Centralized reference computations and stochastic-matrix analysis."""
