"""Traces, Monte Carlo driving, experiments and checks."""
