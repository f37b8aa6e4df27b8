"""Randomized update schemes and their simulators."""
