"""Per-run simulation state and random streams."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

# Update patterns are boolean arrays of length n; True marks an initiating page.
UpdatePattern = np.ndarray


class Scheme(Enum):
    """Simulated update schemes."""

    SINGLE = "single"
    SIMUL = "simul"
    TERMINATE = "terminate"
    ASYNC = "async"
    CONSENSUS = "consensus"


@dataclass
class SimState:
    """State of one simulation run.

    ``y`` is the running time average of ``x(0) .. x(k)``. A state is owned by
    a single run; the graph and link matrix it is stepped with are shared.
    """

    k: int
    x: np.ndarray
    y: np.ndarray
    rng: np.random.Generator

    @classmethod
    def start(cls, x0: np.ndarray, rng: np.random.Generator) -> "SimState":
        x = np.array(x0, dtype=float)
        return cls(k=0, x=x, y=x.copy(), rng=rng)

    def advance(self, x_next: np.ndarray) -> "SimState":
        """Return the state after step ``k -> k+1`` with new value ``x_next``."""
        y_next = self.y + (x_next - self.y) / (self.k + 2)
        return SimState(k=self.k + 1, x=x_next, y=y_next, rng=self.rng)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for run ``stream`` of base seed ``seed``.

    Distinct streams of one seed are statistically independent, and each
    ``(seed, stream)`` pair always yields the same sequence.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(sequence))


def sample_pattern(rng: np.random.Generator, n: int, alpha: float) -> UpdatePattern:
    """Draw one Bernoulli(alpha) initiation flag per page, in page-id order."""
    return rng.random(n) < alpha
