"""Mean dynamics of the distributed schemes.

The expected state follows ``xbar(k+1) = Mbar xbar(k)`` where
``Mbar = (1-mhat) Abar + (mhat/n) S`` is the scheme's average modified
matrix. With the rescaled damping, ``Mbar`` has the PageRank vector as its
fixed point, so the schemes are correct on average.
"""

from typing import Optional

import numpy as np

from ..builders.averages import average_matrix_simul_closed, average_matrix_single
from ..builders.update_matrices import modified_matrix
from ..graph.webgraph import LinkMatrix, uniform_vector
from .damping import rescaled_damping_simul, rescaled_damping_single
from .state import Scheme


def average_modified_matrix(
    link: LinkMatrix, m: float, scheme: Scheme, alpha: float = 1.0
) -> np.ndarray:
    """Dense ``Mbar`` of the single-update or simultaneous-update scheme."""
    if scheme is Scheme.SINGLE:
        mhat = rescaled_damping_single(m, link.n)
        average = average_matrix_single(link)
    elif scheme is Scheme.SIMUL:
        mhat = rescaled_damping_simul(m, alpha)
        average = average_matrix_simul_closed(link, alpha)
    else:
        raise ValueError(f"no average dynamics for scheme {scheme.value!r}")
    return modified_matrix(average, mhat)


def average_dynamics(
    link: LinkMatrix,
    m: float,
    scheme: Scheme,
    alpha: float = 1.0,
    x0: Optional[np.ndarray] = None,
    steps: int = 100,
) -> np.ndarray:
    """Iterate the expected-state recursion.

    Returns:
        Array of shape ``(steps + 1, n)`` whose row ``k`` is ``xbar(k)``
    """
    matrix = average_modified_matrix(link, m, scheme, alpha)
    path = np.empty((steps + 1, link.n))
    path[0] = uniform_vector(link.n) if x0 is None else x0
    for k in range(steps):
        path[k + 1] = matrix @ path[k]
    return path
