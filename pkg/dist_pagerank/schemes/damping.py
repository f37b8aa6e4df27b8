"""Rescaled damping factors of the distributed schemes.

The rescaling makes each scheme's average modified matrix an affine function
of ``M`` with the same fixed point.
"""


def rescaled_damping_single(m: float, n: int) -> float:
    """``2m / (n - m(n-2))`` for one updating page per step; below ``m`` for ``n > 2``."""
    if not 0.0 < m < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {m}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return 2.0 * m / (n - m * (n - 2))


def rescaled_damping_simul(m: float, alpha: float) -> float:
    """``m[1-(1-alpha)^2] / (1 - m(1-alpha)^2)`` for Bernoulli(alpha) initiation."""
    if not 0.0 < m < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {m}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"update probability must be in (0, 1], got {alpha}")
    idle_pair = (1.0 - alpha) ** 2
    return m * (1.0 - idle_pair) / (1.0 - m * idle_pair)
