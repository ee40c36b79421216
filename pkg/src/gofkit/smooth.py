"""Neyman smooth test against exponential-family alternatives on [0,1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SmoothConfig", "legendre_pi", "neyman_statistic"]

_MAX_ORDER = 12  # numerical-stability cap on the alternative's dimension


@dataclass(frozen=True)
class SmoothConfig:
    """Number of orthonormal components spanning the alternative."""

    k: int = 2

    def __post_init__(self):
        if not (1 <= self.k <= _MAX_ORDER):
            raise ValueError(f"k must be in [1, {_MAX_ORDER}], got {self.k}")


def legendre_pi(order: int, z) -> np.ndarray:
    """Legendre polynomial shifted to [0,1], orthonormal under the uniform density.

    pi_i(z) = sqrt(2i+1) * P_i(2z - 1), evaluated by the stable three-term
    recurrence, so that integral(pi_i * pi_j) = delta_ij and
    integral(pi_i) = 0 for i >= 1.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    z = np.asarray(z, dtype=np.float64)
    x = 2.0 * z - 1.0
    p_prev = np.ones_like(x)
    if order == 0:
        return p_prev
    p = x.copy()
    for j in range(1, order):
        p, p_prev = ((2 * j + 1) * x * p - j * p_prev) / (j + 1), p
    return np.sqrt(2 * order + 1.0) * p


def neyman_statistic(z, cfg: SmoothConfig = SmoothConfig()) -> float:
    """Smooth-test statistic: (1/n) sum_i (sum_j pi_i(z_j))^2 over i = 1..k."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size < 1:
        raise ValueError("need a non-empty 1-D array")
    if np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("PIT values must lie in [0,1]")
    n = z.size
    total = 0.0
    for i in range(1, cfg.k + 1):
        total += np.sum(legendre_pi(i, z)) ** 2
    return float(total / n)
