"""EDF statistics on PIT-transformed samples: supremum and quadratic families.

All statistics expect the sample already sorted and mapped to [0,1] (see
``core.pit`` / ``core.order_statistic``). Closed-form expressions are used
throughout; the test suite checks them against direct numerical evaluation
of the defining suprema and integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EdfStatistics", "supremum_stats", "quadratic_stats", "edf_statistics"]

_EPS = 1e-10  # clamp for the log singularity at z = 0, 1


@dataclass(frozen=True)
class EdfStatistics:
    """The full EDF statistic set for one sample.

    ``clamped`` flags that some value sat exactly on 0 or 1 and was nudged
    inward before the log terms of a2 were evaluated.
    """

    d_plus: float
    d_minus: float
    d: float
    v: float
    w2: float
    a2: float
    u2: float
    clamped: bool = False


def _validate(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size < 1:
        raise ValueError("need a non-empty 1-D array")
    if np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("PIT values must lie in [0,1]")
    if np.any(np.diff(z) < 0):
        raise ValueError("input must be sorted non-decreasingly")
    return z


def supremum_stats(z) -> tuple:
    """Supremum deviations of the uniform EDF: (d_plus, d_minus, d, v).

    d is the Kolmogorov statistic, v = d_plus + d_minus the Kuiper
    statistic. Input must be sorted and inside [0,1].
    """
    z = _validate(z)
    n = z.size
    i = np.arange(1, n + 1)
    d_plus = max(np.max(i / n - z), 0.0)
    d_minus = max(np.max(z - (i - 1) / n), 0.0)
    return d_plus, d_minus, max(d_plus, d_minus), d_plus + d_minus


def quadratic_stats(z) -> tuple:
    """Quadratic EDF statistics: (w2, a2, u2, clamped).

    w2 is Cramer-von Mises, a2 Anderson-Darling, u2 Watson's circular
    variant. Values exactly on 0 or 1 are clamped inward by 1e-10 for the
    a2 log terms and the clamped flag is set.
    """
    z = _validate(z)
    n = z.size
    i = np.arange(1, n + 1)

    w2 = float(np.sum((z - (2 * i - 1) / (2 * n)) ** 2) + 1.0 / (12 * n))

    clamped = bool(np.any(z <= 0.0) or np.any(z >= 1.0))
    zc = np.clip(z, _EPS, 1.0 - _EPS)
    a2 = float(-n - np.sum((2 * i - 1) * (np.log(zc) + np.log(1.0 - zc[::-1]))) / n)

    u2 = float(w2 - n * (np.mean(z) - 0.5) ** 2)
    return w2, a2, u2, clamped


def edf_statistics(z) -> EdfStatistics:
    """All supremum and quadratic statistics for one sorted PIT sample."""
    d_plus, d_minus, d, v = supremum_stats(z)
    w2, a2, u2, clamped = quadratic_stats(z)
    return EdfStatistics(d_plus, d_minus, d, v, w2, a2, u2, clamped)
