"""Three-region test: maximal weighted squared count deviation over partitions.

The unit interval is split into contiguous regions by cuts; the statistic is
the largest achievable sum of weighted squared deviations between observed
region counts and their expectations. The supremum over continuous cut
positions is attained on a finite canonical candidate set: cut positions
immediately below and above each order statistic plus the endpoints {0,1}
(the objective is convex in the cuts while the counts stay fixed, so each
piece is maximized at a data-adjacent cut). Candidates are represented as
(position, count-to-the-left) pairs, which realizes the below/above limits
exactly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = ["RegionSplit", "three_region_statistic"]

_WEIGHT_ALIASES = {
    "unit": "unit",
    "inverse_expectation": "chi",
    "chi": "chi",
}


@dataclass(frozen=True)
class RegionSplit:
    """The maximizing partition: interior cut positions, counts, probabilities."""

    cuts: tuple
    counts: tuple
    probs: tuple

    @property
    def cut_lo(self) -> float:
        return self.cuts[0]

    @property
    def cut_hi(self) -> float:
        return self.cuts[-1]


def _candidates(z_sorted: np.ndarray):
    """Canonical candidate cuts as (position p, points-to-the-left k) pairs.

    Interleaving each unique value's below/above count flavors between the
    endpoints yields a lexicographically sorted pair sequence by
    construction; only endpoint duplicates need removing.
    """
    n = z_sorted.size
    vals = np.unique(z_sorted)
    left = np.searchsorted(z_sorted, vals, side="left")
    right = np.searchsorted(z_sorted, vals, side="right")
    m = vals.size
    p = np.empty(2 * m + 2)
    k = np.empty(2 * m + 2)
    p[0], k[0] = 0.0, 0.0
    p[1:-1:2] = vals
    p[2:-1:2] = vals
    k[1:-1:2] = left
    k[2:-1:2] = right
    p[-1], k[-1] = 1.0, float(n)
    keep = np.ones(p.size, dtype=bool)
    keep[1:] = (p[1:] != p[:-1]) | (k[1:] != k[:-1])
    return p[keep], k[keep]


def _term_matrix(p: np.ndarray, k: np.ndarray, n: int, weights: str) -> np.ndarray:
    """T[u, v] = weighted squared deviation of the region between cuts u and v."""
    dp = p[None, :] - p[:, None]
    dk = k[None, :] - k[:, None]
    expect = n * dp
    diff = dk - expect
    # explicit multiply, not **2: a lone IEEE multiplication is identical
    # across numpy loops and scalar python, so oracle comparisons stay exact
    with np.errstate(divide="ignore", invalid="ignore"):
        if weights == "unit":
            t = diff * diff
        else:
            t = diff * diff / expect
            t[dp == 0.0] = -np.inf  # singular weight: region excluded
    t[_backward_mask(p.size)] = -np.inf  # only forward regions
    return t


@functools.lru_cache(maxsize=8)
def _backward_mask(ncand: int) -> np.ndarray:
    idx = np.arange(ncand)
    return idx[:, None] > idx[None, :]


def three_region_statistic(z, weights: str = "unit", regions: int = 3) -> tuple:
    """Supremum of the weighted three-region deviation; returns (O, RegionSplit).

    ``weights``: 'unit' scores raw squared count deviations;
    'inverse_expectation' (alias 'chi') divides each region by its
    expectation, i.e. maximizes the chi-squared of the regions. The
    optional ``regions`` parameter generalizes to 4 or 5 subregions.
    Input order is irrelevant (sorted internally).
    """
    weights = _WEIGHT_ALIASES.get(weights)
    if weights is None:
        raise ValueError("weights must be 'unit' or 'inverse_expectation'/'chi'")
    if regions not in (3, 4, 5):
        raise ValueError("regions must be 3, 4 or 5")
    z = np.sort(np.asarray(z, dtype=np.float64))
    if z.size < 1:
        raise ValueError("need at least one observation")
    if z[0] < 0.0 or z[-1] > 1.0:
        raise ValueError("PIT values must lie in [0,1]")

    n = z.size
    p, k = _candidates(z)
    t = _term_matrix(p, k, n, weights)
    ncand = p.size

    # Path of exactly `regions` edges from cut (0,0) to cut (1,n); each edge
    # contributes one region term. Stage maxima keep per-path addition order
    # left-associative, so the result is bit-identical to a brute-force scan.
    best = t[0].copy()
    ptrs = []
    for _ in range(regions - 1):
        stage = best[:, None] + t
        ptr = np.argmax(stage, axis=0)
        best = stage[ptr, np.arange(ncand)]
        ptrs.append(ptr)
    value = float(best[-1])
    if not np.isfinite(value):
        raise ValueError("no admissible partition (all candidate regions singular)")

    node = ncand - 1
    cut_idx = []
    for ptr in reversed(ptrs):
        node = int(ptr[node])
        cut_idx.append(node)
    cut_idx.reverse()
    bounds = [0] + cut_idx + [ncand - 1]
    split = RegionSplit(
        cuts=tuple(float(p[i]) for i in cut_idx),
        counts=tuple(int(k[bounds[j + 1]] - k[bounds[j]]) for j in range(regions)),
        probs=tuple(float(p[bounds[j + 1]] - p[bounds[j]]) for j in range(regions)),
    )
    return value, split
