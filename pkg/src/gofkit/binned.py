"""Chi-squared tests on histograms, plus binning policies.

p-values for these statistics come from the Monte Carlo engine by default;
the asymptotic chi-squared law is available as an explicitly labeled
approximation (``asymptotic_p_value``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2 as _chi2_dist

from .core import Sample, UnivariateHypothesis

__all__ = [
    "Histogram",
    "chi2_statistic",
    "bin_count_rule",
    "bin_uniform",
    "asymptotic_p_value",
]


@dataclass(frozen=True)
class Histogram:
    """Counts and expectations over a fixed binning.

    ``edges`` are the bin boundaries (univariate case; multi-dimensional
    rectangular grids can be fed in flattened, with edges=None).
    ``variances`` is only needed for the gaussian chi-squared mode; when
    absent the expectations are used in its place (the Poisson limit).
    """

    counts: np.ndarray
    expectations: np.ndarray
    edges: Optional[np.ndarray] = None
    variances: Optional[np.ndarray] = None

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        expect = np.asarray(self.expectations, dtype=np.float64)
        if counts.shape != expect.shape or counts.ndim != 1:
            raise ValueError("counts and expectations must be 1-D of equal length")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "expectations", expect)
        if self.variances is not None:
            var = np.asarray(self.variances, dtype=np.float64)
            if var.shape != expect.shape:
                raise ValueError("variances must match expectations in length")
            object.__setattr__(self, "variances", var)

    @property
    def nbins(self) -> int:
        return self.counts.size


def chi2_statistic(h: Histogram, mode: str = "pearson") -> tuple:
    """Chi-squared statistic of a histogram; returns (value, dof).

    Modes: 'gaussian' uses per-bin variances (expectations when absent),
    'pearson' divides by the expectations, 'multinomial' is the Pearson
    form with the total-count constraint, so dof drops to B-1 and the
    expectations must sum to the observed total.
    """
    if mode not in ("gaussian", "pearson", "multinomial"):
        raise ValueError(f"unknown mode {mode!r}")
    if np.any(h.expectations <= 0.0):
        raise ValueError("every bin needs a strictly positive expectation")
    diff = h.counts - h.expectations
    if mode == "gaussian":
        denom = h.variances if h.variances is not None else h.expectations
        if np.any(denom <= 0.0):
            raise ValueError("every bin needs a strictly positive variance")
        return float(np.sum(diff**2 / denom)), h.nbins
    if mode == "multinomial":
        total = h.counts.sum()
        if not np.isclose(h.expectations.sum(), total, rtol=1e-9, atol=1e-6):
            raise ValueError(
                "multinomial mode requires expectations summing to the total count "
                f"(got {h.expectations.sum():g} vs N={total})"
            )
        return float(np.sum(diff**2 / h.expectations)), h.nbins - 1
    return float(np.sum(diff**2 / h.expectations)), h.nbins


def bin_count_rule(n: int) -> int:
    """Sample-size dependent bin number, B = round(2 n^(2/5)), at least 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, int(round(2.0 * n**0.4)))


def _invert_cdf(h: UnivariateHypothesis, q: float) -> float:
    """Numeric quantile of a hypothesis cdf by bracketing + brentq."""
    lo, hi = h.support
    if not np.isfinite(lo):
        lo = -1.0
        while h.cdf(np.array([lo]))[0] > q:
            lo *= 2.0
            if lo < -1e18:
                raise ValueError("failed to bracket quantile on the left")
    if not np.isfinite(hi):
        hi = 1.0
        while h.cdf(np.array([hi]))[0] < q:
            hi *= 2.0
            if hi > 1e18:
                raise ValueError("failed to bracket quantile on the right")
    return brentq(lambda x: float(h.cdf(np.array([x]))[0]) - q, lo, hi, xtol=1e-12)


def bin_uniform(
    sample: Sample,
    hypothesis: UnivariateHypothesis,
    nbins: int,
    policy: str = "equal_probability",
) -> Histogram:
    """Bin a univariate sample against a hypothesis.

    'equal_probability' puts the interior edges at the cdf quantiles i/B,
    so every bin expects n/B entries; 'equal_width' splits the support
    evenly and requires it to be bounded. Bins are half-open [e_i, e_{i+1})
    with the last bin closed, so the counts always sum to n.
    """
    if sample.dim != 1:
        raise ValueError("bin_uniform handles univariate samples; bin coordinates separately")
    if nbins < 1:
        raise ValueError("need at least one bin")
    lo, hi = hypothesis.support
    if policy == "equal_width":
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("equal_width binning needs a bounded support")
        edges = np.linspace(lo, hi, nbins + 1)
    elif policy == "equal_probability":
        inner = [_invert_cdf(hypothesis, i / nbins) for i in range(1, nbins)]
        edges = np.array([lo] + inner + [hi])
    else:
        raise ValueError(f"unknown policy {policy!r}")

    x = sample.points[:, 0]
    # np.searchsorted with side='right' realizes [e_i, e_{i+1}); fold the
    # points exactly on the top edge back into the last bin
    idx = np.searchsorted(edges, x, side="right") - 1
    idx = np.clip(idx, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)

    cdf_at = hypothesis.cdf(edges)
    probs = np.diff(np.clip(cdf_at, 0.0, 1.0))
    expectations = sample.n * probs
    return Histogram(counts=counts, expectations=expectations, edges=edges)


def asymptotic_p_value(value: float, dof: int) -> float:
    """Upper-tail p under the asymptotic chi-squared law (approximation only)."""
    return float(_chi2_dist.sf(value, dof))
