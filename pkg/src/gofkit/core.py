"""Shared domain types: samples, hypotheses, random streams, test outcomes."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "DimensionError",
    "DomainError",
    "HypothesisIntegrityError",
    "Sample",
    "RandomStream",
    "UnivariateHypothesis",
    "MultivariateHypothesis",
    "GaussianHypothesis",
    "TestOutcome",
    "order_statistic",
    "pit",
    "uniform01",
    "exponential",
    "gauss1d",
    "gauss_mv",
    "gauss2d",
    "from_reference",
]

_MASK64 = (1 << 64) - 1


class DimensionError(ValueError):
    """Sample dimensionality does not match what an operation requires."""


class DomainError(ValueError):
    """An observation lies outside the hypothesis support."""


class HypothesisIntegrityError(ValueError):
    """A hypothesis violated its own contract (e.g. cdf outside [0,1])."""


@dataclass(frozen=True)
class Sample:
    """An ordered collection of d-dimensional observation points.

    ``points`` is an (n, dim) float array; all coordinates must be finite
    and n >= 1. The array is made read-only on construction.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError(f"points must be a 1-D or 2-D array, got ndim={pts.ndim}")
        if pts.shape[0] < 1:
            raise ValueError("a sample needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_1d(cls, values) -> "Sample":
        return cls(np.asarray(values, dtype=np.float64).reshape(-1, 1))


def _mix64(x: int) -> int:
    # splitmix64 finalizer; spreads lineage info over the whole 64-bit word
    x &= _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RandomStream:
    """Counter-based random stream identified by (seed, stream_id).

    Identical (seed, stream_id) always produce the identical value sequence;
    distinct stream_ids index statistically independent Philox streams, so a
    replica farm is reproducible no matter how replicas are scheduled.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = [self.seed & _MASK64, self.stream_id & _MASK64]
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, k: int) -> "RandomStream":
        """Derive the k-th child stream of this lineage."""
        child_seed = _mix64(self.seed ^ _mix64(self.stream_id + 0x632BE59BD9B4E019))
        return RandomStream(seed=child_seed, stream_id=k)


@dataclass(frozen=True)
class UnivariateHypothesis:
    """A fully specified univariate null model.

    ``cdf`` maps arrays of observations to [0,1]; ``sampler(gen, size)``
    draws a float array of the given size; ``support`` is the closed
    interval carrying all probability mass (may be infinite).
    """

    name: str
    cdf: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    support: tuple = (-np.inf, np.inf)


@dataclass(frozen=True)
class MultivariateHypothesis:
    """A multivariate null model: a sampler plus optional reference sample."""

    name: str
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    dim: int
    reference: Optional[Sample] = None

    def __post_init__(self):
        if self.reference is not None and self.reference.dim != self.dim:
            raise DimensionError(
                f"reference sample has dim={self.reference.dim}, hypothesis dim={self.dim}"
            )


@dataclass(frozen=True)
class GaussianHypothesis(MultivariateHypothesis):
    """Multivariate Gaussian null with known mean and covariance."""

    mean: np.ndarray = field(default=None)
    cov: np.ndarray = field(default=None)


@dataclass(frozen=True)
class TestOutcome:
    """Result of one test run: statistic value plus optional MC calibration."""

    statistic_name: str
    value: float
    p_value: Optional[float]
    replicas: int
    seed: int
    reject_at: Optional[tuple] = None  # (alpha, decision)

    def __post_init__(self):
        if self.p_value is not None:
            if self.replicas < 1:
                raise ValueError("p_value present requires replicas >= 1")
            if not (0.0 <= self.p_value <= 1.0):
                raise ValueError(f"p_value {self.p_value} outside [0,1]")
        if self.reject_at is not None:
            alpha, decision = self.reject_at
            if not (0.0 < alpha < 1.0):
                raise ValueError(f"alpha {alpha} outside (0,1)")
            if self.p_value is not None and decision != (self.p_value <= alpha):
                raise ValueError("decision inconsistent with p_value and alpha")


def order_statistic(sample: Sample) -> np.ndarray:
    """Coordinates of a univariate sample in non-decreasing order.

    Ties are kept; the output always has length n.
    """
    if sample.dim != 1:
        raise DimensionError(f"order statistic needs dim=1, got dim={sample.dim}")
    return np.sort(sample.points[:, 0])


def pit(sample: Sample, h: UnivariateHypothesis) -> Sample:
    """Probability integral transform: push every observation through h.cdf.

    Output values are clamped to [0,1] to absorb endpoint rounding; a cdf
    value outside [0,1] by more than 1e-9 raises HypothesisIntegrityError.
    """
    if sample.dim != 1:
        raise DimensionError(f"pit needs dim=1, got dim={sample.dim}")
    x = sample.points[:, 0]
    lo, hi = h.support
    if np.any(x < lo) or np.any(x > hi):
        bad = x[(x < lo) | (x > hi)][0]
        raise DomainError(f"observation {bad} outside support [{lo}, {hi}]")
    z = np.asarray(h.cdf(x), dtype=np.float64)
    if np.any(z < -1e-9) or np.any(z > 1 + 1e-9) or not np.all(np.isfinite(z)):
        raise HypothesisIntegrityError(f"cdf of {h.name} returned values outside [0,1]")
    return Sample.from_1d(np.clip(z, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Built-in hypotheses
# ---------------------------------------------------------------------------

def uniform01() -> UnivariateHypothesis:
    """Uniform distribution on [0, 1]."""
    return UnivariateHypothesis(
        name="uniform01",
        cdf=lambda x: np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0),
        sampler=lambda gen, size: gen.random(size),
        support=(0.0, 1.0),
    )


def exponential(rate: float = 1.0) -> UnivariateHypothesis:
    """Exponential distribution with the given rate (F(x) = 1 - exp(-rate*x))."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return UnivariateHypothesis(
        name=f"exp({rate:g})",
        cdf=lambda x: -np.expm1(-rate * np.asarray(x, dtype=np.float64)),
        sampler=lambda gen, size: gen.exponential(1.0 / rate, size),
        support=(0.0, np.inf),
    )


def gauss1d(mu: float = 0.0, sigma: float = 1.0) -> UnivariateHypothesis:
    """Univariate Gaussian with known mean and standard deviation."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return UnivariateHypothesis(
        name=f"gauss1d({mu:g},{sigma:g})",
        cdf=lambda x: ndtr((np.asarray(x, dtype=np.float64) - mu) / sigma),
        sampler=lambda gen, size: gen.normal(mu, sigma, size),
        support=(-np.inf, np.inf),
    )


def gauss_mv(mean, cov) -> GaussianHypothesis:
    """Multivariate Gaussian null with known mean vector and covariance."""
    mean = np.asarray(mean, dtype=np.float64)
    cov = np.asarray(cov, dtype=np.float64)
    dim = mean.shape[0]
    if cov.shape != (dim, dim):
        raise ValueError(f"covariance shape {cov.shape} does not match mean of length {dim}")
    chol = np.linalg.cholesky(cov)  # raises LinAlgError if not positive definite
    mean.setflags(write=False)
    cov.setflags(write=False)

    def sampler(gen, size):
        return mean + gen.standard_normal((size, dim)) @ chol.T

    label = "gauss_mv(" + ",".join(f"{v:g}" for v in mean) + ";" + \
        ",".join(f"{v:g}" for v in cov.ravel()) + ")"
    return GaussianHypothesis(
        name=label, sampler=sampler, dim=dim, reference=None, mean=mean, cov=cov
    )


def gauss2d(mean=(0.0, 0.0), cov=((1.0, 0.0), (0.0, 1.0))) -> GaussianHypothesis:
    """Bivariate Gaussian null (the reference model of the 2-D power study)."""
    h = gauss_mv(mean, cov)
    if h.dim != 2:
        raise DimensionError("gauss2d requires a 2-vector mean")
    return h


def from_reference(reference: Sample, name: str = None) -> MultivariateHypothesis:
    """Empirical null backed by a fixed simulation sample.

    The sampler bootstraps (draws with replacement) from the reference, and
    the reference itself serves as the positive-charge sample for the
    energy test.
    """
    if name is None:
        digest = hashlib.sha256(reference.points.tobytes()).hexdigest()[:12]
        name = f"sample:{digest}"
    pts = reference.points

    def sampler(gen, size):
        idx = gen.integers(0, pts.shape[0], size=size)
        return pts[idx]

    return MultivariateHypothesis(
        name=name, sampler=sampler, dim=reference.dim, reference=reference
    )


def gaussian_ppf(q):
    """Standard normal quantile function (exposed for binning helpers)."""
    return ndtri(q)
