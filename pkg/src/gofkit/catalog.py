"""Statistic registry and hypothesis spec parsing.

Bridges the statistic modules to the calibration engine: every test is
exposed as a named factory producing a bound `Statistic`, and textual
hypothesis specs (as used by the CLI and study configs) are parsed here.
"""

from __future__ import annotations

import hashlib
import re
from typing import Optional

import numpy as np

from . import binned, edf, energy, multinormal, region3, smooth
from .calibrate import Statistic, build_null, p_value
from .core import (
    GaussianHypothesis,
    MultivariateHypothesis,
    RandomStream,
    Sample,
    TestOutcome,
    UnivariateHypothesis,
    exponential,
    from_reference,
    gauss1d,
    gauss_mv,
    pit,
    uniform01,
)

__all__ = ["STATISTICS", "make_statistic", "parse_hypothesis", "run_test", "available_statistics"]


def _z_sorted(points: np.ndarray, h: UnivariateHypothesis) -> np.ndarray:
    sample = Sample(np.asarray(points))
    return np.sort(pit(sample, h).points[:, 0])


def _uni(h):
    if not isinstance(h, UnivariateHypothesis):
        raise TypeError("this statistic needs a univariate hypothesis")
    return h


def _make_ks(h, **_):
    h = _uni(h)
    return Statistic("ks", f"hyp={h.name}", lambda p: edf.supremum_stats(_z_sorted(p, h))[2])


def _make_kuiper(h, **_):
    h = _uni(h)
    return Statistic("kuiper", f"hyp={h.name}", lambda p: edf.supremum_stats(_z_sorted(p, h))[3])


def _make_cvm(h, **_):
    h = _uni(h)
    return Statistic("cvm", f"hyp={h.name}", lambda p: edf.quadratic_stats(_z_sorted(p, h))[0])


def _make_ad(h, **_):
    h = _uni(h)
    return Statistic("ad", f"hyp={h.name}", lambda p: edf.quadratic_stats(_z_sorted(p, h))[1])


def _make_watson(h, **_):
    h = _uni(h)
    return Statistic("watson", f"hyp={h.name}", lambda p: edf.quadratic_stats(_z_sorted(p, h))[2])


def _make_neyman(h, k: int = 2, **_):
    h = _uni(h)
    cfg = smooth.SmoothConfig(k=k)
    return Statistic(
        "neyman", f"hyp={h.name},k={k}",
        lambda p: smooth.neyman_statistic(_z_sorted(p, h), cfg),
    )


def _make_chi2(h, bins: Optional[int] = None, binning: str = "equal_probability",
               mode: str = "multinomial", **_):
    h = _uni(h)
    edge_cache: dict = {}  # binning edges depend only on (nbins, policy)

    def compute(points):
        sample = Sample(np.asarray(points))
        nbins = bins if bins is not None else binned.bin_count_rule(sample.n)
        if nbins not in edge_cache:
            probe = binned.bin_uniform(sample, h, nbins, policy=binning)
            edge_cache[nbins] = (probe.edges, probe.expectations / sample.n)
        edges, probs = edge_cache[nbins]
        idx = np.clip(np.searchsorted(edges, sample.points[:, 0], side="right") - 1, 0, nbins - 1)
        hist = binned.Histogram(
            counts=np.bincount(idx, minlength=nbins),
            expectations=sample.n * probs,
            edges=edges,
        )
        return binned.chi2_statistic(hist, mode=mode)[0]

    return Statistic("chi2", f"hyp={h.name},bins={bins},binning={binning},mode={mode}", compute)


def _make_region3(h, weights: str = "unit", regions: int = 3, **_):
    h = _uni(h)
    return Statistic(
        "region3", f"hyp={h.name},weights={weights},regions={regions}",
        lambda p: region3.three_region_statistic(_z_sorted(p, h), weights, regions)[0],
    )


def _make_energy(h, n: Optional[int] = None, stream: Optional[RandomStream] = None,
                 kernel: str = "log", kappa: float = 0.1, s: Optional[float] = None,
                 dmin: Optional[float] = None, m: Optional[int] = None, **_):
    if not isinstance(h, MultivariateHypothesis):
        raise TypeError("the energy test needs a multivariate hypothesis")
    if h.reference is not None:
        sim = h.reference.points
    else:
        if m is None:
            if n is None:
                raise ValueError("energy needs the sample size n to draw its simulation sample")
            m = 5 * n
        if stream is None:
            raise ValueError("energy needs a RandomStream to draw its simulation sample")
        sim = h.sampler(stream.substream(energy._SIM_STREAM).generator(), m)

    # distances are taken on H0-standardized coordinates when the null is a
    # known Gaussian (a no-op for the standard normal)
    coords = "raw"
    transform = lambda pts: pts  # noqa: E731
    if isinstance(h, GaussianHypothesis):
        from scipy.linalg import solve_triangular

        chol = np.linalg.cholesky(h.cov)
        mean = h.mean

        def transform(pts):
            return solve_triangular(chol, (pts - mean).T, lower=True).T

        coords = "whitened"
    sim = transform(sim)

    if kernel == "gaussian":
        kern = energy.Kernel.gaussian(s if s is not None else energy.default_scale(sim))
    elif kernel == "log":
        kern = energy.Kernel.log(dmin if dmin is not None else energy.default_cutoff(sim))
    elif kernel == "power":
        kern = energy.Kernel.power(kappa, dmin if dmin is not None else energy.default_cutoff(sim))
    else:
        raise ValueError(f"unknown kernel {kernel!r}")

    sim_digest = hashlib.sha256(np.ascontiguousarray(sim).tobytes()).hexdigest()[:12]
    return Statistic(
        "energy",
        f"hyp={h.name},kernel={kern.label()},m={sim.shape[0]},sim={sim_digest},coords={coords}",
        lambda p: energy.energy_statistic(transform(p), sim, kern).phi,
    )


def _gauss(h):
    if not isinstance(h, GaussianHypothesis):
        raise TypeError("this statistic needs a Gaussian hypothesis (known mean and covariance)")
    return h


def _make_mardia_b1(h, **_):
    h = _gauss(h)
    return Statistic(
        "mardia_b1", f"hyp={h.name}",
        lambda p: multinormal.mardia_statistics(Sample(p), h).b1,
    )


def _make_mardia_b2(h, **_):
    h = _gauss(h)
    return Statistic(
        "mardia_b2", f"hyp={h.name}",
        lambda p: multinormal.mardia_statistics(Sample(p), h).b2,
        tail="two_sided",
    )


def _make_neyman_mv(h, k: int = 2, **_):
    h = _gauss(h)
    return Statistic(
        "neyman_mv", f"hyp={h.name},k={k}",
        lambda p: multinormal.neyman_multivariate(Sample(p), h, k=k),
    )


STATISTICS = {
    "ks": _make_ks,
    "kuiper": _make_kuiper,
    "cvm": _make_cvm,
    "ad": _make_ad,
    "watson": _make_watson,
    "neyman": _make_neyman,
    "chi2": _make_chi2,
    "region3": _make_region3,
    "energy": _make_energy,
    "mardia_b1": _make_mardia_b1,
    "mardia_b2": _make_mardia_b2,
    "neyman_mv": _make_neyman_mv,
}


def available_statistics() -> list:
    return sorted(STATISTICS)


def make_statistic(name: str, h, n: Optional[int] = None,
                   stream: Optional[RandomStream] = None, **params) -> Statistic:
    """Build a bound Statistic by registry name.

    `n` and `stream` are only consumed by statistics that need them (the
    energy test draws its simulation sample once at construction).
    """
    try:
        factory = STATISTICS[name]
    except KeyError:
        raise KeyError(
            f"unknown statistic {name!r}; available: {', '.join(available_statistics())}"
        ) from None
    return factory(h, n=n, stream=stream, **params)


_HYP_CALL = re.compile(r"^(\w+)\(([^)]*)\)$")


def parse_hypothesis(spec: str, load_sample=None):
    """Parse a textual hypothesis spec.

    Understood forms: 'uniform01', 'exp(rate)', 'gauss1d(mu,sigma)',
    'gauss2d(m1,m2,c11,c12,c22)' (or bare 'gauss2d' for the standard one)
    and 'sample:<path>' (empirical reference; `load_sample` maps the path
    to a Sample).
    """
    spec = spec.strip()
    if spec == "uniform01":
        return uniform01()
    if spec == "gauss2d":
        return gauss_mv([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    if spec.startswith("sample:"):
        path = spec[len("sample:"):]
        if load_sample is None:
            raise ValueError("sample:<path> spec needs a sample loader")
        return from_reference(load_sample(path))
    match = _HYP_CALL.match(spec)
    if match:
        head, args = match.group(1), match.group(2)
        values = [float(v) for v in args.split(",")] if args.strip() else []
        if head == "exp":
            return exponential(*values) if values else exponential()
        if head == "gauss1d":
            return gauss1d(*values)
        if head == "gauss2d":
            if len(values) != 5:
                raise ValueError("gauss2d takes 5 numbers: m1,m2,c11,c12,c22")
            m1, m2, c11, c12, c22 = values
            return gauss_mv([m1, m2], [[c11, c12], [c12, c22]])
    raise ValueError(
        f"cannot parse hypothesis spec {spec!r}; expected uniform01, exp(rate), "
        "gauss1d(mu,sigma), gauss2d(m1,m2,c11,c12,c22) or sample:<path>"
    )


def run_test(sample: Sample, h, name: str, params: Optional[dict] = None,
             replicas: int = 999, stream: Optional[RandomStream] = None,
             alpha: Optional[float] = None, jobs: int = 1, cache_dir=None) -> TestOutcome:
    """Compute one statistic on a sample and calibrate its p-value by MC.

    With replicas=0 only the statistic value is computed (no p-value).
    """
    if stream is None:
        stream = RandomStream(seed=0)
    params = dict(params or {})
    stat = make_statistic(name, h, n=sample.n, stream=stream, **params)
    points = sample.points if sample.dim > 1 else sample.points[:, 0]
    observed = stat.value(points, stream.substream(2**63 + 1).generator())

    p = None
    if replicas >= 1:
        null = build_null(stat, h, sample.n, replicas, stream, jobs=jobs, cache_dir=cache_dir)
        p = p_value(null, observed, stat.tail)
    reject = None
    if alpha is not None and p is not None:
        reject = (alpha, p <= alpha)
    return TestOutcome(
        statistic_name=stat.name,
        value=observed,
        p_value=p,
        replicas=replicas if p is not None else 0,
        seed=stream.seed,
        reject_at=reject,
    )
