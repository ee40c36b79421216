"""Monte Carlo engine: null distributions, p-values, critical values.

Every p-value in the toolkit comes from here; no asymptotic tables are
consulted. Replicas are farmed over counter-based substreams so the result
is bit-identical for any worker count, and finished distributions can be
cached on disk keyed by a configuration digest.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import RandomStream

__all__ = [
    "Statistic",
    "NullDistribution",
    "config_digest",
    "build_null",
    "p_value",
    "critical_value",
    "save_null",
    "load_null",
]

_CACHE_MAGIC = "gofkit-null-v1"


@dataclass(frozen=True)
class Statistic:
    """A named test statistic bound to its parameters.

    ``compute`` maps raw sample points to the statistic value. Statistics
    that consume extra randomness per replica (fresh-simulation energy
    variant) provide ``compute_with_gen`` instead. ``tail`` states which
    side of the null distribution is extreme: 'upper', 'lower' or
    'two_sided'.
    """

    name: str
    config: str
    compute: Optional[Callable[[np.ndarray], float]] = None
    tail: str = "upper"
    compute_with_gen: Optional[Callable] = None

    def __post_init__(self):
        if self.tail not in ("upper", "lower", "two_sided"):
            raise ValueError(f"unknown tail {self.tail!r}")
        if self.compute is None and self.compute_with_gen is None:
            raise ValueError("statistic needs compute or compute_with_gen")

    def value(self, points: np.ndarray, gen=None) -> float:
        if self.compute_with_gen is not None:
            if gen is None:
                raise ValueError(f"{self.name} needs a generator")
            return float(self.compute_with_gen(points, gen))
        return float(self.compute(points))


@dataclass(frozen=True)
class NullDistribution:
    """Sorted replica values of one statistic under one null configuration."""

    statistic_name: str
    values: np.ndarray
    replicas: int
    seed: int
    config_digest: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size != self.replicas or self.replicas < 1:
            raise ValueError("values must be 1-D with one entry per replica")
        if np.any(np.diff(values) < 0):
            raise ValueError("values must be sorted ascending")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def config_digest(stat: Statistic, hypothesis, n: int, replicas: int, stream: RandomStream) -> str:
    """Digest of statistic parameters, hypothesis identity and run geometry."""
    text = "|".join(
        [
            stat.name,
            stat.config,
            getattr(hypothesis, "name", repr(hypothesis)),
            f"n={n}",
            f"replicas={replicas}",
            f"seed={stream.seed}",
            f"stream={stream.stream_id}",
        ]
    )
    return hashlib.sha256(text.encode()).hexdigest()


def build_null(
    stat: Statistic,
    hypothesis,
    n: int,
    replicas: int,
    stream: RandomStream,
    jobs: int = 1,
    cache_dir=None,
) -> NullDistribution:
    """Draw `replicas` fresh samples of size n under the hypothesis and
    collect the sorted statistic values.

    Replica r uses the child stream stream.substream(r), so the output is
    deterministic given (seed, replicas) and invariant to `jobs`. When
    `cache_dir` is given, a distribution with the same configuration digest
    is loaded from disk instead of recomputed.
    """
    if replicas < 1:
        raise ValueError("need at least one replica")
    digest = config_digest(stat, hypothesis, n, replicas, stream)
    cache_path = None
    if cache_dir is not None:
        cache_path = os.path.join(str(cache_dir), f"{stat.name}-{digest[:16]}.null.txt")
        if os.path.exists(cache_path):
            cached = load_null(cache_path)
            if cached.config_digest == digest:
                return cached

    def one(r: int) -> float:
        gen = stream.substream(r).generator()
        points = hypothesis.sampler(gen, n)
        try:
            return stat.value(points, gen)
        except Exception as exc:
            raise RuntimeError(f"replica {r} failed: {exc}") from exc

    if jobs <= 1:
        values = np.array([one(r) for r in range(replicas)])
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = np.array(list(pool.map(one, range(replicas))))
    values.sort()

    dist = NullDistribution(
        statistic_name=stat.name,
        values=values,
        replicas=replicas,
        seed=stream.seed,
        config_digest=digest,
    )
    if cache_path is not None:
        os.makedirs(str(cache_dir), exist_ok=True)
        save_null(dist, cache_path)
    return dist


def p_value(dist: NullDistribution, observed: float, tail: str = "upper") -> float:
    """Monte Carlo p-value with the add-one rule, so p is never zero.

    upper: (1 + #{values >= observed}) / (replicas + 1); lower mirrors it;
    two_sided doubles the smaller of the two, capped at 1.
    """
    r = dist.replicas
    n_ge = r - int(np.searchsorted(dist.values, observed, side="left"))
    n_le = int(np.searchsorted(dist.values, observed, side="right"))
    upper = (1 + n_ge) / (r + 1)
    lower = (1 + n_le) / (r + 1)
    if tail == "upper":
        return upper
    if tail == "lower":
        return lower
    if tail == "two_sided":
        return min(1.0, 2.0 * min(upper, lower))
    raise ValueError(f"unknown tail {tail!r}")


def critical_value(dist: NullDistribution, alpha: float) -> float:
    """Empirical critical value: the smallest replica value whose strict
    upper-tail count is at most alpha * replicas.

    Rejecting when the observed statistic exceeds this value gives an
    upper-tail test of size alpha (up to MC resolution). Requires
    replicas * alpha >= 5.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0,1)")
    r = dist.replicas
    if r * alpha < 5:
        raise ValueError(f"resolution guard: replicas*alpha = {r * alpha:g} < 5")
    # #{v > values[i]} is non-increasing in i; find the first index meeting the bound
    limit = alpha * r
    above = r - np.searchsorted(dist.values, dist.values, side="right")
    idx = int(np.argmax(above <= limit))
    return float(dist.values[idx])


def save_null(dist: NullDistribution, path) -> None:
    """Write the cache file: one header line plus one value per line.

    Values are serialized with %.17g, which round-trips doubles exactly.
    Written atomically (single writer, any number of readers).
    """
    header = (
        f"# {_CACHE_MAGIC} statistic={dist.statistic_name} replicas={dist.replicas} "
        f"seed={dist.seed} config_digest={dist.config_digest}\n"
    )
    directory = os.path.dirname(os.path.abspath(str(path)))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(header)
            fh.writelines(f"{v:.17g}\n" for v in dist.values)
        os.replace(tmp, str(path))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_null(path) -> NullDistribution:
    """Read a cache file written by save_null."""
    with open(str(path)) as fh:
        header = fh.readline().strip()
        values = np.array([float(line) for line in fh if line.strip()])
    parts = header.lstrip("# ").split()
    if not parts or parts[0] != _CACHE_MAGIC:
        raise ValueError(f"{path} is not a gofkit null-distribution file")
    fields = dict(p.split("=", 1) for p in parts[1:])
    return NullDistribution(
        statistic_name=fields["statistic"],
        values=values,
        replicas=int(fields["replicas"]),
        seed=int(fields["seed"]),
        config_digest=fields["config_digest"],
    )
