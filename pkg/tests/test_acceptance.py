"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines. Everything
is seeded, so outcomes are reproducible bit-for-bit; the statistical
tolerances are the declared ones (3 binomial sigma for sizes, two-proportion
z > 2 for directional power claims, KS distance 0.02 for asymptotics).
"""

import functools
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.stats import chi2 as chi2_dist
from scipy.stats import kstest

from gofkit.calibrate import build_null, p_value
from gofkit.catalog import make_statistic
from gofkit.cli import write_event_file
from gofkit.core import RandomStream, Sample, gauss2d, uniform01
from gofkit.edf import quadratic_stats, supremum_stats
from gofkit.powerlab import contamination_model, mixture_sampler
from gofkit.region3 import three_region_statistic

from oracles import (
    a2_oracle,
    supremum_oracle,
    three_region_scan,
    u2_oracle,
    w2_oracle,
)

ALPHA = 0.05


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"\n[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} — {detail}")


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-12)


# ---------------------------------------------------------------------------
# Criterion 1: oracle equivalence, exact forms vs defining integrals/suprema
# ---------------------------------------------------------------------------

def test_c1_oracle_equivalence():
    start = time.time()
    gen = RandomStream(seed=0xC1).generator()
    worst_edf = 0.0
    region_mismatches = 0
    for _ in range(200):
        n = int(gen.integers(1, 201))
        z = np.sort(gen.random(n))

        d_plus, d_minus, _, _ = supremum_stats(z)
        od_plus, od_minus = supremum_oracle(z)
        w2, a2, u2, _ = quadratic_stats(z)
        worst_edf = max(
            worst_edf,
            _rel_err(d_plus, od_plus),
            _rel_err(d_minus, od_minus),
            _rel_err(w2, w2_oracle(z)),
            _rel_err(a2, a2_oracle(z)),
            _rel_err(u2, u2_oracle(z)),
        )

        if three_region_statistic(z, "unit")[0] != three_region_scan(z.tolist(), "unit"):
            region_mismatches += 1
        if n >= 2 and three_region_statistic(z, "chi")[0] != three_region_scan(z.tolist(), "chi"):
            region_mismatches += 1
    elapsed = time.time() - start

    ok = worst_edf < 1e-8 and region_mismatches == 0 and elapsed < 60
    _report(
        "criterion 1 (oracle equivalence)", ok,
        f"worst EDF relative error {worst_edf:.2e} (tol 1e-8), "
        f"three-region mismatches {region_mismatches}/200, runtime {elapsed:.1f}s (< 60s)",
    )
    assert worst_edf < 1e-8
    assert region_mismatches == 0
    assert elapsed < 60


# ---------------------------------------------------------------------------
# Criteria 2 and 7 share one calibration + trial run per statistic
# ---------------------------------------------------------------------------

# calibration replicas are an order of magnitude above the trial count so
# the noise of the estimated critical region is negligible next to the
# criterion's 3-binomial-sigma band over the trials
UNI_N, UNI_REPLICAS, UNI_TRIALS = 100, 99_999, 10_000
BI_N, BI_REPLICAS, BI_TRIALS = 200, 99_999, 10_000
ENERGY_REPLICAS, ENERGY_TRIALS = 9999, 2000

SIZE_CONFIGS = {
    # key: (hypothesis kind, statistic name, params, n, replicas, trials, seed)
    "ks": ("uni", "ks", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC201),
    "kuiper": ("uni", "kuiper", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC202),
    "cvm": ("uni", "cvm", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC203),
    "ad": ("uni", "ad", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC204),
    "watson": ("uni", "watson", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC205),
    "neyman": ("uni", "neyman", {"k": 2}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC206),
    "chi2": ("uni", "chi2", {"bins": 13}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC207),
    "chi2_n20": ("uni", "chi2", {}, 20, UNI_REPLICAS, UNI_TRIALS, 0xC208),
    "region3": ("uni", "region3", {}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC219),
    "region3_chi": ("uni", "region3", {"weights": "chi"}, UNI_N, UNI_REPLICAS, UNI_TRIALS, 0xC20A),
    "mardia_b1": ("bi", "mardia_b1", {}, BI_N, BI_REPLICAS, BI_TRIALS, 0xC20B),
    "mardia_b2": ("bi", "mardia_b2", {}, BI_N, BI_REPLICAS, BI_TRIALS, 0xC20C),
    "neyman_mv": ("bi", "neyman_mv", {"k": 2}, BI_N, BI_REPLICAS, BI_TRIALS, 0xC20D),
    "energy": ("bi", "energy", {"kernel": "log", "m": 1000}, BI_N,
               ENERGY_REPLICAS, ENERGY_TRIALS, 0xC20E),
}

# chi2_n20 exists for the small-sample size invariant of the binned module;
# the per-statistic uniformity criterion runs at the n=100 configuration
# (its n=20 p-values live on a visibly discrete lattice)
C7_EXCLUDED = {"chi2_n20"}


@functools.lru_cache(maxsize=None)
def _size_run(key: str):
    kind, name, params, n, replicas, trials, seed = SIZE_CONFIGS[key]
    h = uniform01() if kind == "uni" else gauss2d()
    stream = RandomStream(seed=seed)
    stat = make_statistic(name, h, n=n, stream=stream, **params)
    null = build_null(stat, h, n, replicas, stream.substream(0))

    trial_root = stream.substream(1)
    values = np.empty(trials)
    for t in range(trials):
        gen = trial_root.substream(t).generator()
        values[t] = stat.value(h.sampler(gen, n), gen)

    n_ge = replicas - np.searchsorted(null.values, values, side="left")
    n_le = np.searchsorted(null.values, values, side="right")
    upper = (1 + n_ge) / (replicas + 1)
    lower = (1 + n_le) / (replicas + 1)
    if stat.tail == "two_sided":
        pvals = np.minimum(1.0, 2.0 * np.minimum(upper, lower))
    else:
        pvals = upper
    # spot check against the scalar engine rule
    assert pvals[0] == p_value(null, values[0], stat.tail)
    return float(np.mean(pvals <= ALPHA)), pvals, trials


def test_c2_size_calibration():
    failures = []
    details = []
    for key in SIZE_CONFIGS:
        rate, _, trials = _size_run(key)
        sigma = np.sqrt(ALPHA * (1 - ALPHA) / trials)
        details.append(f"{key}={rate:.4f}")
        if abs(rate - ALPHA) > 3 * sigma:
            failures.append(f"{key}: rate {rate:.4f} outside 0.05 +/- {3 * sigma:.4f}")
    _report(
        "criterion 2 (size calibration at alpha=0.05)", not failures,
        "rejection rates " + ", ".join(details),
    )
    assert not failures, failures


def test_c7_p_value_uniformity():
    failures = []
    details = []
    for key in SIZE_CONFIGS:
        if key in C7_EXCLUDED:
            continue
        _, pvals, _ = _size_run(key)
        ks_p = kstest(pvals[:1000], "uniform").pvalue
        details.append(f"{key}:p={ks_p:.3f}")
        if ks_p <= 0.01:
            failures.append(f"{key}: uniformity KS p-value {ks_p:.4f} <= 0.01")
    _report(
        "criterion 7 (p-value uniformity, 1000 null p-values each)", not failures,
        ", ".join(details),
    )
    assert not failures, failures


# ---------------------------------------------------------------------------
# Criterion 3: asymptotic consistency with the chi-squared laws
# ---------------------------------------------------------------------------

def _ks_distance_to(values: np.ndarray, cdf) -> float:
    v = np.sort(values)
    r = v.size
    grid = cdf(v)
    i = np.arange(1, r + 1)
    return float(max(np.max(i / r - grid), np.max(grid - (i - 1) / r)))


def test_c3_asymptotic_consistency():
    h = uniform01()

    stat = make_statistic("chi2", h, bins=13, mode="multinomial")
    null = build_null(stat, h, 10_000, 10_000, RandomStream(seed=0xC301))
    d_chi2 = _ks_distance_to(null.values, lambda v: chi2_dist.cdf(v, 12))

    stat = make_statistic("neyman", h, k=2)
    null = build_null(stat, h, 1000, 10_000, RandomStream(seed=0xC302))
    d_neyman = _ks_distance_to(null.values, lambda v: chi2_dist.cdf(v, 2))

    ok = d_chi2 < 0.02 and d_neyman < 0.02
    _report(
        "criterion 3 (asymptotic consistency)", ok,
        f"KS(multinomial chi2 at n=1e4, B=13 | chi2_12) = {d_chi2:.4f}, "
        f"KS(N_2 at n=1000 | chi2_2) = {d_neyman:.4f}, tol 0.02",
    )
    assert d_chi2 < 0.02
    assert d_neyman < 0.02


# ---------------------------------------------------------------------------
# Criterion 4: directional power claims at declared contaminations
# ---------------------------------------------------------------------------

POWER_TRIALS = 2000
POWER_REPLICAS = 1999


def _power(stat, h, model, n, seed) -> float:
    stream = RandomStream(seed=seed)
    null = build_null(stat, h, n, POWER_REPLICAS, stream.substream(0))
    draw = mixture_sampler(h, model)
    trial_root = stream.substream(1)
    rejections = 0
    for t in range(POWER_TRIALS):
        gen = trial_root.substream(t).generator()
        if p_value(null, stat.value(draw(gen, n), gen), stat.tail) <= ALPHA:
            rejections += 1
    return rejections / POWER_TRIALS


def _z_two_proportion(p1: float, p2: float, trials: int) -> float:
    pooled = (p1 + p2) / 2
    se = np.sqrt(max(pooled * (1 - pooled), 1e-12) * 2 / trials)
    return (p1 - p2) / se


def test_c4_directional_power_claims():
    failures = []
    details = []

    # (a) mean shift: uniform background on [0, 0.5], fraction 0.3, n=100
    h = uniform01()
    model = contamination_model("mean_shift", 0.3)
    p_chi2 = _power(make_statistic("chi2", h, bins=13), h, model, 100, 0xC4A0)
    for name, params, seed in [("ks", {}, 0xC4A1), ("ad", {}, 0xC4A2),
                               ("neyman", {"k": 2}, 0xC4A3)]:
        p = _power(make_statistic(name, h, **params), h, model, 100, seed)
        z = _z_two_proportion(p, p_chi2, POWER_TRIALS)
        details.append(f"a:{name}={p:.3f} vs chi2={p_chi2:.3f} (z={z:.1f})")
        if z <= 2:
            failures.append(f"(a) {name} not above chi2: z={z:.2f}")

    # (b) variance distortion: double hump at the ends, fraction 0.3
    model = contamination_model("variance_up", 0.3)
    p_ks = _power(make_statistic("ks", h), h, model, 100, 0xC4B0)
    for name, seed in [("kuiper", 0xC4B1), ("watson", 0xC4B2)]:
        p = _power(make_statistic(name, h), h, model, 100, seed)
        z = _z_two_proportion(p, p_ks, POWER_TRIALS)
        details.append(f"b:{name}={p:.3f} vs ks={p_ks:.3f} (z={z:.1f})")
        if z <= 2:
            failures.append(f"(b) {name} not above ks: z={z:.2f}")

    # (c) 2-D clustered background: tight blob at (1,1), fraction 0.2, n=200
    h2 = gauss2d()
    model = contamination_model("blob2d", 0.2)
    stream = RandomStream(seed=0xC4C0)
    p_energy = _power(
        make_statistic("energy", h2, kernel="log", n=200, m=1000, stream=stream),
        h2, model, 200, 0xC4C1,
    )
    p_b1 = _power(make_statistic("mardia_b1", h2), h2, model, 200, 0xC4C2)
    z = _z_two_proportion(p_energy, p_b1, POWER_TRIALS)
    details.append(f"c:energy={p_energy:.3f} vs mardia_b1={p_b1:.3f} (z={z:.1f})")
    if z <= 2:
        failures.append(f"(c) energy not above mardia_b1: z={z:.2f}")

    _report("criterion 4 (directional power claims)", not failures, "; ".join(details))
    assert not failures, failures


# ---------------------------------------------------------------------------
# Criterion 5: the observed-above-all-replicas reading
# ---------------------------------------------------------------------------

def test_c5_distorted_sample_above_all_replicas():
    h = gauss2d()
    stream = RandomStream(seed=0xC5)
    stat = make_statistic("energy", h, kernel="log", n=200, m=1000, stream=stream)
    null = build_null(stat, h, 200, 1000, stream.substream(0))

    # deliberately distorted sample: 30% of the points collapsed into a
    # tight off-center cluster
    gen = stream.substream(99).generator()
    points = h.sampler(gen, 200)
    points[:60] = np.array([2.0, 2.0]) + 0.1 * gen.standard_normal((60, 2))
    observed = stat.value(points)
    p = p_value(null, observed)

    ok = observed > null.values[-1] and p == pytest.approx(1 / 1001)
    _report(
        "criterion 5 (distorted sample beats all 1000 MC replicas)", ok,
        f"observed phi {observed:.5f} > max replica {null.values[-1]:.5f}, p = {p:.6f} = 1/1001",
    )
    assert observed > null.values[-1]
    assert p == 1 / 1001


# ---------------------------------------------------------------------------
# Criterion 6: CLI determinism and worker-count invariance
# ---------------------------------------------------------------------------

def _gof(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "gofkit.cli", *map(str, args)],
        capture_output=True, cwd=str(cwd), check=False,
    )


def test_c6_cli_determinism(tmp_path):
    gen = RandomStream(seed=0xC6).generator()
    data = tmp_path / "events.txt"
    write_event_file(Sample.from_1d(gen.random(80)), data)

    args = ("test", data, "uniform01", "ad", "--replicas", 200, "--seed", 11,
            "--out", tmp_path / "record.txt")
    first = _gof(*args, cwd=tmp_path)
    rec1 = (tmp_path / "record.txt").read_bytes()
    second = _gof(*args, cwd=tmp_path)
    rec2 = (tmp_path / "record.txt").read_bytes()
    rerun_ok = first.returncode == 0 and first.stdout == second.stdout and rec1 == rec2

    blobs = []
    for jobs in (1, 2, 8):
        cache = tmp_path / f"cache{jobs}"
        res = _gof("calibrate", "uniform01", "cvm", "-n", 50, "--replicas", 150,
                   "--seed", 11, "--jobs", jobs, "--cache-dir", cache, cwd=tmp_path)
        assert res.returncode == 0, res.stderr
        blobs.append(next(cache.glob("*.null.txt")).read_bytes())
    jobs_ok = blobs[0] == blobs[1] == blobs[2]

    _report(
        "criterion 6 (CLI determinism)", rerun_ok and jobs_ok,
        f"identical rerun bytes: {rerun_ok}, calibration invariant to --jobs 1/2/8: {jobs_ok}",
    )
    assert rerun_ok
    assert jobs_ok
