"""Contamination models and the power-study harness.

A contamination model mixes the null with a named background distribution;
`estimate_power` calibrates a statistic under the pure null once and counts
rejections over contaminated trials; `run_study` drives the full
statistics x models x n grid of a study config. The background shapes are
this artifact's own definitions (a mean-shift model and two variance
distortions for [0,1]; a clustered blob, a ring and an elongated diagonal
for the 2-D Gaussian) and every emitted table records their formulas.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np
import yaml

from . import __version__
from .calibrate import Statistic, build_null, p_value
from .catalog import make_statistic, parse_hypothesis
from .core import RandomStream

__all__ = [
    "ContaminationModel",
    "PowerRow",
    "PowerTable",
    "StudyConfig",
    "univariate_models",
    "bivariate_models",
    "contamination_model",
    "mixture_sampler",
    "estimate_power",
    "run_study",
    "load_study_config",
    "write_power_table",
    "render_charts",
]


@dataclass(frozen=True)
class ContaminationModel:
    """A background admixture: each point is background with prob `fraction`."""

    name: str
    background_sampler: Callable[[np.random.Generator, int], np.ndarray]
    fraction: float
    formula: str = ""

    def __post_init__(self):
        if not (0.0 <= self.fraction <= 1.0):
            raise ValueError("fraction must be in [0,1]")

    def with_fraction(self, fraction: float) -> "ContaminationModel":
        return replace(self, fraction=fraction)


def mixture_sampler(h0, model: ContaminationModel):
    """Sampler for the contaminated mixture, Bernoulli(fraction) per point."""

    def sampler(gen: np.random.Generator, size: int) -> np.ndarray:
        keep_background = gen.random(size) < model.fraction
        points = h0.sampler(gen, size)
        n_bg = int(keep_background.sum())
        if n_bg:
            points = np.array(points)
            points[keep_background] = model.background_sampler(gen, n_bg)
        return points

    return sampler


# ---------------------------------------------------------------------------
# Built-in background shapes
# ---------------------------------------------------------------------------

def _double_hump(gen, size):
    side = gen.random(size) < 0.5
    low = gen.triangular(0.0, 0.0, 0.25, size)
    high = gen.triangular(0.75, 1.0, 1.0, size)
    return np.where(side, low, high)


def _ring2d(gen, size):
    angle = gen.random(size) * 2 * np.pi
    radius = 2.0 + 0.2 * gen.standard_normal(size)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def _diag2d(gen, size):
    along = gen.normal(0.0, 2.5, size)
    across = gen.normal(0.0, 0.3, size)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    return np.column_stack([
        (along - across) * inv_sqrt2,
        (along + across) * inv_sqrt2,
    ])


def univariate_models(fraction: float = 0.3) -> dict:
    """Named background analogs for the uniform[0,1] null."""
    return {
        "mean_shift": ContaminationModel(
            "mean_shift", lambda gen, size: 0.5 * gen.random(size), fraction,
            formula="uniform on [0, 0.5]",
        ),
        "variance_up": ContaminationModel(
            "variance_up", _double_hump, fraction,
            formula="1/2 triangular(0,0,0.25) + 1/2 triangular(0.75,1,1)",
        ),
        "variance_down": ContaminationModel(
            "variance_down", lambda gen, size: gen.triangular(0.4, 0.5, 0.6, size), fraction,
            formula="triangular(0.4, 0.5, 0.6)",
        ),
    }


def bivariate_models(fraction: float = 0.2) -> dict:
    """Named background analogs for the standard 2-D Gaussian null."""
    return {
        "blob2d": ContaminationModel(
            "blob2d",
            lambda gen, size: np.array([1.0, 1.0]) + 0.2 * gen.standard_normal((size, 2)),
            fraction,
            formula="gaussian blob at (1,1), sd 0.2",
        ),
        "ring2d": ContaminationModel(
            "ring2d", _ring2d, fraction,
            formula="ring of radius 2, radial sd 0.2",
        ),
        "diag2d": ContaminationModel(
            "diag2d", _diag2d, fraction,
            formula="diagonal gaussian, sd 2.5 along / 0.3 across",
        ),
    }


def contamination_model(name: str, fraction: Optional[float] = None) -> ContaminationModel:
    """Look up a built-in model by name, optionally overriding the fraction."""
    models = {**univariate_models(), **bivariate_models()}
    try:
        model = models[name]
    except KeyError:
        raise KeyError(
            f"unknown contamination model {name!r}; available: {', '.join(sorted(models))}"
        ) from None
    return model if fraction is None else model.with_fraction(fraction)


# ---------------------------------------------------------------------------
# Power estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerRow:
    statistic_name: str
    contamination_name: str
    n: int
    alpha: float
    power_estimate: float
    binomial_sigma: float
    trials: int


@dataclass
class PowerTable:
    rows: List[PowerRow] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    seed: int = 0
    model_formulas: dict = field(default_factory=dict)


def estimate_power(
    stat: Statistic,
    h0,
    model: ContaminationModel,
    n: int,
    alpha: float,
    trials: int,
    calibration_replicas: int,
    stream: RandomStream,
    null=None,
    label: Optional[str] = None,
    jobs: int = 1,
) -> PowerRow:
    """Rejection rate of one calibrated test against one contamination.

    The null distribution is built once under the pure H0 (or passed in via
    `null`); each trial draws a contaminated sample and rejects when its MC
    p-value is at most alpha.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if null is None:
        null = build_null(stat, h0, n, calibration_replicas, stream.substream(0), jobs=jobs)
    draw = mixture_sampler(h0, model)
    trial_root = stream.substream(1)

    rejections = 0
    for t in range(trials):
        gen = trial_root.substream(t).generator()
        points = draw(gen, n)
        value = stat.value(points, gen)
        if p_value(null, value, stat.tail) <= alpha:
            rejections += 1
    power = rejections / trials
    sigma = math.sqrt(max(power * (1 - power), 1e-12) / trials)
    return PowerRow(
        statistic_name=label or stat.name,
        contamination_name=model.name,
        n=n,
        alpha=alpha,
        power_estimate=power,
        binomial_sigma=sigma,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# Study driver
# ---------------------------------------------------------------------------

@dataclass
class StudyConfig:
    hypothesis: object
    statistics: List[dict]      # each: {"name": ..., optional "label", params}
    models: List[ContaminationModel]
    ns: List[int]
    alpha: float = 0.05
    trials: int = 1000
    calibration_replicas: int = 999
    seed: int = 0
    jobs: int = 1


def run_study(config: StudyConfig) -> PowerTable:
    """Cross product statistics x models x n; deterministic given the seed.

    Calibration streams are keyed by (statistic, n) so all models of a cell
    share one null distribution; failures are recorded per cell and the
    study continues.
    """
    master = RandomStream(seed=config.seed)
    table = PowerTable(seed=config.seed)
    for model in config.models:
        table.model_formulas[model.name] = (
            f"fraction={model.fraction:g} background: {model.formula}"
        )

    cells = []
    for si, spec in enumerate(config.statistics):
        for ni, n in enumerate(config.ns):
            cal_stream = master.substream(1_000_000 + si * len(config.ns) + ni)
            for mi, model in enumerate(config.models):
                cell_idx = (si * len(config.ns) + ni) * len(config.models) + mi
                cells.append((cell_idx, spec, n, model, cal_stream))

    def run_cell(cell):
        cell_idx, spec, n, model, cal_stream = cell
        spec = dict(spec)
        name = spec.pop("name")
        label = spec.pop("label", name)
        stat = make_statistic(name, config.hypothesis, n=n, stream=cal_stream, **spec)
        null = build_null(stat, config.hypothesis, n, config.calibration_replicas,
                          cal_stream.substream(0))
        row = estimate_power(
            stat, config.hypothesis, model, n, config.alpha, config.trials,
            config.calibration_replicas,
            master.substream(2_000_000 + cell_idx), null=null, label=label,
        )
        return row

    results = {}
    if config.jobs <= 1:
        for cell in cells:
            try:
                results[cell[0]] = run_cell(cell)
            except Exception as exc:
                spec, n, model = cell[1], cell[2], cell[3]
                table.errors.append(f"{spec.get('name')}/{model.name}/n={n}: {exc}")
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {pool.submit(run_cell, cell): cell for cell in cells}
            for future, cell in futures.items():
                try:
                    results[cell[0]] = future.result()
                except Exception as exc:
                    spec, n, model = cell[1], cell[2], cell[3]
                    table.errors.append(f"{spec.get('name')}/{model.name}/n={n}: {exc}")

    table.rows = [results[i] for i in sorted(results)]
    table.errors.sort()
    return table


def load_study_config(path, load_sample=None) -> StudyConfig:
    """Read a YAML study description (see README for the schema)."""
    with open(str(path)) as fh:
        raw = yaml.safe_load(fh)
    hypothesis = parse_hypothesis(str(raw["hypothesis"]), load_sample=load_sample)

    statistics = []
    for entry in raw["statistics"]:
        if isinstance(entry, str):
            statistics.append({"name": entry})
        else:
            statistics.append(dict(entry))

    models = []
    for entry in raw["models"]:
        if isinstance(entry, str):
            models.append(contamination_model(entry))
        else:
            entry = dict(entry)
            models.append(contamination_model(entry["name"], entry.get("fraction")))

    ns = raw.get("n", [100])
    if isinstance(ns, int):
        ns = [ns]
    return StudyConfig(
        hypothesis=hypothesis,
        statistics=statistics,
        models=models,
        ns=[int(v) for v in ns],
        alpha=float(raw.get("alpha", 0.05)),
        trials=int(raw.get("trials", 1000)),
        calibration_replicas=int(raw.get("calibration_replicas", 999)),
        seed=int(raw.get("seed", 0)),
        jobs=int(raw.get("jobs", 1)),
    )


def write_power_table(table: PowerTable, path) -> None:
    """Delimited-text power table with a provenance header."""
    lines = [f"# gofkit-power-v1 seed={table.seed} version={__version__}"]
    for name in sorted(table.model_formulas):
        lines.append(f"# model {name}: {table.model_formulas[name]}")
    for err in table.errors:
        lines.append(f"# error {err}")
    lines.append("statistic,model,n,alpha,power,sigma,trials")
    for row in table.rows:
        lines.append(
            f"{row.statistic_name},{row.contamination_name},{row.n},{row.alpha:g},"
            f"{row.power_estimate:.6f},{row.binomial_sigma:.6f},{row.trials}"
        )
    with open(str(path), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def render_charts(table: PowerTable, directory) -> List[str]:
    """Best effort bar chart per contamination model; returns written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import os

    os.makedirs(str(directory), exist_ok=True)
    written = []
    by_model = {}
    for row in table.rows:
        by_model.setdefault(row.contamination_name, []).append(row)
    for model, rows in sorted(by_model.items()):
        labels = [f"{r.statistic_name}\nn={r.n}" for r in rows]
        powers = [r.power_estimate for r in rows]
        sigmas = [r.binomial_sigma for r in rows]
        fig, ax = plt.subplots(figsize=(max(4, 0.9 * len(rows)), 3.2))
        ax.bar(range(len(rows)), powers, yerr=sigmas, capsize=3, color="steelblue")
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(labels, fontsize=8)
        ax.set_ylim(0, 1)
        ax.set_ylabel(f"power at alpha={rows[0].alpha:g}")
        ax.set_title(f"contamination: {model}")
        fig.tight_layout()
        out = os.path.join(str(directory), f"power_{model}.png")
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)
    return written
