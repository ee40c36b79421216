"""Command-line front end: `gof test`, `gof calibrate`, `gof power`.

All outputs are deterministic given the seed; nothing emitted here depends
on wall-clock time or worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .calibrate import config_digest
from .catalog import available_statistics, make_statistic, parse_hypothesis, run_test
from .core import RandomStream, Sample
from . import calibrate as _calibrate
from . import powerlab

__all__ = ["main", "read_event_file", "write_event_file"]


class EventFileError(ValueError):
    pass


def read_event_file(path) -> Sample:
    """Read an event file: one observation per row, '#' lines ignored.

    Values may be whitespace- or comma-delimited; every row must have the
    same number of finite values. Errors name the offending line.
    """
    rows = []
    ncols = None
    with open(str(path)) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.replace(",", " ").split()
            try:
                values = [float(v) for v in fields]
            except ValueError:
                raise EventFileError(f"{path}:{lineno}: cannot parse row {text!r}") from None
            if not all(np.isfinite(values)):
                raise EventFileError(f"{path}:{lineno}: non-finite value in row")
            if ncols is None:
                ncols = len(values)
            elif len(values) != ncols:
                raise EventFileError(
                    f"{path}:{lineno}: expected {ncols} columns, found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise EventFileError(f"{path}: no data rows")
    return Sample(np.array(rows))


def write_event_file(sample: Sample, path) -> None:
    """Write an event file that read_event_file restores bit-exactly."""
    with open(str(path), "w") as fh:
        for row in sample.points:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def _stat_params(args) -> dict:
    params = {}
    if args.kernel is not None:
        params["kernel"] = args.kernel
    if args.kappa is not None:
        params["kappa"] = args.kappa
    if args.s is not None:
        params["s"] = args.s
    if args.dmin is not None:
        params["dmin"] = args.dmin
    if args.k is not None:
        params["k"] = args.k
    if args.bins is not None:
        params["bins"] = args.bins
    if args.binning is not None:
        params["binning"] = {"width": "equal_width", "prob": "equal_probability"}[args.binning]
    if args.weights is not None:
        params["weights"] = args.weights
    if args.regions is not None:
        params["regions"] = args.regions
    return params


def _load_hypothesis(spec: str):
    return parse_hypothesis(spec, load_sample=read_event_file)


def _format_record(pairs) -> str:
    lines = []
    for key, value in pairs:
        if isinstance(value, float):
            lines.append(f"{key} {value:.17g}")
        else:
            lines.append(f"{key} {value}")
    return "\n".join(lines) + "\n"


def _cmd_test(args) -> int:
    sample = read_event_file(args.data)
    hypothesis = _load_hypothesis(args.hypothesis)
    if args.replicas and 0 < args.replicas < 100 and args.alpha <= 0.05:
        print(
            f"warning: {args.replicas} replicas give poor p-value resolution "
            f"for alpha={args.alpha:g}; use at least 100",
            file=sys.stderr,
        )
    stream = RandomStream(seed=args.seed)
    outcome = run_test(
        sample, hypothesis, args.statistic, params=_stat_params(args),
        replicas=args.replicas, stream=stream, alpha=args.alpha,
        jobs=args.jobs, cache_dir=args.cache_dir,
    )
    print(f"statistic : {outcome.statistic_name}")
    print(f"value     : {outcome.value:.10g}")
    if outcome.p_value is not None:
        print(f"p-value   : {outcome.p_value:.10g}  ({outcome.replicas} replicas, seed {outcome.seed})")
        alpha, reject = outcome.reject_at
        print(f"decision  : {'reject' if reject else 'accept'} H0 at alpha={alpha:g}")
    else:
        print("p-value   : not calibrated (replicas=0)")
    if args.out:
        pairs = [
            ("statistic", outcome.statistic_name),
            ("hypothesis", hypothesis.name),
            ("data", args.data),
            ("n", sample.n),
            ("dim", sample.dim),
            ("value", outcome.value),
            ("p_value", "none" if outcome.p_value is None else outcome.p_value),
            ("replicas", outcome.replicas),
            ("seed", outcome.seed),
            ("alpha", args.alpha),
            ("reject", "none" if outcome.reject_at is None else str(outcome.reject_at[1]).lower()),
        ]
        with open(args.out, "w") as fh:
            fh.write(_format_record(pairs))
    return 0


def _cmd_calibrate(args) -> int:
    hypothesis = _load_hypothesis(args.hypothesis)
    if args.replicas < 100:
        print(
            f"warning: {args.replicas} replicas resolve p-values only down to "
            f"{1.0 / (args.replicas + 1):.3g}",
            file=sys.stderr,
        )
    stream = RandomStream(seed=args.seed)
    stat = make_statistic(
        args.statistic, hypothesis, n=args.n, stream=stream, **_stat_params(args)
    )
    cache_dir = args.cache_dir or ".gof-cache"
    digest = config_digest(stat, hypothesis, args.n, args.replicas, stream)
    path = os.path.join(cache_dir, f"{stat.name}-{digest[:16]}.null.txt")
    if os.path.exists(path):
        print(f"cache hit: {path}")
        return 0
    _calibrate.build_null(
        stat, hypothesis, args.n, args.replicas, stream, jobs=args.jobs, cache_dir=cache_dir
    )
    print(f"calibrated {stat.name} (n={args.n}, {args.replicas} replicas) -> {path}")
    return 0


def _cmd_power(args) -> int:
    config = powerlab.load_study_config(args.config, load_sample=read_event_file)
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.seed is not None:
        config.seed = args.seed
    table = powerlab.run_study(config)
    out = args.out or "power_table.csv"
    powerlab.write_power_table(table, out)
    print(f"wrote {len(table.rows)} rows -> {out}")
    for err in table.errors:
        print(f"cell failed: {err}", file=sys.stderr)
    if args.charts:
        try:
            for path in powerlab.render_charts(table, args.charts):
                print(f"chart -> {path}")
        except Exception as exc:  # chart emission is best-effort
            print(f"warning: chart emission failed: {exc}", file=sys.stderr)
    return 0


def _add_shared(parser: argparse.ArgumentParser, *, seed_default=0) -> None:
    parser.add_argument("--seed", type=int, default=seed_default, help="master seed")
    parser.add_argument("--replicas", type=int, default=999, help="MC calibration replicas")
    parser.add_argument("--alpha", type=float, default=0.05, help="significance level")
    parser.add_argument("--jobs", type=int, default=1, help="worker count (never changes results)")
    parser.add_argument("--cache-dir", default=None, help="null-distribution cache directory")
    parser.add_argument("--out", default=None, help="output file path")


def _add_stat_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", choices=["power", "log", "gaussian"], default=None)
    parser.add_argument("--kappa", type=float, default=None, help="power-kernel exponent")
    parser.add_argument("--s", type=float, default=None, help="gaussian kernel width")
    parser.add_argument("--dmin", type=float, default=None, help="kernel distance cutoff")
    parser.add_argument("--k", type=int, default=None, help="smooth-test order")
    parser.add_argument("--bins", type=int, default=None, help="histogram bin count")
    parser.add_argument("--binning", choices=["width", "prob"], default=None)
    parser.add_argument("--weights", choices=["unit", "chi"], default=None)
    parser.add_argument("--regions", type=int, default=None, help="region count (3-5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gof", description="goodness-of-fit tests with Monte Carlo calibration"
    )
    parser.add_argument("--version", action="version", version=f"gofkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run one test on an event file")
    t.add_argument("data", help="event file (one observation per row)")
    t.add_argument("hypothesis", help="uniform01 | exp(r) | gauss1d(m,s) | gauss2d(...) | sample:<path>")
    t.add_argument("statistic", help=f"one of: {', '.join(available_statistics())}")
    _add_shared(t)
    _add_stat_flags(t)
    t.set_defaults(func=_cmd_test)

    c = sub.add_parser("calibrate", help="build and cache a null distribution")
    c.add_argument("hypothesis")
    c.add_argument("statistic")
    c.add_argument("-n", type=int, required=True, help="sample size of the null")
    _add_shared(c)
    _add_stat_flags(c)
    c.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("power", help="run a power study from a YAML config")
    p.add_argument("config", help="study config file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--jobs", type=int, default=None, help="override the config worker count")
    p.add_argument("--out", default=None, help="power table output path")
    p.add_argument("--charts", default=None, help="directory for bar charts (best effort)")
    p.set_defaults(func=_cmd_power)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
