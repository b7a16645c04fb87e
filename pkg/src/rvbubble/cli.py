"""Command-line interface tying the pipeline together."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .critical_values import builtin_cv, simulate_null_table
from .datestamp import default_min_duration
from .figures import save_detector_figure, save_path_figure
from .io import (IngestSpec, IngestError, UnequalBarsError, file_digest,
                 load_grouped, load_price_path, run_price_test, trace_to_text)
from .monte_carlo import (KNOWN_TESTS, McConfig, run_power_experiment,
                          run_size_experiment)
from .simulate import (BubbleCrashDrift, GridSpec, HestonParams, NullDrift,
                       OneShiftDrift, simulate_heston)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tau0", type=float, default=0.1,
                   help="smallest sample fraction for recursive statistics "
                        "(default 0.1)")
    p.add_argument("--level", type=float, default=0.05,
                   help="significance level (default 0.05)")
    p.add_argument("--out", help="write output to this file instead of stdout")


def _add_ingest(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="delimited input file")
    p.add_argument("--timestamp-col", default="timestamp")
    p.add_argument("--price-col", default="price")
    p.add_argument("--scale", choices=("raw-price", "log-price", "log-return"),
                   default="raw-price")
    p.add_argument("--rule", choices=("fixed-count", "day", "month"),
                   default="fixed-count")
    p.add_argument("--steps", type=int, default=1,
                   help="fine steps per interval under the fixed-count rule")
    p.add_argument("--demean", action="store_true",
                   help="center fine increments by their within-interval mean "
                        "before squaring (monthly-from-daily convention)")
    p.add_argument("--allow-unequal", action="store_true",
                   help="accept calendar intervals with unequal bar counts "
                        "(realized variance is computed over whatever bars "
                        "each interval has)")


def _ingest_spec(args, **overrides) -> IngestSpec:
    base = dict(path=args.input, timestamp_column=args.timestamp_col,
                price_column=args.price_col, scale=args.scale, rule=args.rule,
                steps_per_interval=args.steps, demean=args.demean,
                allow_unequal=args.allow_unequal)
    base.update(overrides)
    return IngestSpec(**base)


def _load_series(args):
    """Coarse prices, realized variances, labels, and provenance for tests."""
    prov = {"input_digest": file_digest(args.input)}
    if args.demean:
        prov["demeaned"] = "yes"
    vol_input = getattr(args, "vol_input", None)
    if vol_input:
        spec = _ingest_spec(args, rule="fixed-count", steps_per_interval=1)
        path, labels = load_price_path(spec)
        coarse = path.coarse_log_prices()
        vol_spec = IngestSpec(
            path=vol_input, timestamp_column=args.timestamp_col,
            price_column=args.price_col, scale=args.vol_scale,
            rule=args.vol_rule, demean=args.demean, allow_unequal=True)
        grouped = load_grouped(vol_spec)
        if grouped.n_intervals != len(coarse) - 1:
            raise IngestError(
                f"price file has {len(coarse) - 1} intervals but volatility "
                f"file has {grouped.n_intervals}")
        rv = grouped.rv_values(args.demean)
        prov["proxy_volatility"] = "yes"
        prov["vol_input_digest"] = file_digest(vol_input)
        return coarse, rv, labels, prov
    if args.rule != "fixed-count" and args.allow_unequal:
        grouped = load_grouped(_ingest_spec(args))
        labels = [grouped.labels[0]] + list(grouped.labels)
        return (grouped.coarse_log_prices, grouped.rv_values(args.demean),
                labels, prov)
    path, labels = load_price_path(_ingest_spec(args))
    from .realized import rv_series
    rv = rv_series(path, args.demean).values
    return path.coarse_log_prices(), rv, labels, prov


def _build_schedule(args):
    if args.schedule == "null":
        return NullDrift()
    if args.schedule == "one-shift":
        return OneShiftDrift(args.shift_frac, args.rate)
    return BubbleCrashDrift(args.bubble_start, args.bubble_end,
                            args.bubble_scale, args.bubble_decay,
                            args.reinit_offset)


def _cmd_simulate(args) -> int:
    grid = GridSpec(args.n, args.steps, args.interval_length)
    params = HestonParams(args.mean_reversion, args.long_run_var,
                          args.vol_of_vol, args.initial_var)
    path = simulate_heston(params, _build_schedule(args), grid, args.seed)
    lines = ["step\ttime\tlog_price\tvariance"]
    h = grid.step_length
    for k, (y, v) in enumerate(zip(path.log_prices, path.variance_path)):
        lines.append(f"{k}\t{k * h:.17g}\t{y:.17g}\t{v:.17g}")
    _write("\n".join(lines) + "\n", args.out)
    if args.plot:
        save_path_figure(path, args.plot, title="simulated path")
    return 0


def _cmd_rv(args) -> int:
    _, rv, labels, _ = _load_series(args)
    lines = ["interval\tlabel\trv"]
    for i, value in enumerate(rv, start=1):
        lines.append(f"{i}\t{labels[i]}\t{value:.17g}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_test(args) -> int:
    coarse, rv, labels, prov = _load_series(args)
    report, trace = run_price_test(
        coarse, rv, args.test, args.tau0, labels=labels,
        datestamp_cv=args.datestamp_cv, min_episode=args.min_episode,
        provenance=prov)
    _write(report.to_text(), args.out)
    if args.trace_out:
        Path(args.trace_out).write_text(trace_to_text(trace, args.datestamp_cv))
    if args.plot:
        from .datestamp import date_stamp
        stamped = date_stamp(trace, args.datestamp_cv)
        save_detector_figure(trace, args.datestamp_cv, args.plot,
                             episodes=stamped,
                             title=f"{args.test} detector")
    return 0


def _cmd_datestamp(args) -> int:
    coarse, rv, labels, prov = _load_series(args)
    report, trace = run_price_test(
        coarse, rv, args.test, args.tau0, labels=labels,
        datestamp_cv=args.cv, min_duration=args.min_duration,
        min_episode=args.min_episode, provenance=prov)
    _write(report.to_text(), args.out)
    if args.trace_out:
        Path(args.trace_out).write_text(trace_to_text(trace, args.cv))
    if args.plot:
        from .datestamp import date_stamp
        stamped = date_stamp(trace, args.cv, args.min_duration)
        save_detector_figure(trace, args.cv, args.plot, episodes=stamped,
                             title=f"{args.test} date-stamping")
    return 0


def _cmd_critvals(args) -> int:
    if args.builtin:
        lines = ["kind\tlevel\tvalue"]
        for lv in (0.01, 0.05, 0.10):
            lines.append(f"pwy-sup\t{lv:g}\t{builtin_cv('pwy-sup', lv):g}")
        lines.append(f"df-marginal\t0.05\t{builtin_cv('df-marginal', 0.05):g}")
        _write("\n".join(lines) + "\n", args.out)
        return 0
    table = simulate_null_table(args.n, args.tau0, args.reps, args.seed,
                                levels=tuple(args.levels))
    _write(table.to_text(), args.out)
    return 0


def _cmd_mc(args) -> int:
    grid = GridSpec(args.n, args.steps, 1.0)
    heston = HestonParams(args.mean_reversion, args.long_run_var,
                          args.vol_of_vol, args.initial_var)
    tests = tuple(t.strip().upper() for t in args.tests.split(","))
    levels = tuple(args.levels)
    common = dict(grid=grid, heston=heston, seed=args.seed, reps=args.reps,
                  tau0=args.tau0, levels=levels, tests=tests,
                  bootstrap_reps=args.bootstrap_reps)
    if args.experiment == "size":
        table = run_size_experiment(McConfig(schedule=NullDrift(), **common))
    else:
        table = None
        null_config = McConfig(schedule=NullDrift(), **{**common,
                               "tests": ("PWY",)})
        for rate in args.rate:
            config = McConfig(schedule=OneShiftDrift(args.shift_frac, rate),
                              **common)
            part = run_power_experiment(
                config, null_config if "SCPWY" in tests else None)
            table = part if table is None else table.merged_with(part)
    _write(table.to_delimited(), args.out)
    if args.json_out:
        Path(args.json_out).write_text(table.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rvbubble",
        description="Explosive-bubble tests on devolatized asset prices")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a price/variance path")
    _add_common(p)
    p.add_argument("--n", type=int, default=252)
    p.add_argument("--steps", type=int, default=78,
                   help="fine steps per interval")
    p.add_argument("--interval-length", type=float, default=1.0)
    p.add_argument("--mean-reversion", type=float, default=0.05)
    p.add_argument("--long-run-var", type=float, default=0.25)
    p.add_argument("--vol-of-vol", type=float, default=0.30)
    p.add_argument("--initial-var", type=float, default=None)
    p.add_argument("--schedule", choices=("null", "one-shift", "bubble-crash"),
                   default="null")
    p.add_argument("--shift-frac", type=float, default=0.5)
    p.add_argument("--rate", type=float, default=0.02)
    p.add_argument("--bubble-start", type=float, default=0.4)
    p.add_argument("--bubble-end", type=float, default=0.7)
    p.add_argument("--bubble-scale", type=float, default=0.02 * 252**0.6)
    p.add_argument("--bubble-decay", type=float, default=0.6)
    p.add_argument("--reinit-offset", type=float, default=0.0)
    p.add_argument("--plot", help="render the path figure to this file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("rv", help="realized variances from an input file")
    _add_common(p)
    _add_ingest(p)
    p.set_defaults(func=_cmd_rv)

    for name, helptext in (("test", "run a bubble test and report"),
                           ("datestamp", "date-stamp explosive episodes")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        _add_ingest(p)
        p.add_argument("--test", choices=("pwy", "rvpwy"), default="rvpwy")
        p.add_argument("--vol-input",
                       help="separate file supplying the volatility proxy "
                            "(e.g. daily nominal index for a monthly real "
                            "index); the price file then holds one coarse "
                            "observation per row")
        p.add_argument("--vol-rule", choices=("day", "month"), default="month")
        p.add_argument("--vol-scale",
                       choices=("raw-price", "log-price", "log-return"),
                       default="raw-price")
        p.add_argument("--min-episode", type=float, default=None,
                       help="drop episodes shorter than this fraction")
        p.add_argument("--trace-out",
                       help="write the detector trace series (tau, stat, cv)")
        p.add_argument("--plot", help="render the detector figure to this file")
        if name == "test":
            p.add_argument("--datestamp-cv", type=float,
                           default=builtin_cv("df-marginal", 0.05))
            p.set_defaults(func=_cmd_test)
        else:
            p.add_argument("--cv", type=float,
                           default=builtin_cv("df-marginal", 0.05))
            p.add_argument("--min-duration", type=float, default=None,
                           help="minimum episode separation (default log(n)/n)")
            p.set_defaults(func=_cmd_datestamp)

    p = sub.add_parser("critvals", help="critical values (builtin or simulated)")
    _add_common(p)
    p.add_argument("--builtin", action="store_true",
                   help="print the stored constants")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--levels", type=float, nargs="+",
                   default=[0.01, 0.05, 0.10])
    p.set_defaults(func=_cmd_critvals)

    p = sub.add_parser("mc", help="Monte Carlo size/power experiments")
    _add_common(p)
    p.add_argument("--experiment", choices=("size", "power"), required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--n", type=int, default=252)
    p.add_argument("--steps", type=int, default=78)
    p.add_argument("--mean-reversion", type=float, default=0.05)
    p.add_argument("--long-run-var", type=float, default=0.25)
    p.add_argument("--vol-of-vol", type=float, default=0.30)
    p.add_argument("--initial-var", type=float, default=None)
    p.add_argument("--tests", default="PWY,RVPWY",
                   help=f"comma list from {','.join(KNOWN_TESTS)}")
    p.add_argument("--levels", type=float, nargs="+", default=[0.05])
    p.add_argument("--rate", type=float, nargs="+", default=[0.02],
                   help="drift rates for the power sweep")
    p.add_argument("--shift-frac", type=float, default=0.5)
    p.add_argument("--bootstrap-reps", type=int, default=199)
    p.add_argument("--json-out", help="machine-readable dump")
    p.set_defaults(func=_cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, UnequalBarsError, ValueError, OSError) as exc:
        print(f"rvbubble: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
