"""Monte Carlo harness for size and power experiments.

Each replication simulates one path, runs the requested tests, and compares
them to their critical values: published constants for the sup tests, a
simulated null table for the cumulated-increment statistic, the bootstrap
p-value for the bootstrap test, and an empirical null quantile from a paired
run for size-corrected power. Replications use counter-based substreams, so
tables are reproducible regardless of execution order.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .bootstrap import wild_bootstrap_pwy
from .critical_values import builtin_cv, empirical_right_quantile
from .devolatize import feasible_pseudo_sample
from .dickey_fuller import cusum_stat, detector_trace, sup_stat
from .simulate import (BubbleCrashDrift, DriftSchedule, GridSpec, HestonParams,
                       NullDrift, OneShiftDrift, simulate_heston)

KNOWN_TESTS = ("PWY", "RVPWY", "BTPWY", "SCPWY", "CUSUM")

# Reserved replication index for the internal cumulated-increment null table,
# far above any realistic replication count.
_CUSUM_TABLE_STREAM = 2**40


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo experiment design point."""

    grid: GridSpec
    heston: HestonParams
    schedule: DriftSchedule
    seed: int
    reps: int = 1000
    tau0: float = 0.1
    levels: tuple = (0.05,)
    tests: tuple = ("PWY", "RVPWY")
    bootstrap_reps: int = 199
    label: str = ""

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if any(not 0.0 < lv < 1.0 for lv in self.levels) or not self.levels:
            raise ValueError("levels must be nonempty and lie inside (0, 1)")
        unknown = set(self.tests) - set(KNOWN_TESTS)
        if unknown:
            raise ValueError(f"unknown tests {sorted(unknown)}")
        if not self.tests:
            raise ValueError("at least one test is required")

    def point_label(self) -> str:
        if self.label:
            return self.label
        h = self.heston
        parts = [f"a={h.mean_reversion:g}", f"b={h.long_run_var:g}",
                 f"c={h.vol_of_vol:g}"]
        if isinstance(self.schedule, OneShiftDrift):
            parts.append(f"rate={self.schedule.rate:g}")
            parts.append(f"shift={self.schedule.shift_fraction:g}")
        elif isinstance(self.schedule, BubbleCrashDrift):
            parts.append(f"rate={self.schedule.rate(self.grid.n_intervals):g}")
        else:
            parts.append("rate=0")
        return ",".join(parts)


@dataclass
class FrequencyTable:
    """Rejection frequencies keyed by (test, level, parameter point)."""

    frequencies: dict
    standard_errors: dict
    reps: int
    seed: int
    runtime_seconds: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, p in self.frequencies.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"frequency out of [0, 1] at {key}: {p}")

    def frequency(self, test: str, level: float, point: str) -> float:
        return self.frequencies[(test, level, point)]

    def merged_with(self, other: "FrequencyTable") -> "FrequencyTable":
        freqs = {**self.frequencies, **other.frequencies}
        ses = {**self.standard_errors, **other.standard_errors}
        return FrequencyTable(
            frequencies=freqs, standard_errors=ses, reps=self.reps,
            seed=self.seed,
            runtime_seconds=self.runtime_seconds + other.runtime_seconds,
            extra={**self.extra, **other.extra})

    def to_delimited(self) -> str:
        """Rows = (parameter point, level), columns = tests."""
        tests = sorted({t for t, _, _ in self.frequencies})
        keys = sorted({(pt, lv) for _, lv, pt in self.frequencies})
        lines = [f"# reps={self.reps} seed={self.seed} "
                 f"runtime_s={self.runtime_seconds:.1f}",
                 "\t".join(["point", "level"] + tests)]
        for pt, lv in keys:
            row = [pt, f"{lv:g}"]
            for t in tests:
                p = self.frequencies.get((t, lv, pt))
                row.append("" if p is None else f"{p:.4f}")
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        cells = [
            {"test": t, "level": lv, "point": pt, "frequency": p,
             "standard_error": self.standard_errors[(t, lv, pt)]}
            for (t, lv, pt), p in sorted(self.frequencies.items())
        ]
        return json.dumps({
            "reps": self.reps, "seed": self.seed,
            "runtime_seconds": self.runtime_seconds,
            "cells": cells, **self.extra,
        }, indent=2)


def size_corrected_cv(null_stats, level: float) -> float:
    """Empirical (1 - level) quantile of null statistics.

    Uses the 1-based order statistic at ``floor((1 - level) * reps) + 1``.
    """
    stats = np.sort(np.asarray(null_stats, dtype=float))
    if stats.size == 0:
        raise ValueError("null_stats must be nonempty")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie strictly inside (0, 1)")
    idx = int(math.floor((1.0 - level) * stats.size + 1e-9)) + 1
    return float(stats[min(idx, stats.size) - 1])


def _replication_stats(config: McConfig, rep: int, want: set) -> dict:
    path = simulate_heston(config.heston, config.schedule, config.grid,
                           seed=(config.seed, rep))
    out = {}
    if {"PWY", "SCPWY", "BTPWY"} & want:
        coarse = path.coarse_log_prices()
        if {"PWY", "SCPWY"} & want:
            out["PWY"] = sup_stat(detector_trace(coarse, config.tau0))
        if "BTPWY" in want:
            out["BTPWY"] = wild_bootstrap_pwy(
                coarse, config.tau0, config.bootstrap_reps,
                seed=(config.seed, rep)).p_value
    if {"RVPWY", "CUSUM"} & want:
        pseudo = feasible_pseudo_sample(path)
        if "RVPWY" in want:
            out["RVPWY"] = sup_stat(detector_trace(pseudo, config.tau0))
        if "CUSUM" in want:
            out["CUSUM"] = cusum_stat(pseudo, config.tau0)
    return out


def _collect_stats(config: McConfig, want: set) -> dict:
    cols = {t: np.empty(config.reps) for t in want}
    for rep in range(config.reps):
        stats = _replication_stats(config, rep, want)
        for t in want:
            cols[t][rep] = stats[t]
    return cols


def _cusum_null_quantiles(config: McConfig, levels, reps: int = 10_000) -> dict:
    """Simulated null quantiles of the cumulated-increment statistic."""
    n = config.grid.n_intervals
    stats = np.empty(reps)
    walk = np.empty(n + 1)
    walk[0] = 0.0
    for r in range(reps):
        g = rng.generator(config.seed, _CUSUM_TABLE_STREAM + r)
        np.cumsum(g.standard_normal(n), out=walk[1:])
        stats[r] = cusum_stat(walk, config.tau0)
    stats.sort()
    return {lv: empirical_right_quantile(stats, lv) for lv in levels}


def _frequency_table(config: McConfig, cols: dict, pwy_null_stats,
                     started: float) -> FrequencyTable:
    point = config.point_label()
    freqs, ses = {}, {}
    cusum_cvs = (_cusum_null_quantiles(config, config.levels)
                 if "CUSUM" in config.tests else {})
    for level in config.levels:
        for test in config.tests:
            if test == "BTPWY":
                rejected = cols["BTPWY"] <= level
            elif test == "CUSUM":
                rejected = cols["CUSUM"] > cusum_cvs[level]
            elif test == "SCPWY":
                cv = size_corrected_cv(pwy_null_stats, level)
                rejected = cols["PWY"] > cv
            else:
                rejected = cols[test] > builtin_cv("pwy-sup", level)
            p = float(np.mean(rejected))
            freqs[(test, level, point)] = p
            ses[(test, level, point)] = math.sqrt(p * (1 - p) / config.reps)
    return FrequencyTable(frequencies=freqs, standard_errors=ses,
                          reps=config.reps, seed=config.seed,
                          runtime_seconds=time.time() - started)


def _wanted_columns(config: McConfig) -> set:
    want = set(config.tests)
    if "SCPWY" in want:
        want.discard("SCPWY")
        want.add("PWY")
    return want


def run_size_experiment(config: McConfig) -> FrequencyTable:
    """Null rejection frequencies for each requested test and level."""
    if not isinstance(config.schedule, NullDrift):
        raise ValueError("size experiment requires the zero-drift schedule")
    if "SCPWY" in config.tests:
        raise ValueError("size-corrected power is undefined in a size run")
    started = time.time()
    cols = _collect_stats(config, _wanted_columns(config))
    return _frequency_table(config, cols, None, started)


def run_power_experiment(config: McConfig,
                         null_config: McConfig | None = None) -> FrequencyTable:
    """Rejection frequencies under a one-shift alternative.

    ``null_config`` must share all parameters with ``config`` except the
    drift rate; it is required when size-corrected power is requested. With
    the same seed, null and alternative replications share their volatility
    paths and shocks, which reduces the variance of power comparisons.
    """
    if not isinstance(config.schedule, OneShiftDrift):
        raise ValueError("power experiment requires the one-shift schedule")
    pwy_null = None
    if "SCPWY" in config.tests:
        if null_config is None:
            raise ValueError(
                "size-corrected power requires a paired null configuration")
        _check_paired(config, null_config)
        pwy_null = _collect_stats(null_config, {"PWY"})["PWY"]
    started = time.time()
    cols = _collect_stats(config, _wanted_columns(config))
    return _frequency_table(config, cols, pwy_null, started)


def _check_paired(config: McConfig, null_config: McConfig) -> None:
    ok = (isinstance(null_config.schedule, NullDrift)
          or (isinstance(null_config.schedule, OneShiftDrift)
              and null_config.schedule.rate == 0.0))
    if not ok:
        raise ValueError("paired run must have zero drift")
    stripped = replace(config, schedule=NullDrift(), label="", tests=("PWY",))
    stripped_null = replace(null_config, schedule=NullDrift(), label="",
                            tests=("PWY",))
    if stripped != stripped_null:
        raise ValueError(
            "paired null run must share all parameters except the drift rate")
