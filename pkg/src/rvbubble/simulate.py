"""Simulation of log prices with switching drift and stochastic volatility.

The price process lives on a two-level grid: ``n_intervals`` low-frequency
intervals of length ``interval_length``, each subdivided into
``steps_per_interval`` fine steps. The drift coefficient multiplying the
price level follows a schedule (always zero, switched on once, or switched
on and then crashed), while the variance follows a square-root diffusion
discretized with a full-truncation Euler scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from . import rng
from ._util import floor_index

# Practical cap on the fine-grid size (memory and index sanity).
_MAX_FINE_POINTS = 2**31


@dataclass(frozen=True)
class GridSpec:
    """Two-level sampling grid.

    Parameters
    ----------
    n_intervals : int
        Number of low-frequency intervals (n).
    steps_per_interval : int
        Fine steps per interval (M); the fine step length is always derived
        as ``interval_length / steps_per_interval``.
    interval_length : float
        Length of one low-frequency interval in time units (H).
    """

    n_intervals: int
    steps_per_interval: int
    interval_length: float = 1.0

    def __post_init__(self) -> None:
        if self.n_intervals < 1:
            raise ValueError(f"n_intervals must be >= 1, got {self.n_intervals}")
        if self.steps_per_interval < 1:
            raise ValueError(
                f"steps_per_interval must be >= 1, got {self.steps_per_interval}"
            )
        if not (self.interval_length > 0 and math.isfinite(self.interval_length)):
            raise ValueError(f"interval_length must be positive and finite")
        if self.n_intervals * self.steps_per_interval + 1 > _MAX_FINE_POINTS:
            raise ValueError("fine grid too large for index type")

    @property
    def step_length(self) -> float:
        """Fine step length h = interval_length / steps_per_interval."""
        return self.interval_length / self.steps_per_interval

    @property
    def n_fine(self) -> int:
        """Total number of fine steps (the fine grid has n_fine + 1 points)."""
        return self.n_intervals * self.steps_per_interval

    @property
    def total_time(self) -> float:
        return self.n_intervals * self.interval_length


@dataclass(frozen=True)
class NullDrift:
    """Zero drift throughout (driftless / unit-root regime)."""

    def step_rates(self, grid: GridSpec) -> np.ndarray:
        return np.zeros(grid.n_fine)


@dataclass(frozen=True)
class OneShiftDrift:
    """One-time switch from zero drift to a constant positive rate.

    The rate applies after the coarse time point ``floor(shift_fraction * n)``
    and stays on until the end of the sample.
    """

    shift_fraction: float
    rate: float

    def __post_init__(self) -> None:
        if not 0.0 < self.shift_fraction < 1.0:
            raise ValueError("shift_fraction must lie strictly inside (0, 1)")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")

    def shift_index(self, grid: GridSpec) -> int:
        return floor_index(self.shift_fraction, grid.n_intervals)

    def step_rates(self, grid: GridSpec) -> np.ndarray:
        rates = np.zeros(grid.n_fine)
        rates[self.shift_index(grid) * grid.steps_per_interval:] = self.rate
        return rates


@dataclass(frozen=True)
class BubbleCrashDrift:
    """Mildly explosive episode followed by an instant collapse.

    The drift rate equals ``scale / n**decay_exponent`` between the coarse
    points ``floor(start_fraction * n)`` and ``floor(end_fraction * n)``, and
    zero elsewhere. At the end point the level is reinitialized to its value
    at the start point plus ``reinit_offset`` (an assignment, not a dynamic).
    """

    start_fraction: float
    end_fraction: float
    scale: float
    decay_exponent: float
    reinit_offset: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.start_fraction < self.end_fraction < 1.0:
            raise ValueError(
                "need 0 < start_fraction < end_fraction < 1, got "
                f"({self.start_fraction}, {self.end_fraction})"
            )
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")
        if not 0.0 < self.decay_exponent < 1.0:
            raise ValueError("decay_exponent must lie strictly inside (0, 1)")

    def rate(self, n_intervals: int) -> float:
        """Effective drift rate at sample size n: scale / n**decay_exponent."""
        return self.scale / n_intervals**self.decay_exponent

    def start_index(self, grid: GridSpec) -> int:
        return floor_index(self.start_fraction, grid.n_intervals)

    def end_index(self, grid: GridSpec) -> int:
        return floor_index(self.end_fraction, grid.n_intervals)

    def step_rates(self, grid: GridSpec) -> np.ndarray:
        m = grid.steps_per_interval
        rates = np.zeros(grid.n_fine)
        rates[self.start_index(grid) * m:self.end_index(grid) * m] = self.rate(
            grid.n_intervals
        )
        return rates


DriftSchedule = Union[NullDrift, OneShiftDrift, BubbleCrashDrift]


@dataclass(frozen=True)
class HestonParams:
    """Square-root variance process parameters.

    ``initial_var=None`` starts the variance at its long-run level, which
    avoids any burn-in period.
    """

    mean_reversion: float = 0.05
    long_run_var: float = 0.25
    vol_of_vol: float = 0.30
    initial_var: float | None = None

    def __post_init__(self) -> None:
        for name in ("mean_reversion", "long_run_var", "vol_of_vol"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mean_reversion < 0:
            raise ValueError("mean_reversion must be nonnegative")
        if self.long_run_var <= 0:
            raise ValueError("long_run_var must be positive")
        if self.vol_of_vol < 0:
            raise ValueError("vol_of_vol must be nonnegative")
        if self.initial_var is not None and not (
            self.initial_var > 0 and math.isfinite(self.initial_var)
        ):
            raise ValueError("initial_var must be positive and finite")

    @property
    def start_var(self) -> float:
        return self.long_run_var if self.initial_var is None else self.initial_var


@dataclass(frozen=True)
class PricePath:
    """Log prices on the fine grid, with simulation-only extras.

    ``variance_path`` holds the instantaneous variance at every fine grid
    point and ``integrated_vars`` the per-interval integrated variances
    accumulated alongside the Euler steps; both are absent for ingested data.
    """

    grid: GridSpec
    log_prices: np.ndarray
    variance_path: np.ndarray | None = None
    integrated_vars: np.ndarray | None = None

    def __post_init__(self) -> None:
        expected = self.grid.n_fine + 1
        if len(self.log_prices) != expected:
            raise ValueError(
                f"log_prices must have {expected} points, got {len(self.log_prices)}"
            )
        if not np.all(np.isfinite(self.log_prices)):
            raise ValueError("log_prices must be finite")
        if self.variance_path is not None:
            if len(self.variance_path) != expected:
                raise ValueError("variance_path length mismatch")
            if np.any(self.variance_path < 0):
                raise ValueError("variance_path must be nonnegative")
            if self.log_prices[0] != 0.0:
                raise ValueError("simulated paths must start at log price 0")
        if self.integrated_vars is not None:
            if len(self.integrated_vars) != self.grid.n_intervals:
                raise ValueError("integrated_vars length mismatch")
            if np.any(self.integrated_vars < 0):
                raise ValueError("integrated_vars must be nonnegative")

    def coarse_log_prices(self) -> np.ndarray:
        """Log prices on the low-frequency grid (n_intervals + 1 points)."""
        return self.log_prices[::self.grid.steps_per_interval]

    def coarse_increments(self) -> np.ndarray:
        """Low-frequency log-price increments (n_intervals values)."""
        return np.diff(self.coarse_log_prices())


@njit(cache=True)
def _euler_paths(z_price, z_var, h, mean_rev, long_run, vol_of_vol, v_start,
                 rates, steps_per_interval, crash_at, crash_src, crash_offset):
    n_fine = z_price.shape[0]
    n_intervals = n_fine // steps_per_interval
    y = np.empty(n_fine + 1)
    v = np.empty(n_fine + 1)
    iv = np.zeros(n_intervals)
    sqrt_h = np.sqrt(h)
    y[0] = 0.0
    v_state = v_start
    for k in range(n_fine):
        v_pos = v_state if v_state > 0.0 else 0.0
        v[k] = v_pos
        iv[k // steps_per_interval] += v_pos * h
        vol = np.sqrt(v_pos)
        y[k + 1] = y[k] + rates[k] * y[k] * h + vol * sqrt_h * z_price[k]
        if k + 1 == crash_at:
            y[k + 1] = y[crash_src] + crash_offset
        v_state = (v_state + mean_rev * (long_run - v_pos) * h
                   + vol_of_vol * vol * sqrt_h * z_var[k])
    v[n_fine] = v_state if v_state > 0.0 else 0.0
    return y, v, iv


def simulate_heston(params: HestonParams, schedule: DriftSchedule,
                    grid: GridSpec, seed) -> PricePath:
    """Simulate one path of the price/variance system on the fine grid.

    Both driving noises are independent. The variance recursion uses full
    truncation: negative variance proposals are clamped to zero wherever the
    variance enters a drift or diffusion coefficient, while the untruncated
    state keeps evolving. The drift rate of the price is held constant over
    each fine step at the schedule's value on that step's interior, with
    regime boundaries snapped to coarse indices. Per-interval integrated
    variances are accumulated as the left Riemann sum of the (truncated)
    variance path, i.e. from exactly the values driving the price diffusion.

    ``seed`` may be an int or a tuple of ints; the same seed always yields a
    bit-identical path.
    """
    if isinstance(seed, (int, np.integer)):
        key = (int(seed),)
    else:
        key = tuple(int(s) for s in seed)
    stream = rng.generator(*key)
    n_fine = grid.n_fine
    z_price = stream.standard_normal(n_fine)
    z_var = stream.standard_normal(n_fine)

    crash_at, crash_src, crash_offset = -1, 0, 0.0
    if isinstance(schedule, BubbleCrashDrift):
        m = grid.steps_per_interval
        crash_at = schedule.end_index(grid) * m
        crash_src = schedule.start_index(grid) * m
        crash_offset = schedule.reinit_offset

    y, v, iv = _euler_paths(
        z_price, z_var, grid.step_length, params.mean_reversion,
        params.long_run_var, params.vol_of_vol, params.start_var,
        schedule.step_rates(grid), grid.steps_per_interval,
        crash_at, crash_src, crash_offset,
    )
    return PricePath(grid=grid, log_prices=y, variance_path=v, integrated_vars=iv)


def regime_solution_mean(schedule: DriftSchedule, grid: GridSpec, t: float,
                         y_anchor: float) -> float:
    """Conditional mean of the level at time ``t`` inside the drifted regime.

    Given the level ``y_anchor`` at regime entry, the solution of the
    constant-rate regime has conditional mean ``y_anchor * exp(rate * dt)``
    with ``dt`` the time elapsed since entry (the stochastic-integral part
    has zero mean). Used as a test oracle, not in the estimation pipeline.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if isinstance(schedule, NullDrift):
        if not 0.0 <= t <= grid.total_time:
            raise ValueError(f"t={t} outside the sample span")
        return y_anchor
    if isinstance(schedule, OneShiftDrift):
        entry = schedule.shift_index(grid) * grid.interval_length
        end = grid.total_time
        rate = schedule.rate
    elif isinstance(schedule, BubbleCrashDrift):
        entry = schedule.start_index(grid) * grid.interval_length
        end = schedule.end_index(grid) * grid.interval_length
        rate = schedule.rate(grid.n_intervals)
    else:
        raise TypeError(f"unsupported schedule type {type(schedule)!r}")
    if not entry <= t <= end:
        raise ValueError(
            f"t={t} outside the drifted regime [{entry}, {end}]"
        )
    return y_anchor * math.exp(rate * (t - entry))
