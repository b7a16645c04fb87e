"""Per-interval realized variance from fine-grid log prices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulate import GridSpec, PricePath


@dataclass(frozen=True)
class RVSeries:
    """Realized variances per low-frequency interval."""

    values: np.ndarray
    demeaned: bool
    grid: GridSpec

    def __post_init__(self) -> None:
        if len(self.values) != self.grid.n_intervals:
            raise ValueError("one realized variance per interval required")
        if np.any(self.values < 0):
            raise ValueError("realized variances cannot be negative")


def realized_variance_from_increments(increments: np.ndarray,
                                      demean: bool = False) -> float:
    """Sum of squared fine increments, optionally centered by their mean.

    This is the realized-variance kernel shared by the grid-based estimator
    and the ragged (calendar, unequal bar count) ingestion pipeline.
    """
    d = np.asarray(increments, dtype=float)
    if demean:
        if d.size < 2:
            raise ValueError("demeaning requires at least 2 increments")
        d = d - d.mean()
    return float(d @ d)


def realized_variance_interval(path: PricePath, i: int,
                               demean: bool = False) -> float:
    """Realized variance of interval ``i`` (1-based).

    Sums the squared fine log-price increments inside the interval; with
    ``demean`` the increments are first centered by their within-interval
    mean (used when coarse intervals are built from daily returns).
    """
    n = path.grid.n_intervals
    if not 1 <= i <= n:
        raise ValueError(f"interval index {i} out of range 1..{n}")
    m = path.grid.steps_per_interval
    if demean and m < 2:
        raise ValueError("demeaning requires at least 2 fine steps per interval")
    fine = path.log_prices[(i - 1) * m:i * m + 1]
    return realized_variance_from_increments(np.diff(fine), demean)


def rv_series(path: PricePath, demean: bool = False) -> RVSeries:
    """Realized variances for all intervals of a path."""
    values = np.array([
        realized_variance_interval(path, i, demean)
        for i in range(1, path.grid.n_intervals + 1)
    ])
    return RVSeries(values=values, demeaned=demean, grid=path.grid)
