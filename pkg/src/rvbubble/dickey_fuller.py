"""Recursive with-constant Dickey-Fuller statistics and sup-type tests.

The same detector is used for both pipelines: applied to raw coarse log
prices it is the classical recursive sup-DF (PWY) test, applied to a
devolatized pseudo-sample it is the realized-volatility version (RVPWY).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import ceil_index
from .devolatize import PseudoSample


class DegenerateRegressionError(ValueError):
    """The DF regression has no usable variation on the given prefix."""


@dataclass(frozen=True)
class DetectorTrace:
    """Recursive detector statistics over expanding sample prefixes.

    ``endpoints`` holds every integer prefix length from ``ceil(tau0 * n)``
    to ``n``; ``stats`` the statistic per endpoint, with NaN flagging
    degenerate prefixes (the trace is still returned). ``kind`` records the
    pipeline: ``"rvdf"`` for devolatized input, ``"df"`` for a raw series.
    """

    tau0: float
    endpoints: np.ndarray
    stats: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("rvdf", "df"):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        if len(self.endpoints) != len(self.stats) or len(self.endpoints) == 0:
            raise ValueError("endpoints and stats must be equally long, nonempty")
        if np.any(np.diff(self.endpoints) <= 0):
            raise ValueError("endpoints must be strictly increasing")

    @property
    def n(self) -> int:
        """Full sample size (the last prefix endpoint)."""
        return int(self.endpoints[-1])

    @property
    def fractions(self) -> np.ndarray:
        """Endpoints mapped to sample fractions k / n."""
        return self.endpoints / self.n

    @property
    def degenerate(self) -> np.ndarray:
        return np.isnan(self.stats)


def _prefix_df_stats(z: np.ndarray, first: int) -> np.ndarray:
    """With-constant DF t-statistics for every prefix x_1..x_k, k = first..len(z).

    One cumulative-sum pass evaluates the regression of the first differences
    on (constant, lagged level) over s = 2..k for all k at once. Because
    cumulative partial sums are prefix-exact, the value reported for prefix k
    is bit-identical to evaluating the same formula on x_1..x_k alone.
    Degenerate prefixes come back as NaN.
    """
    dx = z[1:] - z[:-1]
    xlag = z[:-1]
    cross = np.cumsum(dx * xlag)
    lag_sum = np.cumsum(xlag)
    lag_sq = np.cumsum(xlag * xlag)
    d_sum = np.cumsum(dx)
    d_sq = np.cumsum(dx * dx)
    k = np.arange(2, len(z) + 1)
    nobs = (k - 1).astype(float)

    with np.errstate(divide="ignore", invalid="ignore"):
        s_xy = cross - d_sum * lag_sum / nobs
        s_xx = lag_sq - lag_sum * lag_sum / nobs
        s_yy = d_sq - d_sum * d_sum / nobs
        slope = s_xy / s_xx
        rss = s_yy - slope * s_xy
        # Error-variance divisor k - 1, matching the statistic's definition.
        sigma2 = rss / nobs
        stats = s_xy / np.sqrt(s_xx * sigma2)
    stats[(s_xx <= 0) | (sigma2 <= 0) | ~np.isfinite(stats)] = np.nan
    return stats[first - 2:]


def df_stat_with_constant(sample) -> float:
    """With-constant DF t-statistic on a sample x_1..x_k.

    Regresses the first differences on a constant and the lagged level over
    s = 2..k and returns the t-ratio of the lagged-level slope, with the
    error-variance divisor k - 1. Algebraically the OLS t-ratio of that
    regression.
    """
    z = np.asarray(sample, dtype=float)
    if z.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    k = len(z)
    if k < 4:
        raise DegenerateRegressionError(
            f"need at least 4 observations, got {k}"
        )
    stat = _prefix_df_stats(z, k)[0]
    if np.isnan(stat):
        raise DegenerateRegressionError(
            "degenerate regression: no residual variance or no level variation"
        )
    return float(stat)


def detector_trace(sample, tau0: float) -> DetectorTrace:
    """Recursive DF statistics over all prefixes x_1..x_k, k = ceil(tau0*n)..n.

    ``sample`` is the full series x_0..x_n, either a pseudo-sample (yielding
    an ``"rvdf"`` trace) or a raw coarse series (yielding a ``"df"`` trace);
    both run through the identical code path. Degenerate prefixes are
    flagged NaN rather than aborting the trace.
    """
    if isinstance(sample, PseudoSample):
        kind = "rvdf"
        x = sample.values
    else:
        kind = "df"
        x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("sample must be a 1-d series x_0..x_n with n >= 1")
    n = len(x) - 1
    if not 0.0 < tau0 < 1.0:
        raise ValueError(f"tau0 must lie strictly inside (0, 1), got {tau0}")
    first = ceil_index(tau0, n)
    if first < 4:
        raise ValueError(
            f"smallest prefix ceil(tau0*n) = {first} is below the minimum 4"
        )
    stats = _prefix_df_stats(x[1:], first)
    return DetectorTrace(tau0=tau0, endpoints=np.arange(first, n + 1),
                         stats=stats, kind=kind)


def sup_stat(trace: DetectorTrace) -> float:
    """Supremum of the detector over its grid, ignoring degenerate entries."""
    valid = trace.stats[~trace.degenerate]
    if valid.size == 0:
        raise DegenerateRegressionError("all trace entries are degenerate")
    return float(valid.max())


def cusum_stat(sample, tau0: float) -> float:
    """Scaled supremum of the cumulated increments over the detector grid.

    Equals ``max_k (x_k - x_0) / sqrt(n)`` over grid endpoints
    k = ceil(tau0*n)..n, the partial-sum form of the cumulated-increment
    statistic.
    """
    x = sample.values if isinstance(sample, PseudoSample) else np.asarray(
        sample, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("sample must be a 1-d series x_0..x_n with n >= 1")
    if not 0.0 < tau0 < 1.0:
        raise ValueError(f"tau0 must lie strictly inside (0, 1), got {tau0}")
    n = len(x) - 1
    first = max(ceil_index(tau0, n), 1)
    return float((x[first:] - x[0]).max() / np.sqrt(n))
