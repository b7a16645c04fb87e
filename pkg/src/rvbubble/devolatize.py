"""Devolatized pseudo-samples: cumulated volatility-scaled increments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .realized import rv_series
from .simulate import PricePath

# Volatilities at or below this floor indicate an empty or corrupt interval;
# the statistic would be meaningless, so this is a hard error rather than a
# silent epsilon substitution.
VOL_FLOOR = 1e-12


class DegenerateVolatilityError(ValueError):
    """An interval volatility is too close to zero to scale by."""


@dataclass(frozen=True)
class PseudoSample:
    """Cumulated devolatized increments, starting from zero.

    ``source`` records whether the scaling volatilities were estimated
    (``"feasible"``, realized volatility) or the true integrated ones from a
    simulation (``"infeasible"``).
    """

    values: np.ndarray
    source: str = "feasible"

    def __post_init__(self) -> None:
        if self.source not in ("feasible", "infeasible"):
            raise ValueError(f"unknown source tag {self.source!r}")
        if len(self.values) < 1 or self.values[0] != 0.0:
            raise ValueError("pseudo-sample must start at 0")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("pseudo-sample values must be finite")

    @property
    def n(self) -> int:
        return len(self.values) - 1


def build_pseudo_sample(coarse_increments, vols,
                        source: str = "feasible") -> PseudoSample:
    """Cumulate coarse increments scaled by per-interval volatilities.

    ``vols`` are volatilities (square roots of variances), one per interval.
    The running sum is accumulated strictly left to right, so identical
    inputs reproduce bit-identical outputs.
    """
    inc = np.asarray(coarse_increments, dtype=float)
    v = np.asarray(vols, dtype=float)
    if inc.shape != v.shape or inc.ndim != 1:
        raise ValueError("increments and vols must be 1-d and equally long")
    bad = np.where(~(v > VOL_FLOOR))[0]
    if bad.size:
        raise DegenerateVolatilityError(
            f"volatility at interval {bad[0] + 1} is {v[bad[0]]!r}, "
            f"at or below the floor {VOL_FLOOR}"
        )
    values = np.empty(len(inc) + 1)
    values[0] = 0.0
    np.cumsum(inc / v, out=values[1:])
    return PseudoSample(values=values, source=source)


def feasible_pseudo_sample(path: PricePath, demean: bool = False) -> PseudoSample:
    """Pseudo-sample scaled by realized volatilities."""
    rv = rv_series(path, demean)
    return build_pseudo_sample(path.coarse_increments(), np.sqrt(rv.values),
                               source="feasible")


def infeasible_pseudo_sample(path: PricePath) -> PseudoSample:
    """Pseudo-sample scaled by the true integrated volatilities.

    Only available for simulated paths, which carry their integrated
    variances; used in statistical property checks.
    """
    if path.integrated_vars is None:
        raise ValueError("path carries no true integrated variances")
    return build_pseudo_sample(path.coarse_increments(),
                               np.sqrt(path.integrated_vars),
                               source="infeasible")
