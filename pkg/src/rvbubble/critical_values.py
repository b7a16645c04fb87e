"""Critical values: published constants and simulated null tables."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .dickey_fuller import detector_trace, sup_stat

# Published finite-sample critical values of the recursive sup-DF statistic
# (tabulated for n = 200, minimum fraction 0.137), reused unchanged at
# nearby sample sizes for comparability with reported results.
_SUP_DF_CV = {0.01: 2.094, 0.05: 1.468, 0.10: 1.184}

# Right-tail 5% critical value of the marginal with-constant DF distribution,
# used by the date-stamping rule.
_DF_MARGINAL_CV = {0.05: -0.08}

_KINDS = {"pwy-sup": _SUP_DF_CV, "df-marginal": _DF_MARGINAL_CV}


def builtin_cv(kind: str, level: float) -> float:
    """Stored critical-value constant for a statistic kind and level."""
    try:
        table = _KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown statistic kind {kind!r}; expected one of {sorted(_KINDS)}"
        ) from None
    for known, value in table.items():
        if math.isclose(level, known, rel_tol=0, abs_tol=1e-12):
            return value
    raise ValueError(f"no stored critical value for kind {kind!r} at level {level}")


@dataclass(frozen=True)
class CriticalValueTable:
    """Simulated right-tail quantiles of the sup-DF null distribution."""

    n: int
    tau0: float
    reps: int
    seed: int
    quantiles: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        levels = sorted(self.quantiles)
        values = [self.quantiles[lv] for lv in levels]
        # Smaller level = further right tail = weakly larger value.
        if any(a < b for a, b in zip(values[:-1], values[1:])):
            raise ValueError("quantiles must be weakly decreasing in level")

    def value(self, level: float) -> float:
        for known, v in self.quantiles.items():
            if math.isclose(level, known, rel_tol=0, abs_tol=1e-12):
                return v
        raise ValueError(f"level {level} not tabulated")

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.n}\n# tau0={self.tau0:.17g}\n")
        buf.write(f"# reps={self.reps}\n# seed={self.seed}\n")
        buf.write("level\tvalue\n")
        for level in sorted(self.quantiles):
            buf.write(f"{level:.17g}\t{self.quantiles[level]:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "CriticalValueTable":
        meta = {}
        quantiles = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                meta[key.strip()] = value.strip()
            elif not line.startswith("level"):
                level_s, value_s = line.split("\t")
                quantiles[float(level_s)] = float(value_s)
        return cls(n=int(meta["n"]), tau0=float(meta["tau0"]),
                   reps=int(meta["reps"]), seed=int(meta["seed"]),
                   quantiles=quantiles)


def empirical_right_quantile(sorted_stats: np.ndarray, level: float) -> float:
    """Order statistic at 1-based index ceil((1 - level) * reps)."""
    reps = len(sorted_stats)
    idx = int(math.ceil((1.0 - level) * reps - 1e-9))
    return float(sorted_stats[min(max(idx, 1), reps) - 1])


def simulate_null_table(n: int, tau0: float, reps: int, seed: int,
                        levels=(0.01, 0.05, 0.10)) -> CriticalValueTable:
    """Tabulate the sup-DF null distribution by direct simulation.

    Generates ``reps`` standard Gaussian random walks of length ``n`` (the
    homoskedastic null law of the devolatized sample), computes the sup
    statistic of each, and returns the empirical right-tail quantiles.
    Replication substreams are keyed by (seed, replication), so the same
    arguments always reproduce the same table.
    """
    if n < 20:
        raise ValueError(f"n must be >= 20, got {n}")
    if not 0.0 < tau0 < 1.0:
        raise ValueError(f"tau0 must lie strictly inside (0, 1), got {tau0}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not levels or any(not 0.0 < lv < 1.0 for lv in levels):
        raise ValueError("levels must be nonempty and lie strictly inside (0, 1)")
    stats = np.empty(reps)
    walk = np.empty(n + 1)
    walk[0] = 0.0
    for r in range(reps):
        g = rng.generator(seed, r)
        np.cumsum(g.standard_normal(n), out=walk[1:])
        stats[r] = sup_stat(detector_trace(walk, tau0))
    stats.sort()
    quantiles = {float(lv): empirical_right_quantile(stats, lv) for lv in levels}
    return CriticalValueTable(n=n, tau0=tau0, reps=reps, seed=seed,
                              quantiles=quantiles)
