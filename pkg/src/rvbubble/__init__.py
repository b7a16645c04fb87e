"""Explosive-bubble detection via realized-volatility devolatization.

Log-price increments sampled at a low frequency are scaled by realized
volatilities estimated from higher-frequency data and cumulated into a
pseudo-sample, on which recursive right-tailed Dickey-Fuller tests detect
and date-stamp explosive episodes. Includes a stochastic-volatility
simulator, a wild-bootstrap benchmark, critical-value tabulation, and a
Monte Carlo harness for size/power studies.
"""
from ._version import __version__
from .bootstrap import BootstrapResult, wild_bootstrap_pwy
from .critical_values import (CriticalValueTable, builtin_cv,
                              simulate_null_table)
from .datestamp import (Episode, EpisodeList, date_stamp,
                        default_min_duration, filter_episodes)
from .devolatize import (DegenerateVolatilityError, PseudoSample, VOL_FLOOR,
                         build_pseudo_sample, feasible_pseudo_sample,
                         infeasible_pseudo_sample)
from .dickey_fuller import (DegenerateRegressionError, DetectorTrace,
                            cusum_stat, detector_trace, df_stat_with_constant,
                            sup_stat)
from .io import (EpisodeRecord, GroupedSeries, IngestError, IngestSpec,
                 TestReport, UnequalBarsError, file_digest, ingest,
                 load_grouped, load_price_path, path_digest, run_price_test,
                 trace_to_text)
from .monte_carlo import (FrequencyTable, McConfig, run_power_experiment,
                          run_size_experiment, size_corrected_cv)
from .realized import (RVSeries, realized_variance_from_increments,
                       realized_variance_interval, rv_series)
from .simulate import (BubbleCrashDrift, DriftSchedule, GridSpec,
                       HestonParams, NullDrift, OneShiftDrift, PricePath,
                       regime_solution_mean, simulate_heston)

__all__ = [
    "__version__",
    "BootstrapResult", "wild_bootstrap_pwy",
    "CriticalValueTable", "builtin_cv", "simulate_null_table",
    "Episode", "EpisodeList", "date_stamp", "default_min_duration",
    "filter_episodes",
    "DegenerateVolatilityError", "PseudoSample", "VOL_FLOOR",
    "build_pseudo_sample", "feasible_pseudo_sample", "infeasible_pseudo_sample",
    "DegenerateRegressionError", "DetectorTrace", "cusum_stat",
    "detector_trace", "df_stat_with_constant", "sup_stat",
    "EpisodeRecord", "GroupedSeries", "IngestError", "IngestSpec",
    "TestReport", "UnequalBarsError", "file_digest", "ingest", "load_grouped",
    "load_price_path", "path_digest", "run_price_test", "trace_to_text",
    "FrequencyTable", "McConfig", "run_power_experiment",
    "run_size_experiment", "size_corrected_cv",
    "BubbleCrashDrift", "DriftSchedule", "GridSpec", "HestonParams",
    "NullDrift", "OneShiftDrift", "PricePath", "regime_solution_mean",
    "simulate_heston",
]
