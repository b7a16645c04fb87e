"""Data ingestion, report assembly, and serialization for the CLI pipeline."""
from __future__ import annotations

import csv
import hashlib
import io as _io
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

import numpy as np

from ._version import __version__
from .critical_values import builtin_cv
from .datestamp import EpisodeList, date_stamp, default_min_duration, filter_episodes
from .devolatize import build_pseudo_sample
from .dickey_fuller import DetectorTrace, detector_trace, sup_stat
from .realized import realized_variance_from_increments
from .simulate import GridSpec, PricePath

REPORT_LEVELS = (0.01, 0.05, 0.10)

PRICE_SCALES = ("raw-price", "log-price", "log-return")
INTERVAL_RULES = ("fixed-count", "day", "month")


class IngestError(ValueError):
    """The input file violates the ingestion contract."""


class UnequalBarsError(IngestError):
    """Calendar intervals carry different bar counts."""


@dataclass(frozen=True)
class IngestSpec:
    """How to read a delimited price file into the two-level grid."""

    path: str
    timestamp_column: str = "timestamp"
    price_column: str = "price"
    scale: str = "raw-price"
    rule: str = "fixed-count"
    steps_per_interval: int = 1
    demean: bool = False
    allow_unequal: bool = False
    interval_length: float = 1.0

    def __post_init__(self) -> None:
        if self.scale not in PRICE_SCALES:
            raise ValueError(f"scale must be one of {PRICE_SCALES}")
        if self.rule not in INTERVAL_RULES:
            raise ValueError(f"rule must be one of {INTERVAL_RULES}")
        if self.rule == "fixed-count" and self.steps_per_interval < 1:
            raise ValueError("fixed-count rule requires steps_per_interval >= 1")


@dataclass(frozen=True)
class GroupedSeries:
    """Calendar-grouped observations, tolerant of unequal bars per interval.

    Carries everything the test pipeline needs: the coarse log-price series,
    the fine log-price increments inside each interval, and interval labels.
    """

    coarse_log_prices: np.ndarray
    increments_by_interval: tuple
    labels: tuple

    def __post_init__(self) -> None:
        n = len(self.coarse_log_prices) - 1
        if len(self.increments_by_interval) != n or len(self.labels) != n:
            raise ValueError("one increment group and label per interval required")

    @property
    def n_intervals(self) -> int:
        return len(self.labels)

    def rv_values(self, demean: bool = False) -> np.ndarray:
        return np.array([
            realized_variance_from_increments(d, demean)
            for d in self.increments_by_interval
        ])


def _parse_timestamp(raw: str):
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(raw)
    except ValueError:
        raise IngestError(f"unparseable timestamp {raw!r}; use ISO-8601 or an "
                          "integer index") from None


def _read_rows(spec: IngestSpec):
    text = Path(spec.path).read_text()
    sample = text[:4096]
    try:
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t|")
    except csv.Error:
        dialect = csv.excel
    reader = csv.DictReader(_io.StringIO(text), dialect=dialect)
    if reader.fieldnames is None:
        raise IngestError("input file is empty")
    fields = [f.strip() for f in reader.fieldnames]
    for col in (spec.timestamp_column, spec.price_column):
        if col not in fields:
            raise IngestError(f"missing column {col!r}; file has {fields}")
    timestamps, values = [], []
    for lineno, row in enumerate(reader, start=2):
        row = {(k or "").strip(): v for k, v in row.items()}
        ts = _parse_timestamp(row[spec.timestamp_column])
        try:
            value = float(row[spec.price_column])
        except (TypeError, ValueError):
            raise IngestError(
                f"line {lineno}: unparseable price {row[spec.price_column]!r}"
            ) from None
        if not math.isfinite(value):
            raise IngestError(f"line {lineno}: non-finite price")
        timestamps.append(ts)
        values.append(value)
    if len(values) < 2:
        raise IngestError("need at least 2 data rows")
    for a, b in zip(timestamps, timestamps[1:]):
        if not a < b:
            raise IngestError(
                f"timestamps must be strictly increasing; {b} follows {a}")
    return timestamps, np.asarray(values)


def _to_log_levels(spec: IngestSpec, values: np.ndarray) -> np.ndarray:
    """Log-price levels per observation row (returns stay as increments)."""
    if spec.scale == "raw-price":
        if np.any(values <= 0):
            bad = int(np.argmax(values <= 0))
            raise IngestError(f"non-positive raw price at data row {bad + 1}")
        return np.log(values)
    return values


def _interval_key(spec: IngestSpec, ts):
    if isinstance(ts, int):
        raise IngestError(
            "calendar rule requires ISO-8601 timestamps, not integer indices")
    if spec.rule == "day":
        return ts.date()
    return (ts.year, ts.month)


def _format_key(key) -> str:
    if isinstance(key, date):
        return key.isoformat()
    return f"{key[0]:04d}-{key[1]:02d}"


def _group_rows(spec: IngestSpec, timestamps, values):
    keys, groups = [], []
    for ts, v in zip(timestamps, values):
        key = _interval_key(spec, ts)
        if not keys or key != keys[-1]:
            keys.append(key)
            groups.append([])
        groups[-1].append(v)
    return keys, [np.asarray(g) for g in groups]


def load_grouped(spec: IngestSpec) -> GroupedSeries:
    """Read a file under a calendar rule without requiring equal bar counts."""
    if spec.rule == "fixed-count":
        raise ValueError("grouped loading applies to calendar rules only")
    timestamps, raw = _read_rows(spec)
    keys, groups = _group_rows(spec, timestamps, _to_log_levels(spec, raw))
    labels = tuple(_format_key(k) for k in keys)
    if spec.scale == "log-return":
        increments = tuple(groups)
        coarse = np.concatenate([[0.0], np.cumsum([g.sum() for g in groups])])
    else:
        # The first observation doubles as the grid origin, so the first
        # interval's opening increment is zero; later intervals open with the
        # increment from the previous interval's last bar.
        increments, prev_last = [], groups[0][0]
        for g in groups:
            increments.append(np.diff(np.concatenate([[prev_last], g])))
            prev_last = g[-1]
        increments = tuple(increments)
        coarse = np.concatenate([[groups[0][0]], [g[-1] for g in groups]])
    return GroupedSeries(coarse_log_prices=coarse,
                         increments_by_interval=increments, labels=labels)


def _grid_from_grouped(spec: IngestSpec, grouped: GroupedSeries):
    counts = {len(d) for d in grouped.increments_by_interval}
    if len(counts) != 1:
        offending = [lab for lab, d in zip(grouped.labels,
                                           grouped.increments_by_interval)
                     if len(d) != len(grouped.increments_by_interval[0])]
        raise UnequalBarsError(
            "unequal bars per interval under the calendar rule; offending "
            f"intervals: {', '.join(offending)} (pass allow_unequal / use the "
            "grouped pipeline to accept variable counts)")
    m = counts.pop()
    fine = np.concatenate([[grouped.coarse_log_prices[0]],
                           *[np.cumsum(d) + c for d, c in zip(
                               grouped.increments_by_interval,
                               grouped.coarse_log_prices[:-1])]])
    grid = GridSpec(grouped.n_intervals, m, spec.interval_length)
    return PricePath(grid=grid, log_prices=fine), list(grouped.labels)


def load_price_path(spec: IngestSpec):
    """Read a file onto the two-level grid; returns (path, coarse labels)."""
    if spec.rule != "fixed-count":
        grouped = load_grouped(spec)
        return _grid_from_grouped(spec, grouped)
    timestamps, raw = _read_rows(spec)
    levels = _to_log_levels(spec, raw)
    m = spec.steps_per_interval
    if spec.scale == "log-return":
        if len(levels) % m != 0:
            raise IngestError(
                f"{len(levels)} returns do not divide into intervals of {m}")
        fine = np.concatenate([[0.0], np.cumsum(levels)])
    else:
        if (len(levels) - 1) % m != 0:
            raise IngestError(
                f"{len(levels)} prices do not give a whole number of "
                f"intervals of {m} steps")
        fine = levels
    n = (len(fine) - 1) // m
    if n < 1:
        raise IngestError("need at least one full interval")
    path = PricePath(grid=GridSpec(n, m, spec.interval_length),
                     log_prices=fine)
    labels = [str(timestamps[k * m]) if spec.scale != "log-return"
              else str(k) for k in range(n + 1)]
    return path, labels


def ingest(spec: IngestSpec) -> PricePath:
    """Read a delimited price file into a fine-grid price path."""
    return load_price_path(spec)[0]


def path_digest(path: PricePath) -> str:
    """Stable digest of a price path's grid and values."""
    h = hashlib.sha256()
    h.update(f"{path.grid.n_intervals},{path.grid.steps_per_interval},"
             f"{path.grid.interval_length!r};".encode())
    h.update(np.ascontiguousarray(path.log_prices).tobytes())
    return h.hexdigest()


def file_digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class EpisodeRecord:
    """Episode endpoints as (index, label, fraction) triples."""

    start_index: int
    start_label: str
    start_fraction: float
    end_index: int | None = None
    end_label: str | None = None
    end_fraction: float | None = None

    @property
    def open_ended(self) -> bool:
        return self.end_index is None


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test run, serializable with exact round-tripping."""

    statistic_name: str
    value: float
    tau0: float
    n: int
    critical_values: dict
    decisions: dict
    datestamp_cv: float
    min_duration: float
    episodes: tuple
    provenance: dict = field(default_factory=dict)

    def to_text(self) -> str:
        out = ["# rvbubble test report"]
        out.append(f"statistic = {self.statistic_name}")
        out.append(f"value = {self.value:.17g}")
        out.append(f"tau0 = {self.tau0:.17g}")
        out.append(f"n = {self.n}")
        for level in sorted(self.critical_values):
            out.append(f"cv[{level:g}] = {self.critical_values[level]:.17g}")
        for level in sorted(self.decisions):
            word = "reject" if self.decisions[level] else "no-reject"
            out.append(f"decision[{level:g}] = {word}")
        out.append(f"datestamp_cv = {self.datestamp_cv:.17g}")
        out.append(f"min_duration = {self.min_duration:.17g}")
        for i, ep in enumerate(self.episodes, start=1):
            line = (f"episode[{i}] = start_index={ep.start_index} "
                    f"start_label={ep.start_label} "
                    f"start_fraction={ep.start_fraction:.17g}")
            if ep.open_ended:
                line += " end=open"
            else:
                line += (f" end_index={ep.end_index} end_label={ep.end_label} "
                         f"end_fraction={ep.end_fraction:.17g}")
            out.append(line)
        for key in sorted(self.provenance):
            out.append(f"prov.{key} = {self.provenance[key]}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TestReport":
        fields: dict = {"critical_values": {}, "decisions": {},
                        "episodes": [], "provenance": {}}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = (p.strip() for p in line.partition("="))
            if key.startswith("cv["):
                fields["critical_values"][float(key[3:-1])] = float(value)
            elif key.startswith("decision["):
                fields["decisions"][float(key[9:-1])] = value == "reject"
            elif key.startswith("episode["):
                fields["episodes"].append(_parse_episode(value))
            elif key.startswith("prov."):
                fields["provenance"][key[5:]] = value
            elif key == "statistic":
                fields["statistic_name"] = value
            elif key == "n":
                fields["n"] = int(value)
            elif key in ("value", "tau0", "datestamp_cv", "min_duration"):
                fields[key] = float(value)
        fields["episodes"] = tuple(fields["episodes"])
        return cls(**fields)


def _parse_episode(value: str) -> EpisodeRecord:
    parts = dict(p.split("=", 1) for p in value.split())
    if parts.get("end") == "open":
        return EpisodeRecord(
            start_index=int(parts["start_index"]),
            start_label=parts["start_label"],
            start_fraction=float(parts["start_fraction"]))
    return EpisodeRecord(
        start_index=int(parts["start_index"]),
        start_label=parts["start_label"],
        start_fraction=float(parts["start_fraction"]),
        end_index=int(parts["end_index"]),
        end_label=parts["end_label"],
        end_fraction=float(parts["end_fraction"]))


def episode_records(stamped: EpisodeList, n: int, labels=None) -> tuple:
    """Map episode fractions to (index, label, fraction) triples."""

    def lab(k: int) -> str:
        if labels is not None and 0 <= k < len(labels):
            return str(labels[k])
        return str(k)

    records = []
    for ep in stamped:
        k_start = int(round(ep.start * n))
        if ep.end is None:
            records.append(EpisodeRecord(k_start, lab(k_start), ep.start))
        else:
            k_end = int(round(ep.end * n))
            records.append(EpisodeRecord(k_start, lab(k_start), ep.start,
                                         k_end, lab(k_end), ep.end))
    return tuple(records)


def run_price_test(coarse_log_prices, rv_values, statistic: str, tau0: float,
                   labels=None, datestamp_cv: float | None = None,
                   min_duration: float | None = None,
                   min_episode: float | None = None,
                   provenance: dict | None = None):
    """Run one test pipeline and assemble its report.

    The realized-volatility pipeline devolatizes the coarse increments by the
    square roots of ``rv_values`` before tracing; the raw pipeline traces the
    coarse series directly. Returns ``(report, trace)`` so callers can also
    serialize or plot the detector trace.
    """
    if statistic not in ("pwy", "rvpwy"):
        raise ValueError("statistic must be 'pwy' or 'rvpwy'")
    coarse = np.asarray(coarse_log_prices, dtype=float)
    if statistic == "rvpwy":
        if rv_values is None:
            raise ValueError("rvpwy requires realized variances")
        sample = build_pseudo_sample(np.diff(coarse), np.sqrt(rv_values))
        trace = detector_trace(sample, tau0)
    else:
        trace = detector_trace(coarse, tau0)
    value = sup_stat(trace)
    cvs = {lv: builtin_cv("pwy-sup", lv) for lv in REPORT_LEVELS}
    decisions = {lv: value > cv for lv, cv in cvs.items()}
    if datestamp_cv is None:
        datestamp_cv = builtin_cv("df-marginal", 0.05)
    if min_duration is None:
        min_duration = default_min_duration(trace.n)
    stamped = filter_episodes(date_stamp(trace, datestamp_cv, min_duration),
                              min_episode)
    report = TestReport(
        statistic_name=statistic, value=value, tau0=tau0, n=trace.n,
        critical_values=cvs, decisions=decisions, datestamp_cv=datestamp_cv,
        min_duration=min_duration,
        episodes=episode_records(stamped, trace.n, labels),
        provenance={"version": __version__, **(provenance or {})})
    return report, trace


def trace_to_text(trace: DetectorTrace, cv: float) -> str:
    """Delimited detector-trace series (fraction, statistic, critical value)."""
    lines = [f"# kind={trace.kind} n={trace.n} tau0={trace.tau0:.17g}",
             "tau\tstat\tcv"]
    for frac, stat in zip(trace.fractions, trace.stats):
        stat_s = "nan" if np.isnan(stat) else f"{stat:.17g}"
        lines.append(f"{frac:.17g}\t{stat_s}\t{cv:.17g}")
    return "\n".join(lines) + "\n"
