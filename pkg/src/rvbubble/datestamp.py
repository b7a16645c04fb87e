"""Date-stamping of explosive episodes from a detector trace.

An episode originates at the first grid fraction whose statistic exceeds the
critical value and concludes at the first later fraction, at least the
minimum separation away, whose statistic falls back below it. Scanning
repeats after each completed episode; a final up-crossing without a
down-crossing yields an open-ended episode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dickey_fuller import DetectorTrace


@dataclass(frozen=True)
class Episode:
    """One explosive episode in sample fractions; ``end=None`` = open-ended."""

    start: float
    end: float | None

    @property
    def open_ended(self) -> bool:
        return self.end is None

    @property
    def length(self) -> float | None:
        return None if self.end is None else self.end - self.start


@dataclass(frozen=True)
class EpisodeList:
    episodes: tuple
    cv_used: float
    min_duration: float

    def __post_init__(self) -> None:
        prev_end = -math.inf
        for ep in self.episodes:
            if ep.start <= prev_end:
                raise ValueError("episodes must be ordered and non-overlapping")
            prev_end = ep.start if ep.end is None else ep.end

    def __len__(self) -> int:
        return len(self.episodes)

    def __iter__(self):
        return iter(self.episodes)


def default_min_duration(n: int) -> float:
    """Minimum episode separation log(n) / n."""
    return math.log(n) / n


def date_stamp(trace: DetectorTrace, cv: float,
               min_duration: float | None = None) -> EpisodeList:
    """Estimate origination/conclusion fractions of explosive episodes.

    Crossings are strict (a statistic exactly at ``cv`` triggers nothing) and
    degenerate trace entries are skipped. ``min_duration`` defaults to
    ``log(n) / n`` for the trace's sample size.
    """
    if min_duration is None:
        min_duration = default_min_duration(trace.n)
    if min_duration < 0:
        raise ValueError("min_duration must be nonnegative")
    fractions = trace.fractions
    stats = trace.stats
    episodes = []
    start = None
    for frac, stat in zip(fractions, stats):
        if start is None:
            if stat > cv:
                start = frac
        elif frac >= start + min_duration and stat < cv:
            episodes.append(Episode(start=start, end=frac))
            start = None
    if start is not None:
        episodes.append(Episode(start=start, end=None))
    return EpisodeList(episodes=tuple(episodes), cv_used=cv,
                       min_duration=min_duration)


def filter_episodes(stamped: EpisodeList,
                    min_length: float | None = None) -> EpisodeList:
    """Drop completed episodes shorter than ``min_length``.

    Open-ended episodes are always kept (their length is unknown). The
    default filter length is the list's own minimum separation, under which
    completed episodes pass unchanged by construction.
    """
    if min_length is None:
        min_length = stamped.min_duration
    kept = tuple(ep for ep in stamped.episodes
                 if ep.end is None or ep.length >= min_length)
    return EpisodeList(episodes=kept, cv_used=stamped.cv_used,
                       min_duration=stamped.min_duration)
