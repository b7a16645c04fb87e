"""Figure rendering for the CLI report path.

Uses matplotlib's object API directly (no pyplot, no global backend state),
so figures can be written to files from headless environments.
"""
from __future__ import annotations

from matplotlib.figure import Figure

from .datestamp import EpisodeList
from .dickey_fuller import DetectorTrace
from .simulate import PricePath


def save_detector_figure(trace: DetectorTrace, cv: float, out_path: str,
                         episodes: EpisodeList | None = None,
                         title: str | None = None) -> None:
    """Detector trace with its critical-value line and shaded episodes."""
    fig = Figure(figsize=(8.0, 4.5))
    ax = fig.subplots()
    ax.plot(trace.fractions, trace.stats, lw=1.2, color="tab:blue",
            label=f"{trace.kind.upper()} detector")
    ax.axhline(cv, ls="--", lw=1.0, color="tab:red", label=f"cv = {cv:g}")
    if episodes is not None:
        for i, ep in enumerate(episodes):
            end = ep.end if ep.end is not None else float(trace.fractions[-1])
            ax.axvspan(ep.start, end, color="tab:orange", alpha=0.2,
                       label="episode" if i == 0 else None)
    ax.set_xlabel("sample fraction")
    ax.set_ylabel("statistic")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=9)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")


def save_path_figure(path: PricePath, out_path: str,
                     title: str | None = None) -> None:
    """Simulated log-price path with its variance panel when available."""
    has_var = path.variance_path is not None
    fig = Figure(figsize=(8.0, 5.5 if has_var else 4.0))
    axes = fig.subplots(2 if has_var else 1, 1, sharex=True)
    ax_price = axes[0] if has_var else axes
    steps = range(len(path.log_prices))
    ax_price.plot(steps, path.log_prices, lw=0.8, color="tab:blue")
    ax_price.set_ylabel("log price")
    if title:
        ax_price.set_title(title)
    if has_var:
        axes[1].plot(steps, path.variance_path, lw=0.8, color="tab:green")
        axes[1].set_ylabel("variance")
        axes[1].set_xlabel("fine step")
    else:
        ax_price.set_xlabel("fine step")
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
