"""Figure rendering: sweep panels and learning curves from solver CSVs.

Batch-only: the Agg backend is forced so no display is required, and for
fixed library versions a re-render of the same CSV is byte-stable.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schema import EQUAL, RANGE, SweepRow, read_learning, read_sweep  # noqa: E402

SWEEP_KIND = "sweep"
LEARNING_KIND = "learning"

EQUAL_COLOR = "tab:blue"
RANGE_COLOR = "0.55"
SERIES_COLORS = {"designed": "tab:blue", "goal": "tab:orange"}


@dataclass(frozen=True)
class PlotJob:
    """One batch rendering request."""

    input_csv: str
    output_image: str
    kind: str  # SWEEP_KIND or LEARNING_KIND


def _group_sweep(rows: List[SweepRow]) -> Dict[str, Dict[str, List[SweepRow]]]:
    """param -> mode -> rows sorted by the varied value."""
    panels: Dict[str, Dict[str, List[SweepRow]]] = {}
    for row in rows:
        panels.setdefault(row.param, {}).setdefault(row.mode, []).append(row)
    for modes in panels.values():
        for mode_rows in modes.values():
            mode_rows.sort(key=lambda r: r.value)
    return panels


def render_sweep(csv_path: str, out_path: str, dpi: int = 150) -> str:
    """One panel per varied parameter: realizable fraction with 95% CI bands.

    Equal-mode curves are drawn in color, range-mode curves in grey so the
    stricter criterion stands out against its upper envelope.  A
    single-value panel degrades to a point with an error bar.
    """
    panels = _group_sweep(read_sweep(csv_path))
    names = sorted(panels)
    fig, axes = plt.subplots(1, len(names), figsize=(3.2 * len(names), 3.0),
                             squeeze=False, sharey=True)
    for ax, name in zip(axes[0], names):
        for mode, color in ((RANGE, RANGE_COLOR), (EQUAL, EQUAL_COLOR)):
            rows = panels[name].get(mode, [])
            if not rows:
                continue
            x = np.array([r.value for r in rows])
            y = np.array([r.fraction for r in rows])
            lo = np.array([r.ci_low for r in rows])
            hi = np.array([r.ci_high for r in rows])
            if len(rows) == 1:
                yerr = [[float(y[0] - lo[0])], [float(hi[0] - y[0])]]
                ax.errorbar([float(x[0])], [float(y[0])], yerr=yerr, fmt="o",
                            color=color, label=mode, capsize=4)
            else:
                ax.plot(x, y, color=color, label=mode)
                ax.fill_between(x, lo, hi, color=color, alpha=0.25, linewidth=0)
        ax.set_xlabel(name)
        ax.set_ylim(0.0, 1.0)
    axes[0][0].set_ylabel("realizable fraction")
    axes[0][0].legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path


def render_learning(csv_path: str, out_path: str, dpi: int = 150) -> str:
    """Per-episode mean metric with a 95% CI band for each reward series.

    Expects the designed and goal series; if one is absent the other is
    still drawn and a warning is emitted.
    """
    rows = read_learning(csv_path)
    by_series: Dict[str, Dict[int, List[float]]] = {}
    for row in rows:
        by_series.setdefault(row.series, {}).setdefault(row.episode, []).append(row.metric)
    for expected in SERIES_COLORS:
        if expected not in by_series:
            warnings.warn(f"series {expected!r} missing from {csv_path}", stacklevel=2)

    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for series in sorted(by_series):
        episodes = sorted(by_series[series])
        data = [np.asarray(by_series[series][ep], dtype=float) for ep in episodes]
        mean = np.array([d.mean() for d in data])
        half = np.array([
            1.959963984540054 * d.std(ddof=1) / np.sqrt(d.size) if d.size > 1 else 0.0
            for d in data
        ])
        color = SERIES_COLORS.get(series)
        ax.plot(episodes, mean, label=series, color=color)
        ax.fill_between(episodes, mean - half, mean + half, alpha=0.25,
                        linewidth=0, color=color)
    ax.set_xlabel("episode")
    ax.set_ylabel("acceptable-policy match")
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path


def render(job: PlotJob, dpi: int = 150) -> str:
    """Dispatch a PlotJob to the matching renderer."""
    if job.kind == SWEEP_KIND:
        return render_sweep(job.input_csv, job.output_image, dpi)
    if job.kind == LEARNING_KIND:
        return render_learning(job.input_csv, job.output_image, dpi)
    raise ValueError(f"unknown plot kind {job.kind!r}")
