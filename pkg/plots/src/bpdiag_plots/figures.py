"""Scatter grids and decay curves rendered from stored run artifacts.

Everything draws through the Agg backend at a fixed dpi with file metadata
stripped, so the same inputs always produce byte-identical images.  The
only statistic computed here is the sample Pearson correlation shown in
the scatter panel titles; the dashed decay lines replay the slope and
intercept stored in the summary instead of refitting.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import DecaySummary, PairDump, SERIES_KEYS

DPI = 150
FITTED_KEYS = ("var_grad", "one_minus_r")

_SPAN = 1.05
_BINS = np.linspace(-1.0, 1.0, 41)
_SERIES_STYLE = {
    "var_grad": ("o-", "C0", "var_grad"),
    "one_minus_r": ("s-", "C1", "1 - r"),
    "second_moment": ("^-", "C2", "second_moment"),
}
_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}

plt.rcParams["svg.hashsalt"] = "bpdiag-plots"


def sample_pearson(dump: PairDump) -> float:
    """Sample correlation of (t_minus, t_plus); the panel-title statistic."""
    if len(dump) == 0:
        raise ValueError(f"pairs_n{dump.n_qubits}: empty dump")
    if len(dump) < 2:
        raise ValueError(f"pairs_n{dump.n_qubits}: need at least two pairs")
    return float(np.corrcoef(dump.t_minus, dump.t_plus)[0, 1])


def panel_title(dump: PairDump) -> str:
    return f"n = {dump.n_qubits}   r = {sample_pearson(dump):+.3f}"


def fit_line(summary: DecaySummary, key: str) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) of the stored dashed line for ``key`` across the size range."""
    fit = summary.fits.get(key)
    if not fit:
        raise ValueError(f"summary stores no fit for '{key}'")
    x = np.array([summary.sizes.min(), summary.sizes.max()])
    return x, fit["slope"] * x + fit["intercept"]


def render_scatter_grid(dumps: list[PairDump], out: str | Path) -> Path:
    """One panel per dump: t_minus vs t_plus with marginal histograms."""
    if not dumps:
        raise ValueError("no pair dumps to draw")
    titles = [panel_title(dump) for dump in dumps]  # validates before any file I/O
    cols = min(3, len(dumps))
    rows = math.ceil(len(dumps) / cols)
    fig = plt.figure(figsize=(3.4 * cols, 3.4 * rows), constrained_layout=True)
    try:
        outer = fig.add_gridspec(rows, cols)
        for index, (dump, title) in enumerate(zip(dumps, titles)):
            cell = outer[index // cols, index % cols]
            _scatter_panel(fig, cell, dump, title)
        return _save(fig, out)
    finally:
        plt.close(fig)


def _scatter_panel(fig, cell, dump: PairDump, title: str) -> None:
    sub = cell.subgridspec(
        2, 2, width_ratios=(5, 1), height_ratios=(1, 5), hspace=0.04, wspace=0.04
    )
    main = fig.add_subplot(sub[1, 0])
    top = fig.add_subplot(sub[0, 0], sharex=main)
    side = fig.add_subplot(sub[1, 1], sharey=main)
    main.plot([-_SPAN, _SPAN], [-_SPAN, _SPAN], "--", color="0.45", lw=0.9)
    main.plot(dump.t_minus, dump.t_plus, ".", color="C0", ms=2.5, alpha=0.35)
    main.set_xlim(-_SPAN, _SPAN)
    main.set_ylim(-_SPAN, _SPAN)
    main.set_xlabel(r"$t_-$")
    main.set_ylabel(r"$t_+$")
    top.hist(dump.t_minus, bins=_BINS, color="C0")
    side.hist(dump.t_plus, bins=_BINS, orientation="horizontal", color="C0")
    top.axis("off")
    side.axis("off")
    top.set_title(title, fontsize=10)


def render_decay(summary: DecaySummary, out: str | Path) -> Path:
    """log10 of the three statistics vs n, plus the stored dashed fits."""
    if summary.sizes.size < 3:
        raise ValueError("decay figure needs at least three sizes")
    for key in SERIES_KEYS:
        if np.any(summary.series[key] <= 0.0):
            raise ValueError(f"'{key}' must be positive to draw its log10")
    lines = {key: fit_line(summary, key) for key in FITTED_KEYS}
    fig, ax = plt.subplots(figsize=(6.4, 4.4), constrained_layout=True)
    try:
        for key in SERIES_KEYS:
            style, color, label = _SERIES_STYLE[key]
            ax.plot(summary.sizes, np.log10(summary.series[key]), style,
                    color=color, ms=5, lw=1.2, label=label)
        for key in FITTED_KEYS:
            x, y = lines[key]
            slope = summary.fits[key]["slope"]
            ax.plot(x, y, "--", color="0.5", lw=1.1,
                    label=f"stored fit, slope {slope:+.3f}")
        ax.set_xlabel("qubits n")
        ax.set_ylabel("log10 value")
        ax.set_xticks(summary.sizes)
        ax.grid(alpha=0.25, lw=0.5)
        ax.legend(fontsize=8)
        return _save(fig, out)
    finally:
        plt.close(fig)


def _save(fig, out: str | Path) -> Path:
    out = Path(out)
    if not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata=_METADATA.get(out.suffix.lower()))
    return out
