"""Figures for benchmark and magic-table reports.

Uses :class:`matplotlib.figure.Figure` directly so nothing depends on a GUI
backend or on pyplot's global state.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from magicdiv.bench import BenchReport
from magicdiv.codegen import MagicTableRow

_COLORS = {"native": "#4c72b0", "general": "#dd8452", "bounded": "#55a868"}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def plot_benchmark(report: BenchReport, path) -> Path:
    """Grouped bars of median ns/op per divisor and path."""
    fig = Figure(figsize=(max(4.0, 1.6 * len(report.rows) + 2), 3.6))
    ax = fig.add_subplot()
    x = np.arange(len(report.rows))
    width = 0.27
    for i, flavor in enumerate(("native", "general", "bounded")):
        values = [getattr(row, flavor).ns_per_op for row in report.rows]
        ax.bar(x + (i - 1) * width, values, width, label=flavor, color=_COLORS[flavor])
    labels = [f"{row.d}\n({row.note})" if row.note else str(row.d) for row in report.rows]
    ax.set_xticks(x, labels)
    ax.set_xlabel("divisor")
    ax.set_ylabel("ns / op (median)")
    ax.set_title(f"N={report.width}, {report.iterations} dividends, seed {report.seed}")
    ax.legend(frameon=False)
    ax.spines[["top", "right"]].set_visible(False)
    return _save(fig, path)


def plot_magic_table(width: int, rows: list[MagicTableRow], path) -> Path:
    """Magic number as a fraction of ``2**N`` against the divisor, with ``p`` below."""
    fig = Figure(figsize=(6.0, 4.5))
    top, bottom = fig.subplots(2, 1, sharex=True, height_ratios=(3, 1))
    d = np.array([r.d for r in rows], dtype=float)
    frac = np.array([r.m_lo / 2**width for r in rows])
    pow2 = np.array([r.pow2 for r in rows])
    marker = "." if len(rows) > 64 else "o"
    top.plot(d[~pow2], frac[~pow2], marker, ms=3, color=_COLORS["general"], ls="none",
             label="m_lo / 2^N")
    top.plot(d[pow2], frac[pow2], "x", color=_COLORS["native"], ls="none",
             label="power of two")
    top.set_ylabel("m_lo / 2^N")
    top.set_ylim(-0.05, 1.05)
    top.legend(frameon=False, loc="upper right")
    bottom.step(d, [r.p for r in rows], where="post", color="0.3")
    bottom.set_ylabel("p")
    bottom.set_xlabel("divisor d")
    if len(rows) > 1 and d.max() / d.min() > 64:
        bottom.set_xscale("log", base=2)
    for ax in (top, bottom):
        ax.spines[["top", "right"]].set_visible(False)
    return _save(fig, path)
