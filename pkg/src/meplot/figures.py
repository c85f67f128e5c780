"""Matplotlib rendering of ME plots, scaled sets and convergence reports.

Figures are written next to the delimited outputs; SVG files carry a
metadata comment embedding the exact command line and seed so a plot can
be reproduced from the file alone.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "meplot"

from .empirical import MePlotPoints, ScaledSet
from .geometry import LimitSet, Window
from .harness import ConvergenceReport, exceedance_curve


def _save(fig, path, comment: str | None):
    path = str(path)
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)
    if comment and path.endswith(".svg"):
        _inject_svg_comment(path, comment)


def _inject_svg_comment(path: str, comment: str):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    safe = comment.replace("--", "- -")
    insert_at = 1 if lines and lines[0].startswith("<?xml") else 0
    lines.insert(insert_at, f"<!-- {safe} -->\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)


def render_points(
    points: MePlotPoints | ScaledSet,
    path,
    *,
    title: str = "Mean excess plot",
    overlay: LimitSet | None = None,
    window: Window | None = None,
    comment: str | None = None,
):
    """Scatter of the point set, with an optional limit-set overlay."""
    pts = points.points
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(pts[:, 0], pts[:, 1], "o", ms=3, color="tab:blue", label="points")
    if overlay is not None:
        w = window or Window(max(5.0, float(np.nanmax(pts[:, 0])) * 1.05))
        a, b = overlay.clipped_endpoints(w)
        ax.plot([a[0], b[0]], [a[1], b[1]], "-", color="tab:red", lw=1.5, label="limit set")
        ax.legend(frameon=False)
    if isinstance(points, ScaledSet):
        ax.set_xlabel("scaled threshold")
        ax.set_ylabel("scaled mean excess")
    else:
        ax.set_xlabel("threshold")
        ax.set_ylabel("mean excess")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path, comment)


def render_report(report: ConvergenceReport, path, *, comment: str | None = None):
    """Exceedance curve and spread of the statistic across the n-grid."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ns = sorted({r.n for r in report.rows})
    if len(ns) >= 2:
        curve = exceedance_curve(report)
        ax1.plot([n for n, _ in curve], [p for _, p in curve], "o-", color="tab:blue")
    else:
        probs = [r.exceedance for r in report.rows]
        ax1.plot(ns * len(probs), probs, "o", color="tab:blue")
    ax1.set_xscale("log")
    ax1.set_xlabel("sample size n")
    ax1.set_ylabel(f"P(|stat - {report.limit:g}| > {report.epsilon:g})")
    ax1.set_title("exceedance probability")

    xs = [r.n for r in report.rows]
    ax2.errorbar(
        xs,
        [r.median for r in report.rows],
        yerr=[
            [r.median - r.q25 for r in report.rows],
            [r.q75 - r.median for r in report.rows],
        ],
        fmt="o-",
        color="tab:blue",
        capsize=3,
        label="median (IQR)",
    )
    ax2.axhline(report.limit, color="tab:red", lw=1.0, label="limit")
    ax2.set_xscale("log")
    ax2.set_xlabel("sample size n")
    ax2.set_ylabel(report.target)
    ax2.legend(frameon=False)
    ax2.set_title(f"{report.spec_string} ({report.regime})")
    fig.tight_layout()
    _save(fig, path, comment)
