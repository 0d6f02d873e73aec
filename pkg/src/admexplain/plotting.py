"""Static chart emitters for the report path.

Charts are rendered headless (Agg) from plain series data, so the CLI can
turn any exported series JSON into a figure file alongside the delimited
output. Output is byte-deterministic for identical series.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DPI = 110


def save_pdp_figure(
    points: Sequence[tuple[float, float]],
    feature: str,
    path: str | Path,
    ylabel: str = "mean prediction",
) -> Path:
    """Line chart of a partial-dependence series."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.5, color="#2b6cb0")
    ax.set_xlabel(feature)
    ax.set_ylabel(ylabel)
    ax.set_title(f"Partial dependence: {feature}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def save_importance_figure(
    importances: Mapping[str, tuple[float, float]],
    path: str | Path,
    title: str = "Permutation feature importance",
) -> Path:
    """Horizontal bar chart of mean importance with std whiskers."""
    items = sorted(importances.items(), key=lambda e: e[1][0])
    names = [name for name, _ in items]
    means = [v[0] for _, v in items]
    stds = [v[1] for _, v in items]
    fig, ax = plt.subplots(figsize=(6.0, 0.6 + 0.5 * max(len(items), 1)))
    ax.barh(names, means, xerr=stds, color="#2f855a", height=0.6, capsize=3)
    ax.set_xlabel("performance drop when shuffled")
    ax.set_title(title)
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out
