"""Figures written next to sweep and scan outputs."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _figure(width=7.0, height=None):
    if height is None:
        height = width * (math.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height))
    ax.tick_params(labelsize=9)
    return fig, ax


def plot_sweep(report, path: str | Path) -> Path:
    """Histogram of per-assignment optima, rank-deficient assignments stacked separately."""
    path = Path(path)
    probs = np.array([r.probability for r in report.records])
    deficient = np.array([r.rank_deficient for r in report.records], dtype=bool)
    fig, ax = _figure()
    bins = np.linspace(0.0, 1.0, 51)
    ax.hist(
        [probs[~deficient], probs[deficient]],
        bins=bins,
        stacked=True,
        label=["full rank", "rank deficient"],
        color=["#1f77b4", "#bbbbbb"],
    )
    ax.axvline(report.best_probability, color="#d62728", lw=1.2, ls="--",
               label=f"best {report.best_probability:.4f}")
    cfg = report.config
    ax.set_xlabel("optimized success probability")
    ax.set_ylabel("assignments")
    ax.set_title(f"n = {cfg['n']}, r = {cfg['r']}: {len(probs)} assignments", fontsize=10)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_learning_matrix(L, path: str | Path, title: str | None = None) -> Path:
    path = Path(path)
    fig, ax = _figure(5.0, 5.0)
    ax.imshow(L.entries, cmap="gray", vmin=-1, vmax=1, interpolation="nearest")
    ax.set_xlabel("hidden string a")
    ax.set_ylabel("query x")
    ax.set_title(title or f"learning matrix, h = {L.h}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_outcomes(distribution, n: int, path: str | Path, marked: int | None = None) -> Path:
    path = Path(path)
    fig, ax = _figure()
    x = np.arange(len(distribution))
    colors = ["#d62728" if i == marked else "#1f77b4" for i in x]
    ax.bar(x, distribution, color=colors, width=0.8)
    ax.set_xlabel("measured query register")
    ax.set_ylabel("probability")
    ax.set_ylim(0, 1.05)
    if len(x) <= 16:
        ax.set_xticks(x, [format(int(i), f"0{n}b") for i in x], rotation=90, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
