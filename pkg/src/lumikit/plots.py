"""Static chart output for reports (bar charts, PCA scatters).

matplotlib is imported lazily with the Agg backend so headless runs work
and importing the package stays cheap.  PNGs are written without the Date
metadata chunk, keeping repeated runs byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["metric_bars", "pca_scatter", "scale_bars"]

_SAVE_KW = {"dpi": 100, "metadata": {"Date": None}}

_CATEGORY_STYLE = {
    "named_illuminant": ("tab:orange", "o"),
    "kelvin_value": ("tab:red", "s"),
    "general_lighting": ("tab:blue", "^"),
    "generic_numeral": ("tab:green", "x"),
}


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def metric_bars(report, out_dir) -> list:
    """One bar chart per metric: per-preset mean with a population-std bar."""
    plt = _plt()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    agg = report.aggregates()["per_preset"]
    presets = sorted(agg)
    written = []
    for name, label in (
        ("angular_error_deg", "angular error (degrees)"),
        ("lab_mse", "CIELAB MSE"),
        ("ssim", "SSIM"),
    ):
        means = [agg[p][name]["mean"] for p in presets]
        stds = [agg[p][name]["std"] for p in presets]
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(presets, means, yerr=stds, capsize=3, color="tab:gray")
        ax.set_ylabel(label)
        ax.set_xlabel("preset")
        fig.tight_layout()
        path = out_dir / f"{name}.png"
        fig.savefig(path, **_SAVE_KW)
        plt.close(fig)
        written.append(path)
    return written


def pca_scatter(es, projections, explained, path) -> Path:
    """2-D projection scatter with category-coded markers."""
    plt = _plt()
    projections = np.asarray(projections)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 5))
    items = sorted(es.items, key=lambda it: it.row_index)
    for category, (color, marker) in _CATEGORY_STYLE.items():
        rows = [it.row_index for it in items if it.category == category]
        if rows:
            ax.scatter(
                projections[rows, 0], projections[rows, 1],
                c=color, marker=marker, label=category, s=36,
            )
    for it in items:
        ax.annotate(it.label, projections[it.row_index, :2], fontsize=6, alpha=0.7)
    ax.set_xlabel(f"pc1 ({100 * explained[0]:.1f}% var)")
    ax.set_ylabel(f"pc2 ({100 * explained[1]:.1f}% var)" if len(explained) > 1 else "pc2")
    ax.legend(fontsize=7)
    ax.set_title(f"{es.encoder_id} / {es.level}")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def scale_bars(result, path) -> Path:
    """Bar chart of study scale values with the bootstrap band when present."""
    plt = _plt()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scales = np.asarray(result.scales, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    yerr = None
    if result.bootstrap:
        low = np.asarray(result.bootstrap["low"])
        high = np.asarray(result.bootstrap["high"])
        yerr = np.vstack([scales - low, high - scales])
        yerr = np.maximum(yerr, 0.0)
    ax.bar(list(result.methods), scales, yerr=yerr, capsize=3, color="tab:gray")
    ax.set_ylabel("scale value")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
