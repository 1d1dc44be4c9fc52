"""Figure rendering for evaluation output (headless, vector formats).

Figures are written to files only; the Agg backend is forced so nothing
here ever needs a display. SVG output is made byte-reproducible by fixing
the hash salt and dropping the creation date.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

__all__ = ["save_figure", "plot_ate", "plot_report_bars"]

plt.rcParams["svg.hashsalt"] = "trajeval"


def save_figure(fig, path) -> None:
    """Save and close a figure; strips volatile metadata from vector formats."""
    name = os.fspath(path)
    kwargs = {}
    if name.endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    elif name.endswith(".pdf"):
        kwargs["metadata"] = {"CreationDate": None}
    fig.savefig(name, **kwargs)
    plt.close(fig)


def plot_ate(pairs, aligned_est: np.ndarray, path, title: str = "") -> None:
    """Top-down (x/y) view: ground truth, aligned estimate, error segments."""
    gt = pairs.gt_translations
    fig, ax = plt.subplots(figsize=(7.0, 6.0))
    ax.plot(gt[:, 0], gt[:, 1], "-", color="black", linewidth=1.0, label="ground truth")
    ax.plot(
        aligned_est[:, 0],
        aligned_est[:, 1],
        "-",
        color="tab:blue",
        linewidth=1.0,
        label="estimated",
    )
    segments = np.stack([gt[:, :2], aligned_est[:, :2]], axis=1)
    ax.add_collection(
        LineCollection(segments, colors="red", linewidths=0.5, alpha=0.6, label="difference")
    )
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal", adjustable="datalim")
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    save_figure(fig, path)


def plot_report_bars(records, path) -> None:
    """Grouped bar charts (algorithm x sequence) for the headline metrics.

    Four panels: ATE RMSE, translational RPE RMSE, rotational RPE RMSE and
    runtime. The runtime panel only reflects externally supplied numbers --
    this tool does not measure the estimators themselves.
    """
    ok = [r for r in records if r.status == "ok"]
    fig, axes = plt.subplots(2, 2, figsize=(11.0, 7.5))
    if not ok:
        for ax in axes.flat:
            ax.set_axis_off()
        axes[0, 0].text(0.5, 0.5, "no successful entries", ha="center", va="center")
        save_figure(fig, path)
        return

    sequences = list(dict.fromkeys(r.sequence_label for r in ok))
    algorithms = list(dict.fromkeys(r.algorithm_label for r in ok))
    by_key = {(r.algorithm_label, r.sequence_label): r for r in ok}

    def stat_or_zero(record, getter):
        if record is None:
            return 0.0
        value = getter(record)
        return 0.0 if value is None else float(value)

    panels = [
        ("ATE RMSE [m]", lambda r: r.ate_stats.rmse if r.ate_stats else None),
        ("RPE translation RMSE [m]", lambda r: r.rpe_trans_stats.rmse if r.rpe_trans_stats else None),
        ("RPE rotation RMSE [rad]", lambda r: r.rpe_rot_stats.rmse if r.rpe_rot_stats else None),
        ("runtime [s] (external)", lambda r: r.external_runtime_seconds),
    ]
    x = np.arange(len(sequences))
    width = 0.8 / max(len(algorithms), 1)
    for ax, (label, getter) in zip(axes.flat, panels):
        for ai, algo in enumerate(algorithms):
            heights = [
                stat_or_zero(by_key.get((algo, seq)), getter) for seq in sequences
            ]
            ax.bar(x + (ai - 0.5 * (len(algorithms) - 1)) * width, heights, width, label=algo)
        ax.set_ylabel(label)
        ax.set_xticks(x)
        ax.set_xticklabels(sequences, rotation=20, ha="right")
        ax.grid(axis="y", alpha=0.3)
    has_runtime = any(r.external_runtime_seconds is not None for r in ok)
    if not has_runtime:
        axes[1, 1].set_title("no external runtime data supplied")
    axes[0, 0].legend(loc="best", fontsize="small")
    fig.tight_layout()
    save_figure(fig, path)
