"""Figure rendering for sweep reports.

The CLI report paths write these PNGs next to their delimited output. All
renderers take explicit data plus an output path and return the path, so
they stay testable without a display; the Agg backend is forced at import.

The temporal heatmap uses a banded probability colour code shared with the
web UI: below 0.1 is grey, 0.1 to 0.5 inclusive is yellow, above 0.5 is
red, and within each band the colour darkens as the probability grows.
:func:`probability_color` is the reference implementation of that rule.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data_io import aperture_channel_names
from .earlyclass import ConfusionMatrix, CurvePoint, LooResult
from .explain import PdpSurface

__all__ = [
    "probability_color",
    "render_accuracy_curve",
    "render_confusion",
    "render_temporal",
    "render_pdp",
    "render_loo",
]

_GREY_LO, _GREY_HI = (0.92, 0.92, 0.92), (0.72, 0.72, 0.72)
_YELLOW_LO, _YELLOW_HI = (1.00, 0.93, 0.55), (0.95, 0.62, 0.10)
_RED_LO, _RED_HI = (0.93, 0.35, 0.25), (0.50, 0.00, 0.05)


def _lerp(lo: tuple, hi: tuple, t: float) -> tuple[float, float, float]:
    # endpoint-exact form: t = 1 returns hi bit for bit
    return tuple(a * (1.0 - t) + b * t for a, b in zip(lo, hi))


def probability_color(p: float) -> tuple[float, float, float]:
    """RGB in [0, 1] for one class probability, per the banded rule."""
    p = min(max(float(p), 0.0), 1.0)
    if p < 0.1:
        return _lerp(_GREY_LO, _GREY_HI, p / 0.1)
    if p <= 0.5:
        return _lerp(_YELLOW_LO, _YELLOW_HI, (p - 0.1) / 0.4)
    return _lerp(_RED_LO, _RED_HI, (p - 0.5) / 0.5)


def render_accuracy_curve(
    curve: list[CurvePoint],
    all_hist: dict[int, int],
    test_hist: dict[int, int],
    path: str | Path,
    bin_width: int = 10,
) -> Path:
    """Step accuracy curve over the window grid with length histograms below."""
    path = Path(path)
    windows = [p.window_len for p in curve]
    acc = [p.accuracy for p in curve]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    bars = ax.twinx()
    if all_hist:
        bars.bar(
            [b + bin_width / 2 for b in all_hist],
            list(all_hist.values()),
            width=bin_width * 0.9,
            color="0.82",
            label="series lengths (all)",
        )
    if test_hist:
        bars.bar(
            [b + bin_width / 2 for b in test_hist],
            list(test_hist.values()),
            width=bin_width * 0.9,
            color="#e6b84c",
            label="series lengths (test)",
        )
    bars.set_ylabel("series per length bin")
    bars.set_ylim(bottom=0)
    ax.step(windows, acc, where="post", color="tab:blue", linewidth=2, label="accuracy")
    ax.plot(windows, acc, "o", color="tab:blue", markersize=3)
    ax.set_xlabel("window length")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0, 1.02)
    ax.set_zorder(bars.get_zorder() + 1)
    ax.patch.set_visible(False)
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = bars.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, loc="lower right", fontsize=8)
    ax.set_title("accuracy by window length")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_confusion(cm: ConfusionMatrix, path: str | Path) -> Path:
    """Viridis heatmap with the count written into every cell."""
    path = Path(path)
    n = len(cm.classes)
    fig, ax = plt.subplots(figsize=(1.0 + 0.7 * n, 0.8 + 0.7 * n))
    im = ax.imshow(cm.counts, cmap="viridis")
    ax.set_xticks(range(n), cm.classes, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n), cm.classes, fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    threshold = cm.counts.max() / 2 if cm.counts.max() > 0 else 0
    for i in range(n):
        for j in range(n):
            ax.text(
                j,
                i,
                str(int(cm.counts[i, j])),
                ha="center",
                va="center",
                fontsize=8,
                color="white" if cm.counts[i, j] < threshold else "black",
            )
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title(f"confusion at window {cm.window_len} "
                 f"(accuracy {cm.accuracy:.3f})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_temporal(
    windows: tuple[int, ...],
    classes: tuple[str, ...],
    probs: np.ndarray,
    path: str | Path,
    title: str = "class probability by window",
) -> Path:
    """Banded-colour heatmap of (n_classes, n_windows) probabilities."""
    path = Path(path)
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (len(classes), len(windows)):
        raise ValueError("probs must have shape (n_classes, n_windows)")
    image = np.empty(probs.shape + (3,))
    for i in range(probs.shape[0]):
        for j in range(probs.shape[1]):
            image[i, j] = probability_color(probs[i, j])
    fig, ax = plt.subplots(
        figsize=(1.5 + 0.45 * len(windows), 1.2 + 0.4 * len(classes))
    )
    ax.imshow(image, aspect="auto", interpolation="nearest")
    ax.set_xticks(range(len(windows)), [str(w) for w in windows], fontsize=8)
    ax.set_yticks(range(len(classes)), classes, fontsize=8)
    ax.set_xlabel("window length")
    for i in range(probs.shape[0]):
        for j in range(probs.shape[1]):
            ax.text(
                j, i, f"{probs[i, j]:.2f}", ha="center", va="center", fontsize=7
            )
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _pdp_layout(channel_names: tuple[str, ...]) -> tuple[int, int]:
    if channel_names == aperture_channel_names(12):
        return 4, 3
    n = len(channel_names)
    cols = int(math.ceil(math.sqrt(n)))
    return int(math.ceil(n / cols)), cols


def render_pdp(surface: PdpSurface, path: str | Path) -> Path:
    """Small-multiple substitution response curves, one panel per channel."""
    path = Path(path)
    rows, cols = _pdp_layout(surface.channel_names)
    fig, axes = plt.subplots(
        rows,
        cols,
        figsize=(2.6 * cols, 1.9 * rows),
        sharex=True,
        sharey=True,
        squeeze=False,
    )
    colors = plt.get_cmap("tab10")
    for ch, name in enumerate(surface.channel_names):
        ax = axes[ch // cols][ch % cols]
        for ci, cls in enumerate(surface.classes):
            ax.plot(
                surface.grid,
                surface.curves[ch, ci],
                color=colors(ci % 10),
                linewidth=1.2,
                label=cls,
            )
        ax.set_title(name, fontsize=9)
        ax.set_ylim(-0.02, 1.02)
        ax.tick_params(labelsize=7)
    for k in range(len(surface.channel_names), rows * cols):
        axes[k // cols][k % cols].set_axis_off()
    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=min(len(labels), 4),
               fontsize=8)
    fig.suptitle(
        f"mean class probability vs substituted channel value "
        f"(window {surface.window_len})",
        fontsize=11,
    )
    fig.tight_layout(rect=(0, 0.08, 1, 0.95))
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_loo(result: LooResult, path: str | Path) -> Path:
    """Mean accuracy per window with a +-1 sample std band and fold traces."""
    path = Path(path)
    windows = list(result.grid.windows)
    summary = result.summary()
    mean = np.array([summary[w]["mean"] for w in windows])
    std = np.array([summary[w]["std"] for w in windows])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for fold in result.folds:
        ax.plot(
            windows,
            [fold.accuracies[w] for w in windows],
            color="0.8",
            linewidth=0.8,
        )
    ax.fill_between(windows, mean - std, mean + std, color="tab:blue", alpha=0.2)
    ax.plot(windows, mean, color="tab:blue", linewidth=2, marker="o", markersize=3)
    ax.set_xlabel("window length")
    ax.set_ylabel("held-out group accuracy")
    ax.set_ylim(0, 1.02)
    ax.set_title(
        f"leave-one-group-out accuracy ({len(result.folds)} folds, band is one "
        f"sample std)",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
