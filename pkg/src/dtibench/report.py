"""Figure rendering for CLI reports.

All plots go straight to files through the Agg backend so runs work
headless.  The computation modules never import this; figures are a
presentation concern of the command layer and can be switched off with
--no-figures.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import LeakageMatrix

_META = {"Software": "dtibench"}


def _save(fig, path):
    fig.savefig(path, dpi=150, metadata=_META, bbox_inches="tight")
    plt.close(fig)


def render_histogram(bins, path, xlabel: str, title: str) -> None:
    """Bar plot from (low, high, count) bins."""
    fig, ax = plt.subplots(figsize=(6, 4))
    lows = [b[0] for b in bins]
    widths = [b[1] - b[0] for b in bins]
    counts = [b[2] for b in bins]
    ax.bar(lows, counts, width=widths, align="edge", edgecolor="black", linewidth=0.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    _save(fig, path)


def render_degree_histogram(hist: dict, path, side: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    degrees = sorted(hist)
    ax.bar(degrees, [hist[d] for d in degrees], width=0.9, edgecolor="black", linewidth=0.4)
    ax.set_xlabel(f"{side} degree")
    ax.set_ylabel("count")
    ax.set_title(title)
    _save(fig, path)


def render_leakage_heatmap(matrix: LeakageMatrix, path, title: str = "AUROC by train/test dataset") -> None:
    n = len(matrix.labels)
    fig, ax = plt.subplots(figsize=(1.2 * n + 2.5, 1.2 * n + 2))
    im = ax.imshow(matrix.values, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(n), matrix.labels, rotation=45, ha="right")
    ax.set_yticks(range(n), matrix.labels)
    ax.set_xlabel("test dataset")
    ax.set_ylabel("train dataset")
    for i in range(n):
        for j in range(n):
            v = matrix.values[i, j]
            ax.text(j, i, f"{v:.2f}", ha="center", va="center",
                    color="white" if v < 0.6 else "black", fontsize=9)
    ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.8, label="AUROC")
    _save(fig, path)


def render_sweep(rows, path, title: str = "AUROC vs train-window upper bound") -> None:
    """Line plot over t with error bars; the random baseline is a dashed line."""
    fig, ax = plt.subplots(figsize=(7, 4))
    windowed = [r for r in rows if r.t is not None]
    baseline = [r for r in rows if r.t is None]
    if windowed:
        ts = [r.t for r in windowed]
        means = [r.auroc_mean for r in windowed]
        stds = [r.auroc_std for r in windowed]
        ax.errorbar(ts, means, yerr=stds, marker="o", capsize=3, label="window sampler")
    for r in baseline:
        ax.axhline(r.auroc_mean, linestyle="--", color="gray",
                   label=f"random baseline ({r.auroc_mean:.3f})")
    ax.set_xlabel("t (A)")
    ax.set_ylabel("AUROC")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def render_trace(trace, path, title: str = "training trace") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    epochs = [r.epoch for r in trace]
    ax.plot(epochs, [r.mean_loss for r in trace], marker="o", label="mean loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    vals = [(r.epoch, r.val_auroc) for r in trace if r.val_auroc is not None]
    if vals:
        ax2 = ax.twinx()
        ax2.plot([e for e, _ in vals], [v for _, v in vals],
                 marker="s", color="tab:orange", label="val AUROC")
        ax2.set_ylabel("val AUROC")
    ax.set_title(title)
    ax.legend(loc="upper right")
    _save(fig, path)
