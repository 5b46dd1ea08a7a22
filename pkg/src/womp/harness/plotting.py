"""Static SVG renderings of sweep tables."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from womp.harness.stats import is_ok  # noqa: E402

# fixed metadata keeps the SVG bytes reproducible
_SVG_META = {"Date": None, "Creator": None}


def _positive_errors(rows):
    for r in rows:
        if not is_ok(r):
            continue
        v = float(r["rel_error"])
        if math.isfinite(v) and v > 0:
            yield r, v


def plot_lambda_sweep(rows, path, title: str | None = None) -> Path:
    """Boxplots of relative error against lambda, one panel per level."""
    by_level = defaultdict(lambda: defaultdict(list))
    desc = {}
    for r, v in _positive_errors(rows):
        lid = int(r["level_id"])
        desc[lid] = r["level_desc"]
        by_level[lid][float(r["lambda"])].append(v)
    levels = sorted(by_level)
    n = max(len(levels), 1)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False, sharey=True)
    for ax, lid in zip(axes[0], levels):
        lams = sorted(by_level[lid])
        data = [by_level[lid][lam] for lam in lams]
        # box widths proportional in log space
        pos = np.array(lams)
        widths = pos * 0.25 if len(pos) < 2 else pos * (np.diff(np.log(pos)).min() * 0.6)
        ax.boxplot(data, positions=pos, widths=widths, showfliers=True, manage_ticks=False,
                   flierprops={"markersize": 2})
        ax.plot(pos, [np.median(d) for d in data], "-", lw=1, color="tab:red")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("lambda")
        ax.set_title(desc[lid], fontsize=8)
    axes[0][0].set_ylabel("relative error")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_iteration_sweep(rows, path, title: str | None = None) -> Path:
    """Log-mean error per iteration with a one-sigma band, one curve per lambda."""
    from womp.harness.stats import log_stats

    curves = defaultdict(lambda: defaultdict(list))
    for r, v in _positive_errors(rows):
        curves[float(r["lambda"])][int(r["k"])].append(v)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    cmap = plt.get_cmap("viridis")
    lams = sorted(curves)
    for i, lam in enumerate(lams):
        ks = sorted(curves[lam])
        mu, sd = [], []
        for k in ks:
            vals = curves[lam][k]
            if len(vals) > 1:
                a, b = log_stats(vals)
            else:
                a, b = math.log10(vals[0]), 0.0
            mu.append(a)
            sd.append(b)
        mu, sd = np.array(mu), np.array(sd)
        color = "black" if lam == 0 else cmap(i / max(len(lams) - 1, 1))
        ax.plot(ks, 10 ** mu, color=color, lw=1.2 if lam == 0 else 0.8, label=f"{lam:.3g}")
        ax.fill_between(ks, 10 ** (mu - sd), 10 ** (mu + sd), color=color, alpha=0.12, lw=0)
    ax.set_yscale("log")
    ax.set_xlabel("iteration k")
    ax.set_ylabel("relative error")
    if len(lams) <= 12:
        ax.legend(title="lambda", fontsize=6, title_fontsize=7)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_table(rows, path, title: str | None = None) -> Path:
    """Pick the rendering from the table's columns."""
    if not rows:
        raise ValueError("empty table")
    if "k" in rows[0]:
        return plot_iteration_sweep(rows, path, title)
    return plot_lambda_sweep(rows, path, title)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": "womp", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path
