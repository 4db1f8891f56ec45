"""Matplotlib renderings for CLI reports: graph drawings, Monte-Carlo
convergence traces, and per-degree dimension charts.

All figures are rendered headlessly to files; nothing here opens a
window or touches exact data.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return path


def draw_graph(graph, path, title=None):
    """Draw an admissible graph: ground vertices on the line, aerial
    vertices on an arc above, directed edges as arrows."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    pos = {}
    m = graph.n_ground
    for g in range(m):
        x = g if m == 1 else 2.0 * g / max(m - 1, 1)
        pos[graph.n_aerial + g] = (x, 0.0)
        ax.plot([x], [0.0], "s", color="black", markersize=9)
        ax.annotate(f"g{g + 1}", (x, -0.22), ha="center", fontsize=9)
    n = graph.n_aerial
    for v in range(n):
        theta = math.pi * (v + 1) / (n + 1)
        x, y = 1.0 + math.cos(theta), 0.4 + math.sin(theta)
        pos[v] = (x, y)
        ax.plot([x], [y], "o", color="tab:blue", markersize=10)
        ax.annotate(f"v{v + 1}", (x, y + 0.12), ha="center", fontsize=9)
    for src, (t1, t2) in zip(range(n), graph.edges):
        for tgt, style in ((t1, "-"), (t2, "--")):
            x0, y0 = pos[src]
            x1, y1 = pos[tgt]
            ax.annotate(
                "", xy=(x1, y1), xytext=(x0, y0),
                arrowprops=dict(arrowstyle="->", linestyle=style,
                                color="tab:red" if style == "-" else "tab:green",
                                shrinkA=8, shrinkB=8))
    ax.axhline(0.0, color="gray", linewidth=0.8, zorder=0)
    ax.set_title(title or graph.canonical_id, fontsize=9)
    ax.set_xlim(-0.6, 2.6)
    ax.set_ylim(-0.6, 1.8)
    ax.axis("off")
    return _save(fig, path)


def plot_mc_convergence(sample_counts, estimates, stderrs, path,
                        reference=None, title="Monte-Carlo weight estimate"):
    """Running estimate with a 3-sigma band against the sample count."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.errorbar(sample_counts, estimates, yerr=[3 * s for s in stderrs],
                fmt="o-", capsize=3, label="estimate ± 3·stderr")
    if reference is not None:
        ax.axhline(reference, color="tab:red", linestyle="--",
                   label=f"reference {reference}")
    ax.set_xscale("log")
    ax.set_xlabel("samples")
    ax.set_ylabel("weight")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_degree_dimensions(series, path, title="Per-degree dimensions"):
    """Grouped bar chart; `series` maps label -> {degree: dimension}."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    degrees = sorted({d for dims in series.values() for d in dims})
    width = 0.8 / max(len(series), 1)
    for k, (label, dims) in enumerate(sorted(series.items())):
        xs = [d + k * width for d in degrees]
        ax.bar(xs, [dims.get(d, 0) for d in degrees], width=width, label=label)
    ax.set_xticks([d + 0.4 - width / 2 for d in degrees])
    ax.set_xticklabels([str(d) for d in degrees])
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)
