"""Report figures (Agg backend, no display needed)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import networkx as nx
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .algebra import FiniteMedianAlgebra, make_starlet, median_graph
from .registry import Summary, TheoremReport, summarise
from .topology import degree, min_isolating_branches, small_star_leaf_bound, tau_m, wall_metric

VERDICT_COLOURS = {"pass": "#4c9a5b", "fail": "#c0392b", "error": "#8e44ad", "n/a": "#b0b0b0"}


def _save(fig: Figure, path: Path) -> Path:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def check_summary_figure(summary: Summary, path: Path) -> Path:
    """Stacked horizontal bars of verdict counts per check."""
    ids = list(summary.rows)
    fig = Figure(figsize=(7, 0.28 * len(ids) + 1.2))
    ax = fig.add_subplot()
    left = np.zeros(len(ids))
    for verdict, colour in VERDICT_COLOURS.items():
        counts = np.array([summary.rows[c][verdict] for c in ids], dtype=float)
        ax.barh(ids, counts, left=left, color=colour, label=verdict)
        left += counts
    ax.invert_yaxis()
    ax.set_xlabel("instances")
    ax.set_title(f"registry verdicts ({summary.failures} failures)")
    ax.legend(loc="lower right", fontsize=7)
    ax.tick_params(axis="y", labelsize=7)
    return _save(fig, path)


def starlet_scaling_rows(sizes: Sequence[int] = tuple(range(2, 9))) -> list[dict]:
    rows = []
    for n in sizes:
        a = make_starlet(n)
        rows.append({
            "n": n,
            "min_branches": min_isolating_branches(a, 0).count,
            "degree": degree(a, 0),
            "leaves_kept": [small_star_leaf_bound(a, 0, k) for k in range(n + 1)],
        })
    return rows


def starlet_scaling_figure(rows: Sequence[dict], path: Path) -> Path:
    """Branches needed to isolate the centre, and leaves kept by small stars."""
    fig = Figure(figsize=(9, 3.6))
    ax1, ax2 = fig.subplots(1, 2)
    ns = [r["n"] for r in rows]
    ax1.plot(ns, [r["min_branches"] for r in rows], "o-k", label="min isolating branches")
    ax1.plot(ns, [r["degree"] for r in rows], "x--", color="#c0392b", label="degree")
    ax1.set_xlabel("leaves n")
    ax1.set_ylabel("branches")
    ax1.legend(fontsize=7)
    ax1.set_title("isolating the centre")
    for r in rows:
        ks = np.arange(len(r["leaves_kept"]))
        ax2.plot(ks, r["leaves_kept"], ".-", label=f"n={r['n']}")
    ax2.set_xlabel("branches k in the star")
    ax2.set_ylabel("leaves kept (minimum)")
    ax2.legend(fontsize=6, ncol=2)
    ax2.set_title("small stars keep n - k leaves")
    fig.text(0.5, -0.08, "desk-scale proxy: finite starlets stand in for the infinite case",
             ha="center", fontsize=7)
    return _save(fig, path)


def median_graph_figure(alg: FiniteMedianAlgebra, path: Path) -> Path:
    g = median_graph(alg)
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot()
    pos = nx.kamada_kawai_layout(g) if alg.n > 1 else {0: (0.0, 0.0)}
    discrete = tau_m(alg).is_discrete()
    nx.draw_networkx_edges(g, pos, ax=ax, edge_color="#777777")
    nx.draw_networkx_nodes(g, pos, ax=ax, node_size=120 if alg.n <= 40 else 40,
                           node_color="#4c72b0")
    if alg.n <= 40:
        nx.draw_networkx_labels(g, pos, {i: alg.name(i) for i in range(alg.n)}, ax=ax,
                                font_size=6)
    ax.set_title(f"median graph: n={alg.n}, discrete topology: {discrete}")
    ax.set_axis_off()
    return _save(fig, path)


def metric_heatmap_figure(alg: FiniteMedianAlgebra, path: Path) -> Path:
    d = wall_metric(alg)
    fig = Figure(figsize=(5, 4.2))
    ax = fig.add_subplot()
    im = ax.imshow(d, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="separating walls")
    ax.set_title("wall-count metric")
    ax.set_xlabel("element")
    ax.set_ylabel("element")
    return _save(fig, path)


def verify_figures(reports: Sequence[TheoremReport], directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    return [
        check_summary_figure(summarise(reports), out / "check_summary.png"),
        starlet_scaling_figure(starlet_scaling_rows(), out / "starlet_scaling.png"),
    ]


def analyze_figures(alg: FiniteMedianAlgebra, directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    return [
        median_graph_figure(alg, out / "median_graph.png"),
        metric_heatmap_figure(alg, out / "metric_heatmap.png"),
    ]
