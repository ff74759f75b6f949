"""Figure rendering for the report and census paths (headless Agg backend)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .graphs import Graph  # noqa: E402


def spectrum_figure(eigenvalues, graph: Graph | None = None, title: str = "Laplacian spectrum"):
    """Stem plot of the eigenvalues, with a circular drawing of the graph when given."""
    if graph is not None:
        fig, (ax_eig, ax_graph) = plt.subplots(1, 2, figsize=(10, 4.2))
        _draw_graph(ax_graph, graph)
    else:
        fig, ax_eig = plt.subplots(figsize=(5.5, 4.2))
    values = sorted(float(v) for v in eigenvalues)
    ax_eig.stem(range(1, len(values) + 1), values)
    ax_eig.set_xlabel("index")
    ax_eig.set_ylabel("eigenvalue")
    ax_eig.set_title(title)
    ax_eig.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _draw_graph(ax, graph: Graph) -> None:
    positions = {}
    for k in range(graph.n):
        angle = math.pi / 2 - 2 * math.pi * k / graph.n
        positions[k + 1] = (math.cos(angle), math.sin(angle))
    for u, v in graph.sorted_edges:
        (x1, y1), (x2, y2) = positions[u], positions[v]
        ax.plot([x1, x2], [y1, y2], color="gray", zorder=1, linewidth=1.2)
    for v, (x, y) in positions.items():
        ax.scatter([x], [y], s=320, color="#4878cf", zorder=2)
        ax.text(x, y, str(v), ha="center", va="center", color="white", zorder=3)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(f"graph ({graph.n} vertices, {graph.edge_count} edges)")


def census_figure(rows, title: str = "Controllable from at least one node"):
    """Line plot of controllable fraction versus vertex count."""
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    ns = [int(n) for n, _ in rows]
    fractions = [float(f) for _, f in rows]
    ax.plot(ns, fractions, marker="o")
    ax.set_xlabel("number of vertices")
    ax.set_ylabel("controllable fraction")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
