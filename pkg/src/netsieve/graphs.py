"""Labeled simple undirected graphs, Laplacian spectra, and structure reports.

Vertices are labeled 1..n. The spectral report collects everything the
Laplacian spectrum reveals about a graph without knowing its edges: edge
count, spanning-tree count, tree detection, Wiener index, Hoffman number,
the complement's reduced characteristic polynomial, star detection, and a
diameter bound for integer spectra.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InternalConsistencyError

# Tolerance for "zero eigenvalue" decisions and integer rounding. Laplacian
# quantities are exact integers at desk scale; identification error on
# noiseless data sits many orders of magnitude below this.
ZERO_TOL = 1e-6

# The sieve is exponential; refuse graphs beyond desk scale outright.
MAX_VERTICES = 64

_ORACLE_MAX_VERTICES = 12


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count ``n`` and sorted edge pairs."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        if self.n > MAX_VERTICES:
            raise ValueError(f"vertex count {self.n} exceeds supported maximum {MAX_VERTICES}")
        for edge in self.edges:
            u, v = edge
            if not (1 <= u < v <= self.n):
                raise ValueError(f"edge {edge} must be a sorted pair of distinct vertices in 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build a graph from any iterable of vertex pairs (order-insensitive)."""
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            canon.add((min(u, v), max(u, v)))
        return cls(n=int(n), edges=frozenset(canon))

    @property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return tuple(deg)

    def neighbors(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u - 1, v - 1] = 1.0
        a[v - 1, u - 1] = 1.0
    return a


def laplacian(g: Graph) -> np.ndarray:
    """Degree matrix minus adjacency matrix (symmetric PSD, zero row sums)."""
    lap = -adjacency_matrix(g)
    np.fill_diagonal(lap, g.degrees())
    return lap


def spectrum(g: Graph) -> np.ndarray:
    """Laplacian eigenvalues in non-decreasing order."""
    return np.linalg.eigvalsh(laplacian(g))


def poly_from_roots(roots) -> np.ndarray:
    """Monic polynomial coefficients (descending powers) with the given roots.

    Roots are multiplied in one at a time, largest magnitude first, which
    keeps intermediate coefficient growth monotone.
    """
    coeffs = np.array([1.0])
    for root in sorted(roots, key=abs, reverse=True):
        coeffs = np.convolve(coeffs, [1.0, -float(root)])
    return coeffs


def char_poly(eigenvalues) -> np.ndarray:
    """Coefficients [1, a1, ..., an] of det(sI + L) from Laplacian eigenvalues."""
    return poly_from_roots([-float(v) for v in eigenvalues])


def complement(g: Graph) -> Graph:
    """Graph on the same vertices whose edges are exactly the non-edges of ``g``."""
    all_pairs = set(combinations(range(1, g.n + 1), 2))
    return Graph(n=g.n, edges=frozenset(all_pairs - g.edges))


def subdivision(g: Graph) -> Graph:
    """Replace every edge {u, v} by a length-2 path through a fresh vertex."""
    n_new = g.n + len(g.edges)
    edges = []
    for i, (u, v) in enumerate(g.sorted_edges):
        mid = g.n + 1 + i
        edges.append((u, mid))
        edges.append((v, mid))
    return Graph.from_edges(n_new, edges)


def count_k_matchings(g: Graph, k: int) -> int:
    """Number of k-edge matchings, by exhaustive enumeration (small graphs only)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1
    edges = g.sorted_edges
    count = 0
    for combo in combinations(edges, k):
        seen: set[int] = set()
        for u, v in combo:
            seen.add(u)
            seen.add(v)
        if len(seen) == 2 * k:
            count += 1
    return count


def is_connected(g: Graph) -> bool:
    """Breadth-first connectivity check."""
    if g.n == 1:
        return True
    adj = g.neighbors()
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.n


def spanning_tree_count_oracle(g: Graph) -> int:
    """Exact spanning-tree count by deletion-contraction (no determinants).

    Contractions produce multigraphs; parallel edges are tracked as integer
    multiplicities so that contracting a multiplicity-m edge contributes a
    factor m. Capped at 12 vertices.
    """
    if g.n > _ORACLE_MAX_VERTICES:
        raise ValueError(f"deletion-contraction oracle is capped at {_ORACLE_MAX_VERTICES} vertices")
    adj: dict[int, dict[int, int]] = {v: {} for v in range(1, g.n + 1)}
    for u, v in g.edges:
        adj[u][v] = 1
        adj[v][u] = 1
    return _span_count(adj)


def _multigraph_connected(adj: dict[int, dict[int, int]]) -> bool:
    start = next(iter(adj))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(adj)


def _contract(adj: dict[int, dict[int, int]], keep: int, drop: int) -> dict[int, dict[int, int]]:
    new: dict[int, dict[int, int]] = {v: dict(nb) for v, nb in adj.items() if v != drop}
    merged = new[keep]
    merged.pop(drop, None)
    for w, mult in adj[drop].items():
        if w == keep:
            continue
        merged[w] = merged.get(w, 0) + mult
        new[w].pop(drop, None)
        new[w][keep] = merged[w]
    for w in new:
        new[w].pop(drop, None)
    return new


def _span_count(adj: dict[int, dict[int, int]]) -> int:
    if len(adj) == 1:
        return 1
    if not _multigraph_connected(adj):
        return 0
    # A pendant vertex forces its single (multi-)edge into every spanning tree.
    for v, nb in adj.items():
        if len(nb) == 1:
            (u, mult), = nb.items()
            return mult * _span_count(_contract(adj, u, v))
    v = min(adj, key=lambda x: (len(adj[x]), x))
    u = min(adj[v])
    mult = adj[v][u]
    deleted = {x: {y: m for y, m in nb.items() if {x, y} != {u, v}} for x, nb in adj.items()}
    return _span_count(deleted) + mult * _span_count(_contract(adj, u, v))


def cluster_eigenvalues(values, tol: float = ZERO_TOL) -> list[tuple[float, int, int]]:
    """Group a sorted value list into (mean, start, stop) clusters of gap <= tol."""
    values = np.asarray(values, dtype=float)
    clusters = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            clusters.append((float(values[start:i].mean()), start, i))
            start = i
    return clusters


@dataclass(frozen=True)
class SpectralReport:
    """Structure read off a Laplacian spectrum without seeing the edges.

    Fields whose hypotheses fail are ``None`` rather than zero: the Wiener
    index needs a tree, the Hoffman number and complement polynomial need all
    eigenvalues distinct, the diameter bound needs a connected integer
    spectrum.
    """

    n: int
    edge_count: int
    spanning_trees: float
    is_connected: bool
    is_tree: bool
    wiener_index: int | None
    hoffman_number: float | None
    complement_poly: tuple[float, ...] | None
    star_flag_tree: bool
    star_flag_three_eigenvalues: bool
    diameter_bound: int | None


def spectral_report(eigenvalues, n: int) -> SpectralReport:
    """Derive every spectrum-readable structural quantity for an n-vertex graph."""
    values = np.sort(np.asarray(eigenvalues, dtype=float))
    if len(values) != n:
        raise ValueError(f"expected {n} eigenvalues, got {len(values)}")
    if abs(values[0]) > ZERO_TOL:
        raise ValueError(f"smallest eigenvalue {values[0]} is not zero within {ZERO_TOL}")
    if values[0] < -ZERO_TOL or values[-1] > n + ZERO_TOL:
        raise ValueError("eigenvalues outside the Laplacian range [0, n]")

    zero_multiplicity = int(np.sum(values < ZERO_TOL))
    connected = zero_multiplicity == 1

    edge_sum = float(values.sum()) / 2.0
    edge_count = int(round(edge_sum))
    if abs(edge_sum - edge_count) >= ZERO_TOL:
        raise InternalConsistencyError(
            f"half the eigenvalue sum ({edge_sum}) is not an integer edge count"
        )

    kappa = float(np.prod(values[1:])) / n if connected else 0.0

    coeffs = char_poly(values)
    # coeffs[i] is a_i with a_0 = 1 (leading).
    a_second_last = float(coeffs[n - 1])
    tree = connected and (n == 1 or abs(a_second_last - n) < ZERO_TOL)

    wiener: int | None = None
    if tree:
        wiener = 0 if n == 1 else int(round(float(coeffs[n - 2])))

    clusters = cluster_eigenvalues(values)
    all_distinct = len(clusters) == n

    hoffman = float(np.prod(values[1:])) / n if all_distinct and n >= 2 else None

    comp_poly: tuple[float, ...] | None = None
    if all_distinct and n >= 2:
        comp_poly = tuple(float(c) for c in poly_from_roots([n - v for v in values[1:]]))

    positive_clusters = [c for c in clusters if c[0] > ZERO_TOL]
    simple_positive = sum(1 for _, start, stop in positive_clusters if stop - start == 1)
    star_tree = tree and n >= 2 and simple_positive == 1
    star_three = (
        connected
        and n >= 3
        and len(clusters) == 3
        and abs(values[1] - 1.0) < ZERO_TOL
    )

    diameter_bound: int | None = None
    if connected and np.all(np.abs(values - np.round(values)) < ZERO_TOL):
        diameter_bound = 2 * int(round(kappa))

    return SpectralReport(
        n=n,
        edge_count=edge_count,
        spanning_trees=kappa,
        is_connected=connected,
        is_tree=tree,
        wiener_index=wiener,
        hoffman_number=hoffman,
        complement_poly=comp_poly,
        star_flag_tree=star_tree,
        star_flag_three_eigenvalues=star_three,
        diameter_bound=diameter_bound,
    )


def report_for_graph(g: Graph) -> SpectralReport:
    """Spectral report for a concrete graph, with a BFS connectivity cross-check."""
    report = spectral_report(spectrum(g), g.n)
    if report.is_connected != is_connected(g):
        raise InternalConsistencyError(
            "eigenvalue multiplicity and breadth-first search disagree on connectivity"
        )
    return report


# ---------------------------------------------------------------------------
# File formats: JSON {"n": ..., "edges": [[u, v], ...]} or a whitespace
# edge-list text whose first line is "n=<int>".

def graph_to_json_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.sorted_edges]}


def graph_from_json_dict(data: dict) -> Graph:
    try:
        return Graph.from_edges(int(data["n"]), data.get("edges", []))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from exc


def parse_graph_text(text: str) -> Graph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_json_dict(json.loads(text))
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].replace(" ", "").startswith("n="):
        raise ValueError('edge-list text must start with a "n=<int>" line')
    n = int(lines[0].split("=", 1)[1])
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph.from_edges(n, edges)


def load_graph(path) -> Graph:
    with open(path) as handle:
        return parse_graph_text(handle.read())
