"""Enumeration of all graphs consistent with identified boundary data.

Three stages: restricted integer partitions propose degree sequences for the
nodes whose degree is unknown, a Havel-Hakimi screen drops non-graphical
sequences, and a constrained degree-driven construction enumerates every
labeled realization honoring the known boundary adjacencies. Candidates are
then collapsed up to relabeling of never-ported vertices and filtered by
spectral match against the identified eigenvalues.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from itertools import combinations_with_replacement, permutations

import numpy as np

from .errors import CapacityError
from .graphs import Graph, spectrum
from .sysid import SieveInput

SPECTRAL_TOL = 1e-4
CONSTRUCTION_CAP = 10 ** 6
_DEDUP_MAX_INTERIOR = 10
_COUNT_ORACLE_MAX_S = 40
_COUNT_ORACLE_MAX_PARTS = 12


@dataclass(frozen=True)
class DegreeSequence:
    """Degrees per labeled vertex, or an unlabeled multiset (``labeled`` flags which)."""

    degrees: tuple[int, ...]
    labeled: bool = True

    def __iter__(self):
        return iter(self.degrees)

    def __len__(self):
        return len(self.degrees)


@dataclass(frozen=True)
class PartitionProblem:
    """Partition ``s`` into ``m`` parts within [min_part, max_part]; the first
    ``len(positional_lower_bounds)`` constrained positions carry lower bounds."""

    s: int
    m: int
    max_part: int
    min_part: int = 1
    positional_lower_bounds: tuple[int, ...] = ()


@dataclass(frozen=True)
class ConstructionProblem:
    """A labeled target degree sequence plus forced and forbidden vertex pairs."""

    n: int
    target_degrees: tuple[int, ...]
    forced_edges: frozenset[tuple[int, int]] = frozenset()
    forbidden_pairs: frozenset[tuple[int, int]] = frozenset()


@dataclass(frozen=True)
class Candidate:
    graph: Graph
    residual: float
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class SieveCounters:
    partitions_examined: int
    sequences_graphical: int
    graphs_constructed: int
    graphs_after_dedup: int
    search_space_ratio: float  # 2^(n(n-1)/2) over graphs constructed


@dataclass(frozen=True)
class SieveReport:
    n: int
    spectral_tol: float
    partitions: tuple[tuple[int, ...], ...]
    graphical_sequences: tuple[tuple[int, ...], ...]
    candidates: tuple[Candidate, ...]
    matched: tuple[Candidate, ...]
    counters: SieveCounters


# ---------------------------------------------------------------------------
# Stage 1: restricted integer partitions

def restricted_partitions(problem: PartitionProblem) -> list[tuple[int, ...]]:
    """All partitions of s into m bounded parts, as non-decreasing tuples in
    increasing lexicographic order.

    Bounds are enforced while generating (not by post-filtering), so the
    output size is proportional to work done. Positional lower bounds keep a
    partition only if its parts can be assigned to the constrained positions:
    since parts form a multiset, an assignment exists exactly when the k-th
    largest part is at least the k-th largest bound.
    """
    s, m = problem.s, problem.m
    lo, hi = problem.min_part, problem.max_part
    if m < 0:
        raise ValueError("part count must be nonnegative")
    if lo < 0 or hi < lo:
        raise ValueError(f"bad part bounds [{lo}, {hi}]")
    if len(problem.positional_lower_bounds) > m:
        raise ValueError("more positional bounds than parts")
    if m == 0:
        return [()] if s == 0 else []

    bounds_desc = sorted(problem.positional_lower_bounds, reverse=True)
    results: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], remaining: int, parts_left: int, low: int) -> None:
        if parts_left == 0:
            if remaining == 0:
                parts_desc = prefix[::-1]
                if all(parts_desc[k] >= bounds_desc[k] for k in range(len(bounds_desc))):
                    results.append(prefix)
            return
        for value in range(low, hi + 1):
            rest = remaining - value
            # every later part is >= value and <= hi
            if rest < (parts_left - 1) * value:
                break
            if rest > (parts_left - 1) * hi:
                continue
            extend(prefix + (value,), rest, parts_left - 1, value)

    extend((), s, m, lo)
    return results


def partition_count_oracle(s: int, m: int, max_part: int, min_part: int = 1) -> int:
    """Exact bounded-partition count by brute-force multiset enumeration.

    Independent of :func:`restricted_partitions` (filters
    ``combinations_with_replacement`` by sum); intentionally capped small.
    """
    if s > _COUNT_ORACLE_MAX_S or m > _COUNT_ORACLE_MAX_PARTS:
        raise ValueError(f"oracle capped at s <= {_COUNT_ORACLE_MAX_S}, m <= {_COUNT_ORACLE_MAX_PARTS}")
    if m == 0:
        return 1 if s == 0 else 0
    values = range(min_part, max_part + 1)
    return sum(1 for combo in combinations_with_replacement(values, m) if sum(combo) == s)


# ---------------------------------------------------------------------------
# Stage 2: graphicality

def is_graphical(degrees) -> bool:
    """Havel-Hakimi test: repeatedly delete the largest degree D and decrement
    the next D entries. The empty sequence and {0} are graphical."""
    seq = sorted((int(d) for d in degrees), reverse=True)
    if any(d < 0 for d in seq):
        return False
    while seq:
        if seq[0] == 0:
            return True
        largest = seq.pop(0)
        if largest > len(seq):
            return False
        for i in range(largest):
            seq[i] -= 1
            if seq[i] < 0:
                return False
        seq.sort(reverse=True)
    return True


def assemble_sequences(inp: SieveInput, partitions) -> list[ConstructionProblem]:
    """Bind unlabeled partitions to labeled vertices.

    Boundary nodes keep their identified degrees. Nodes ported in only one
    direction are pinned by identity, so every inequivalent assignment of
    parts meeting their lower bounds is emitted; the remaining free interior
    vertices take the leftover parts in non-increasing order (one canonical
    labeling per multiset - interior relabelings are collapsed later by
    :func:`dedup_candidates`). Non-graphical full sequences are dropped.
    """
    known_degree = dict(zip(inp.r_tilde_nodes, inp.boundary_degrees))
    bound_by_node = dict(inp.lower_bounds)
    bounded_nodes = sorted(bound_by_node)
    free_nodes = sorted(
        v for v in range(1, inp.n + 1) if v not in known_degree and v not in bound_by_node
    )
    forced = frozenset((u, v) for u, v, present in inp.known_pairs if present)
    forbidden = frozenset((u, v) for u, v, present in inp.known_pairs if not present)

    problems = []
    for parts in partitions:
        if len(parts) != inp.n - len(inp.r_tilde_nodes):
            raise ValueError("partition length does not match the number of unknown-degree nodes")
        for assignment in _bound_assignments(Counter(parts), bounded_nodes, bound_by_node):
            leftover = Counter(parts)
            for value in assignment.values():
                leftover[value] -= 1
            free_values = sorted(leftover.elements(), reverse=True)
            degrees = dict(known_degree)
            degrees.update(assignment)
            degrees.update(zip(free_nodes, free_values))
            full = tuple(degrees[v] for v in range(1, inp.n + 1))
            if not is_graphical(full):
                continue
            problems.append(ConstructionProblem(
                n=inp.n, target_degrees=full,
                forced_edges=forced, forbidden_pairs=forbidden,
            ))
    return problems


def _bound_assignments(available: Counter, nodes: list[int], bounds: dict[int, int]):
    """Distinct assignments of parts to lower-bounded nodes (value tuples only)."""
    if not nodes:
        yield {}
        return
    node, rest = nodes[0], nodes[1:]
    for value in sorted(v for v, count in available.items() if count > 0 and v >= bounds[node]):
        available[value] -= 1
        for sub in _bound_assignments(available, rest, bounds):
            yield {node: value, **sub}
        available[value] += 1


# ---------------------------------------------------------------------------
# Stage 3: constrained construction

def construct_graphs(cp: ConstructionProblem) -> list[Graph]:
    """Enumerate every labeled simple graph realizing ``target_degrees`` that
    contains all forced edges and avoids all forbidden pairs.

    Forced edges are placed up front (degrees reduced, pairs blocked). The
    recursion then settles one vertex at a time in non-increasing residual
    degree order (ties by label), enumerating its adjacency sets in
    colexicographic order from the rightmost feasible set downward. A set is
    explored only if the reduced sequence stays graphical; sets componentwise
    to the left of one that already passed are known graphical without
    retesting, since shifting a neighbor to a larger-degree partner preserves
    graphicality.

    Infeasible inputs (odd degree sum, forced edges exceeding a degree,
    non-graphical residual) yield an empty list. Aborts with
    :class:`CapacityError` after 10^6 emitted graphs.
    """
    n = cp.n
    target = list(cp.target_degrees)
    if len(target) != n:
        raise ValueError(f"expected {n} degrees, got {len(target)}")
    if any(d < 0 or d > n - 1 for d in target):
        raise ValueError("degrees must lie in [0, n-1]")
    for u, v in cp.forced_edges | cp.forbidden_pairs:
        if not (1 <= u < v <= n):
            raise ValueError(f"constraint pair ({u}, {v}) must be sorted and within 1..{n}")
    if cp.forced_edges & cp.forbidden_pairs:
        raise ValueError("forced and forbidden pair sets overlap")

    residual = {v: target[v - 1] for v in range(1, n + 1)}
    for u, v in cp.forced_edges:
        residual[u] -= 1
        residual[v] -= 1
    if any(d < 0 for d in residual.values()):
        return []
    if sum(residual.values()) % 2:
        return []

    blocked = set(cp.forbidden_pairs) | set(cp.forced_edges)
    results: list[Graph] = []

    def settle(residual: dict[int, int], edges: tuple[tuple[int, int], ...]) -> None:
        active = [v for v, d in residual.items() if d > 0]
        if not active:
            if len(results) >= CONSTRUCTION_CAP:
                raise CapacityError(
                    f"construction emitted more than {CONSTRUCTION_CAP} graphs", partial=results
                )
            results.append(Graph(n=n, edges=frozenset(edges)))
            return
        vertex = min(active, key=lambda v: (-residual[v], v))
        need = residual[vertex]
        partners = [
            u for u in active
            if u != vertex and (min(u, vertex), max(u, vertex)) not in blocked
        ]
        partners.sort(key=lambda u: (-residual[u], u))
        if len(partners) < need:
            return
        known_good: list[tuple[int, ...]] = []
        for positions in _colex_desc_combinations(len(partners), need):
            dominated = any(
                all(p <= g for p, g in zip(positions, good)) for good in known_good
            )
            if not dominated:
                reduced = dict(residual)
                reduced[vertex] = 0
                for index in positions:
                    reduced[partners[index]] -= 1
                if not is_graphical(reduced.values()):
                    continue
                known_good.append(positions)
            chosen = [partners[index] for index in positions]
            next_residual = dict(residual)
            next_residual[vertex] = 0
            for u in chosen:
                next_residual[u] -= 1
            new_edges = tuple((min(vertex, u), max(vertex, u)) for u in chosen)
            settle(next_residual, edges + new_edges)

    settle(residual, tuple(cp.forced_edges))
    return results


def _colex_desc_combinations(total: int, size: int):
    """All ``size``-subsets of range(total) as ascending tuples, in
    colexicographically descending order."""
    def rec(max_exclusive: int, size: int):
        if size == 0:
            yield ()
            return
        for last in range(max_exclusive - 1, size - 2, -1):
            for rest in rec(last, size - 1):
                yield rest + (last,)

    yield from rec(total, size)


def dedup_candidates(graphs, fixed_labels) -> list[Graph]:
    """Collapse graphs equal up to a relabeling of the non-fixed vertices.

    The representative kept for each class is the lexicographically least
    edge set over all interior-vertex permutations (brute force; interior
    count capped at 10).
    """
    graphs = list(graphs)
    if not graphs:
        return []
    n = graphs[0].n
    fixed = set(fixed_labels)
    interior = sorted(v for v in range(1, n + 1) if v not in fixed)
    if len(interior) > _DEDUP_MAX_INTERIOR:
        raise CapacityError(
            f"{len(interior)} interior vertices exceed the dedup cap {_DEDUP_MAX_INTERIOR}"
        )
    relabelings = [dict(zip(interior, perm)) for perm in permutations(interior)]
    seen: dict[tuple[tuple[int, int], ...], None] = {}
    for g in graphs:
        canonical = min(
            tuple(sorted(
                (min(mapping.get(u, u), mapping.get(v, v)), max(mapping.get(u, u), mapping.get(v, v)))
                for u, v in g.edges
            ))
            for mapping in relabelings
        )
        seen.setdefault(canonical, None)
    return [Graph(n=n, edges=frozenset(form)) for form in sorted(seen)]


# ---------------------------------------------------------------------------
# Stage 4: spectral filtering and orchestration

def spectral_filter(candidates, target_spectrum=None, tol: float = SPECTRAL_TOL, *,
                    target_poly=None) -> SieveReport:
    """Score candidates by max absolute eigenvalue mismatch against the target.

    The target is given directly as eigenvalues whenever available (the
    identification pipeline produces them); a monic characteristic polynomial
    is accepted as a fallback and converted by root finding.
    """
    if (target_spectrum is None) == (target_poly is None):
        raise ValueError("give exactly one of target_spectrum or target_poly")
    if target_poly is not None:
        coeffs = np.asarray(target_poly, dtype=float)
        if abs(coeffs[0] - 1.0) > 1e-12:
            raise ValueError("characteristic polynomial must be monic")
        target = np.sort(-np.real(np.roots(coeffs)))
    else:
        target = np.sort(np.asarray(target_spectrum, dtype=float))
    n = len(target)

    scored = []
    for g in candidates:
        if g.n != n:
            raise ValueError(f"candidate has {g.n} vertices but target has degree {n}")
        residual = float(np.max(np.abs(spectrum(g) - target))) if n else 0.0
        scored.append(Candidate(graph=g, residual=residual, degrees=g.degrees()))
    scored.sort(key=lambda c: (c.residual, c.graph.sorted_edges))
    matched = tuple(c for c in scored if c.residual < tol)
    count = len(scored)
    return SieveReport(
        n=n,
        spectral_tol=tol,
        partitions=(),
        graphical_sequences=(),
        candidates=tuple(scored),
        matched=matched,
        counters=SieveCounters(
            partitions_examined=0,
            sequences_graphical=0,
            graphs_constructed=count,
            graphs_after_dedup=count,
            search_space_ratio=float(2 ** (n * (n - 1) // 2)) / max(count, 1),
        ),
    )


def report_to_json_dict(report: SieveReport) -> dict:
    """JSON form of a sieve report: graphs in the graph file format, residuals,
    and the stage counters."""
    from .graphs import graph_to_json_dict

    return {
        "n": report.n,
        "spectral_tol": report.spectral_tol,
        "partitions": [list(p) for p in report.partitions],
        "graphical_sequences": [list(s) for s in report.graphical_sequences],
        "candidates": [
            {
                "graph": graph_to_json_dict(c.graph),
                "residual": c.residual,
                "degrees": list(c.degrees),
                "matched": c.residual < report.spectral_tol,
            }
            for c in report.candidates
        ],
        "matched_count": len(report.matched),
        "counters": {
            "partitions_examined": report.counters.partitions_examined,
            "sequences_graphical": report.counters.sequences_graphical,
            "graphs_constructed": report.counters.graphs_constructed,
            "graphs_after_dedup": report.counters.graphs_after_dedup,
            "search_space_ratio": report.counters.search_space_ratio,
        },
    }


def matched_edge_lines(report: SieveReport) -> list[str]:
    """One line per matched graph, edges as "u-v" tokens."""
    return [
        " ".join(f"{u}-{v}" for u, v in candidate.graph.sorted_edges)
        for candidate in report.matched
    ]


def run_sieve(inp: SieveInput, target_spectrum, tol: float = SPECTRAL_TOL) -> SieveReport:
    """Full sieve: partitions -> graphical sequences -> constrained
    construction -> interior dedup -> spectral filter.

    On a capacity abort the partial report built so far is attached to the
    raised :class:`CapacityError`.
    """
    problem = PartitionProblem(
        s=inp.s,
        m=inp.n - len(inp.r_tilde_nodes),
        max_part=inp.n - 1,
        min_part=1,
        positional_lower_bounds=tuple(bound for _, bound in inp.lower_bounds),
    )
    parts_list = restricted_partitions(problem)
    problems = assemble_sequences(inp, parts_list)

    ported = sorted(set(inp.input_nodes) | set(inp.output_nodes))
    constructed: list[Graph] = []
    capacity_failure = None
    for cp in problems:
        try:
            constructed.extend(construct_graphs(cp))
        except CapacityError as exc:
            constructed.extend(exc.partial)
            capacity_failure = exc
            break

    deduped = dedup_candidates(constructed, ported)
    report = spectral_filter(deduped, target_spectrum, tol)
    report = replace(
        report,
        n=inp.n,
        partitions=tuple(parts_list),
        graphical_sequences=tuple(cp.target_degrees for cp in problems),
        counters=SieveCounters(
            partitions_examined=len(parts_list),
            sequences_graphical=len(problems),
            graphs_constructed=len(constructed),
            graphs_after_dedup=len(deduped),
            search_space_ratio=float(2 ** (inp.n * (inp.n - 1) // 2)) / max(len(constructed), 1),
        ),
    )
    if capacity_failure is not None:
        raise CapacityError(str(capacity_failure), partial=report)
    return report
