"""In-process composition of the simulate / identify / sieve stages.

The CLI drives exactly these functions around file I/O, so a file-based run
and an in-memory run produce the same results.
"""

from __future__ import annotations

from .dynamics import (
    DiscreteSystem,
    IoRecord,
    build_steered_system,
    default_delta,
    discretize,
    impulse_experiments,
)
from .graphs import Graph
from .sieve import SPECTRAL_TOL, SieveReport, run_sieve
from .sysid import (
    RANK_TOL,
    IdentifiedModel,
    SieveInput,
    extract_boundary_block,
    hankel_realize,
    markov_from_impulses,
    to_continuous,
)


def simulate_impulses(g: Graph, input_nodes, output_nodes=None,
                      delta: float | None = None, horizon: int | None = None) -> list[IoRecord]:
    """Run one unit-impulse experiment per input channel on the graph's dynamics."""
    if output_nodes is None:
        output_nodes = input_nodes
    sys = build_steered_system(g, input_nodes, output_nodes)
    if delta is None:
        delta = default_delta(g.n)
    if horizon is None:
        horizon = 2 * g.n
    dsys: DiscreteSystem = discretize(sys, delta)
    return impulse_experiments(dsys, horizon)


def identify_from_records(records: list[IoRecord], n: int,
                          rank_tol: float = RANK_TOL) -> tuple[IdentifiedModel, SieveInput]:
    """Markov extraction, Hankel realization, matrix logarithm, boundary readout."""
    markov = markov_from_impulses(records)
    model = to_continuous(hankel_realize(markov, max_order=n, rank_tol=rank_tol))
    return model, extract_boundary_block(model, n)


def identify_graph(g: Graph, input_nodes, output_nodes=None,
                   delta: float | None = None, horizon: int | None = None,
                   rank_tol: float = RANK_TOL) -> tuple[IdentifiedModel, SieveInput]:
    """Simulate and identify in one step (noiseless round trip)."""
    records = simulate_impulses(g, input_nodes, output_nodes, delta, horizon)
    return identify_from_records(records, g.n, rank_tol)


def tomography(g: Graph, input_nodes, output_nodes=None,
               delta: float | None = None, horizon: int | None = None,
               rank_tol: float = RANK_TOL, spectral_tol: float = SPECTRAL_TOL) -> SieveReport:
    """Full pipeline: the report's matched set contains every topology
    consistent with what the ports reveal."""
    model, sieve_input = identify_graph(g, input_nodes, output_nodes, delta, horizon, rank_tol)
    return run_sieve(sieve_input, model.spectrum_est, spectral_tol)
