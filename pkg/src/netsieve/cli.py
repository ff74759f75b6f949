"""Command-line interface.

Subcommands mirror the pipeline stages: ``simulate`` writes impulse
experiments, ``identify`` recovers a realization from them, ``sieve``
enumerates consistent topologies, ``report`` derives spectrum-readable
structure, and ``census`` estimates how often random graphs are controllable
from a single node. Every option can also come from a JSON config file;
explicit flags win.

Exit codes: 0 success (possibly with warnings), 2 invalid input,
3 identification failure, 4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import fileio, pipeline, plotting
from .dynamics import controllability_census, load_io_records, save_io_records
from .errors import CapacityError, IdentificationError
from .graphs import (
    Graph,
    is_connected,
    load_graph,
    report_for_graph,
    spectral_report,
    spectrum,
)
from .sieve import SPECTRAL_TOL, SieveReport, matched_edge_lines, report_to_json_dict, run_sieve
from .sysid import (
    RANK_TOL,
    model_from_json_dict,
    model_to_json_dict,
    sieve_input_from_json_dict,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IDENTIFICATION = 3
EXIT_CAPACITY = 4


def _parse_nodes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError as exc:
        raise ValueError(f"bad node list {text!r}: expected comma-separated integers") from exc


class _Options:
    """Flag values backed by an optional JSON config file; flags override."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._config: dict = {}
        if getattr(args, "config", None):
            with open(args.config) as handle:
                self._config = json.load(handle)
            if not isinstance(self._config, dict):
                raise ValueError("config file must contain a JSON object")

    def get(self, name: str, default=None, required: bool = False):
        value = getattr(self._args, name, None)
        if value is None:
            value = self._config.get(name, self._config.get(name.replace("_", "-"), default))
        if value is None and required:
            raise ValueError(f"missing required option --{name.replace('_', '-')}")
        return value


def _write_json(path, data) -> None:
    fileio.atomic_write_text(path, fileio.dumps_json(data))


def cmd_simulate(args: argparse.Namespace) -> int:
    opts = _Options(args)
    g = load_graph(opts.get("graph", required=True))
    input_nodes = _parse_nodes(str(opts.get("input_nodes", required=True)))
    output_raw = opts.get("output_nodes")
    output_nodes = _parse_nodes(str(output_raw)) if output_raw else input_nodes
    delta = opts.get("delta")
    horizon = opts.get("horizon")
    out_dir = opts.get("out_dir", required=True)

    if not is_connected(g):
        print("warning: graph is disconnected; the consensus dynamics decouple", file=sys.stderr)
    records = pipeline.simulate_impulses(
        g, input_nodes, output_nodes,
        delta=None if delta is None else float(delta),
        horizon=None if horizon is None else int(horizon),
    )
    paths = save_io_records(records, out_dir)
    print(f"wrote {len(paths)} impulse experiments to {out_dir} "
          f"(delta={records[0].delta:.6g}, steps={records[0].inputs.shape[0]})")
    return EXIT_OK


def cmd_identify(args: argparse.Namespace) -> int:
    opts = _Options(args)
    io_dir = opts.get("io_dir", required=True)
    out_path = opts.get("out", required=True)
    rank_tol = float(opts.get("rank_tol", RANK_TOL))

    records = load_io_records(io_dir)
    model, sieve_input = pipeline.identify_from_records(records, records[0].n, rank_tol)
    for warning in model.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    _write_json(out_path, model_to_json_dict(model, sieve_input, n=records[0].n))
    print(f"order: {model.order}")
    print("spectrum:", " ".join(f"{v:.8g}" for v in model.spectrum_est))
    print("char poly coefficients a_1..a_n:",
          " ".join(f"{v:.8g}" for v in model.char_poly_est[1:]))
    print("boundary block (C~ A~ B~):")
    for row in sieve_input.boundary_block:
        print("   " + " ".join(f"{v:4d}" for v in row))
    print(f"known boundary degrees: {dict(zip(sieve_input.r_tilde_nodes, sieve_input.boundary_degrees))}")
    print(f"residual degree sum s = {sieve_input.s}")
    print(f"model written to {out_path}")
    return EXIT_OK


def _print_sieve_summary(report: SieveReport) -> None:
    print(f"partitions examined:   {report.counters.partitions_examined}")
    for parts in report.partitions:
        print(f"   {_braced(parts)}")
    print(f"graphical sequences:   {report.counters.sequences_graphical}")
    for seq in report.graphical_sequences:
        print(f"   {seq}")
    print(f"graphs constructed:    {report.counters.graphs_constructed}")
    print(f"after interior dedup:  {report.counters.graphs_after_dedup}")
    print(f"matched (tol {report.spectral_tol:g}): {len(report.matched)}")
    for candidate in report.matched:
        print(f"   residual {candidate.residual:.3g}  edges {candidate.graph.sorted_edges}")


def _braced(parts) -> str:
    return "{" + ", ".join(str(p) for p in parts) + "}"


def cmd_sieve(args: argparse.Namespace) -> int:
    opts = _Options(args)
    model_path = opts.get("model", required=True)
    out_path = opts.get("out", required=True)
    edges_out = opts.get("edges_out")
    tol = float(opts.get("spectral_tol", SPECTRAL_TOL))

    with open(model_path) as handle:
        data = json.load(handle)
    model = model_from_json_dict(data)
    sieve_input = sieve_input_from_json_dict(data)
    if (sieve_input.s + sum(sieve_input.boundary_degrees)) % 2 == 1:
        print("warning: identified total degree is odd; no graph is consistent", file=sys.stderr)

    exit_code = EXIT_OK
    try:
        report = run_sieve(sieve_input, model.spectrum_est, tol)
    except CapacityError as exc:
        report = exc.partial
        print(f"warning: {exc}; report is partial", file=sys.stderr)
        exit_code = EXIT_CAPACITY
    if not report.candidates:
        print("warning: no candidate graph is consistent with the identified data", file=sys.stderr)

    _write_json(out_path, report_to_json_dict(report))
    if edges_out:
        lines = matched_edge_lines(report)
        fileio.atomic_write_text(edges_out, "\n".join(lines) + ("\n" if lines else ""))
    _print_sieve_summary(report)
    print(f"report written to {out_path}")
    return exit_code


def _report_json_dict(report) -> dict:
    return {
        "n": report.n,
        "edge_count": report.edge_count,
        "spanning_trees": report.spanning_trees,
        "is_connected": report.is_connected,
        "is_tree": report.is_tree,
        "wiener_index": report.wiener_index,
        "hoffman_number": report.hoffman_number,
        "complement_poly": None if report.complement_poly is None else list(report.complement_poly),
        "star_flag_tree": report.star_flag_tree,
        "star_flag_three_eigenvalues": report.star_flag_three_eigenvalues,
        "diameter_bound": report.diameter_bound,
    }


def cmd_report(args: argparse.Namespace) -> int:
    opts = _Options(args)
    graph_path = opts.get("graph")
    spectrum_path = opts.get("spectrum")
    out_dir = opts.get("out_dir", required=True)
    render = not opts.get("no_plot", False)

    if (graph_path is None) == (spectrum_path is None):
        raise ValueError("give exactly one of --graph or --spectrum")

    g: Graph | None = None
    if graph_path is not None:
        g = load_graph(graph_path)
        eigenvalues = spectrum(g)
        report = report_for_graph(g)
    else:
        with open(spectrum_path) as handle:
            values = [float(line.split(",")[-1]) for line in handle
                      if line.strip() and not line.lower().startswith(("index", "#"))]
        eigenvalues = np.sort(np.array(values))
        report = spectral_report(eigenvalues, len(eigenvalues))

    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "spectral_report.json"), _report_json_dict(report))
    fileio.write_csv(
        os.path.join(out_dir, "eigenvalues.csv"),
        ["index", "eigenvalue"],
        [(i + 1, float(v)) for i, v in enumerate(eigenvalues)],
    )
    if render:
        fig = plotting.spectrum_figure(eigenvalues, graph=g)
        plotting.save_figure(fig, os.path.join(out_dir, "spectral_report.png"))

    print(f"vertices: {report.n}   edges: {report.edge_count}   "
          f"spanning trees: {report.spanning_trees:.6g}")
    print(f"connected: {report.is_connected}   tree: {report.is_tree}")
    if report.wiener_index is not None:
        print(f"Wiener index: {report.wiener_index}")
    if report.hoffman_number is not None:
        print(f"Hoffman number: {report.hoffman_number:.6g}")
    print(f"outputs written to {out_dir}")
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    opts = _Options(args)
    n_min = int(opts.get("n_min", 2))
    n_max = int(opts.get("n_max", required=True))
    p = float(opts.get("p", 0.5))
    trials = int(opts.get("trials", 500))
    seed = int(opts.get("seed", 0))
    out_dir = opts.get("out_dir", required=True)
    render = not opts.get("no_plot", False)

    if n_min < 1 or n_max < n_min:
        raise ValueError(f"bad vertex range {n_min}..{n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        fraction = controllability_census(n, p, trials, seed)
        rows.append((n, fraction))
        print(f"n={n}: controllable fraction {fraction:.4f}")

    os.makedirs(out_dir, exist_ok=True)
    fileio.write_csv(os.path.join(out_dir, "census.csv"), ["n", "fraction"], rows)
    if render:
        fig = plotting.census_figure(rows)
        plotting.save_figure(fig, os.path.join(out_dir, "census.png"))
    print(f"outputs written to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netsieve",
        description="Reconstruct consensus-network topologies from boundary input/output data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write impulse-response experiments for a graph")
    sim.add_argument("--graph", help="graph file (JSON or edge-list text)")
    sim.add_argument("--input-nodes", dest="input_nodes", help="comma-separated input port vertices")
    sim.add_argument("--output-nodes", dest="output_nodes", help="output port vertices (default: inputs)")
    sim.add_argument("--delta", type=float, help="sampling period (default 1/(2n))")
    sim.add_argument("--horizon", type=int, help="number of sampled steps (default 2n)")
    sim.add_argument("--out-dir", dest="out_dir", help="directory for CSVs and metadata")
    sim.add_argument("--config", help="JSON config file; flags override its entries")
    sim.set_defaults(handler=cmd_simulate)

    ident = sub.add_parser("identify", help="recover a realization from impulse experiments")
    ident.add_argument("--io-dir", dest="io_dir", help="directory written by simulate")
    ident.add_argument("--rank-tol", dest="rank_tol", type=float,
                       help=f"relative singular-value cutoff (default {RANK_TOL:g})")
    ident.add_argument("--out", help="output model JSON path")
    ident.add_argument("--config", help="JSON config file; flags override its entries")
    ident.set_defaults(handler=cmd_identify)

    sieve_cmd = sub.add_parser("sieve", help="enumerate topologies consistent with a model")
    sieve_cmd.add_argument("--model", help="model JSON written by identify")
    sieve_cmd.add_argument("--spectral-tol", dest="spectral_tol", type=float,
                           help=f"eigenvalue match tolerance (default {SPECTRAL_TOL:g})")
    sieve_cmd.add_argument("--out", help="output report JSON path")
    sieve_cmd.add_argument("--edges-out", dest="edges_out",
                           help="optional flat text file, one matched graph per line")
    sieve_cmd.add_argument("--config", help="JSON config file; flags override its entries")
    sieve_cmd.set_defaults(handler=cmd_sieve)

    rep = sub.add_parser("report", help="spectrum-readable structure of a graph or spectrum")
    rep.add_argument("--graph", help="graph file (JSON or edge-list text)")
    rep.add_argument("--spectrum", help="CSV of eigenvalues (one per line, last column)")
    rep.add_argument("--out-dir", dest="out_dir", help="output directory")
    rep.add_argument("--no-plot", dest="no_plot", action="store_true", default=None,
                     help="skip figure rendering, emit data files only")
    rep.add_argument("--config", help="JSON config file; flags override its entries")
    rep.set_defaults(handler=cmd_report)

    census = sub.add_parser("census", help="controllability census over random connected graphs")
    census.add_argument("--n-min", dest="n_min", type=int, help="smallest vertex count (default 2)")
    census.add_argument("--n-max", dest="n_max", type=int, help="largest vertex count")
    census.add_argument("--p", type=float, help="edge probability (default 0.5)")
    census.add_argument("--trials", type=int, help="samples per vertex count (default 500)")
    census.add_argument("--seed", type=int, help="RNG seed (default 0)")
    census.add_argument("--out-dir", dest="out_dir", help="output directory")
    census.add_argument("--no-plot", dest="no_plot", action="store_true", default=None,
                        help="skip figure rendering, emit data files only")
    census.add_argument("--config", help="JSON config file; flags override its entries")
    census.set_defaults(handler=cmd_census)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IdentificationError as exc:
        print(f"identification error: {exc}", file=sys.stderr)
        return EXIT_IDENTIFICATION
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
