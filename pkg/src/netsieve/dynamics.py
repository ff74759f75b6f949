"""Steered-and-observed consensus dynamics.

Agents run a nearest-neighbor averaging protocol, so the state matrix is the
negative graph Laplacian. Input ports inject control at selected vertices,
output ports read selected states. This module builds that LTI system,
discretizes it exactly, rolls out sampled trajectories, and decides
controllability/observability per eigenspace.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import fileio
from .graphs import Graph, cluster_eigenvalues, is_connected, laplacian

RANK_TOL = 1e-8

_CENSUS_REJECTION_CAP = 100  # per-trial rejection budget for connected sampling


@dataclass(frozen=True, eq=False)
class SteeredSystem:
    """Continuous triple (a, b, c) with a = -L(G) and 0/1 selector ports."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """Zero-order-hold discretization of a steered system at period delta."""

    a_d: np.ndarray
    b_d: np.ndarray
    c_d: np.ndarray
    delta: float
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.a_d.shape[0]


@dataclass(frozen=True, eq=False)
class IoRecord:
    """Sampled input/output trajectories of one experiment.

    ``outputs`` has one more row than ``inputs``: the output is recorded at
    every step including k = 0, before the first input is applied.
    """

    delta: float
    inputs: np.ndarray   # (K, r_I)
    outputs: np.ndarray  # (K + 1, r_O)
    initial_state: np.ndarray
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]
    n: int


def _validate_nodes(nodes, n: int, label: str) -> tuple[int, ...]:
    nodes = tuple(int(v) for v in nodes)
    if not nodes:
        raise ValueError(f"{label} node list is empty")
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"{label} node list has duplicates: {nodes}")
    for v in nodes:
        if not 1 <= v <= n:
            raise ValueError(f"{label} node {v} outside 1..{n}")
    return nodes


def build_steered_system(g: Graph, input_nodes, output_nodes) -> SteeredSystem:
    """Attach input/output selector ports to the consensus dynamics of ``g``."""
    inputs = _validate_nodes(input_nodes, g.n, "input")
    outputs = _validate_nodes(output_nodes, g.n, "output")
    a = -laplacian(g)
    b = np.zeros((g.n, len(inputs)))
    c = np.zeros((len(outputs), g.n))
    for j, v in enumerate(inputs):
        b[v - 1, j] = 1.0
    for i, v in enumerate(outputs):
        c[i, v - 1] = 1.0
    return SteeredSystem(a=a, b=b, c=c, input_nodes=inputs, output_nodes=outputs)


def default_delta(n: int) -> float:
    """Sampling period 1/(2n): keeps exp(-delta*lambda) well away from zero
    for every Laplacian eigenvalue (bounded by n), so the matrix logarithm
    stays well-conditioned."""
    return 1.0 / (2 * n)


def discretize(sys: SteeredSystem, delta: float) -> DiscreteSystem:
    """Exact zero-order-hold discretization via one augmented matrix exponential.

    exp(delta * [[A, B], [0, 0]]) has exp(delta*A) in the top-left block and
    the integral term (int_0^delta exp(A t) dt) B in the top-right, so no
    quadrature is needed.
    """
    if not delta > 0:
        raise ValueError(f"sampling period must be positive, got {delta}")
    n, r = sys.b.shape
    augmented = np.zeros((n + r, n + r))
    augmented[:n, :n] = sys.a
    augmented[:n, n:] = sys.b
    exp_aug = scipy.linalg.expm(augmented * delta)
    return DiscreteSystem(
        a_d=exp_aug[:n, :n],
        b_d=exp_aug[:n, n:],
        c_d=sys.c.copy(),
        delta=float(delta),
        input_nodes=sys.input_nodes,
        output_nodes=sys.output_nodes,
    )


def simulate(dsys: DiscreteSystem, inputs, x0=None) -> IoRecord:
    """Roll out z(k+1) = A_d z(k) + B_d v(k), recording w(k) = C_d z(k) for
    every k = 0..K."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    n = dsys.n
    r_in = dsys.b_d.shape[1]
    if inputs.shape[1] != r_in:
        raise ValueError(f"input width {inputs.shape[1]} != number of input channels {r_in}")
    if x0 is None:
        x0 = np.zeros(n)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"initial state must have length {n}")
    state = x0.copy()
    outputs = [dsys.c_d @ state]
    for k in range(inputs.shape[0]):
        state = dsys.a_d @ state + dsys.b_d @ inputs[k]
        outputs.append(dsys.c_d @ state)
    return IoRecord(
        delta=dsys.delta,
        inputs=inputs,
        outputs=np.array(outputs),
        initial_state=x0,
        input_nodes=dsys.input_nodes,
        output_nodes=dsys.output_nodes,
        n=n,
    )


def impulse_experiments(dsys: DiscreteSystem, horizon: int) -> list[IoRecord]:
    """One zero-state unit-impulse experiment per input channel.

    The responses are exactly the Markov parameters, which is what the
    Hankel realization consumes.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    r_in = dsys.b_d.shape[1]
    records = []
    for j in range(r_in):
        inputs = np.zeros((horizon, r_in))
        inputs[0, j] = 1.0
        records.append(simulate(dsys, inputs))
    return records


# ---------------------------------------------------------------------------
# Controllability / observability

def _eigenspaces(g: Graph):
    values, vectors = np.linalg.eigh(laplacian(g))
    return values, vectors, cluster_eigenvalues(values)


def _restricted_rank(block: np.ndarray, scale: float) -> int:
    if block.size == 0:
        return 0
    sing = np.linalg.svd(block, compute_uv=False)
    return int(np.sum(sing > RANK_TOL * max(scale, 1.0)))


def pbh_check(g: Graph, input_nodes) -> tuple[bool, list[float]]:
    """Eigenspace-projection controllability test.

    An eigenvalue fails when some eigenvector in its eigenspace vanishes on
    every input coordinate, i.e. the eigenspace basis restricted to the input
    rows drops rank. By symmetry of the Laplacian the same routine answers
    observability for output nodes.
    """
    nodes = _validate_nodes(input_nodes, g.n, "input")
    rows = [v - 1 for v in nodes]
    values, vectors, clusters = _eigenspaces(g)
    bad = []
    for mean, start, stop in clusters:
        basis = vectors[:, start:stop]
        if _restricted_rank(basis[rows, :], 1.0) < stop - start:
            bad.append(mean)
    return (not bad), bad


def minimal_order(sys: SteeredSystem) -> int:
    """Dimension of the jointly controllable and observable subspace.

    Per eigenspace with orthonormal basis V, the surviving mode count is the
    rank of (C V)(V^T B); summing over eigenspaces gives the minimal
    realization order (n - i for i uncontrollable/unobservable eigenvalues in
    the SISO case).
    """
    values, vectors = np.linalg.eigh(-sys.a)
    clusters = cluster_eigenvalues(values)
    residues = []
    for _, start, stop in clusters:
        basis = vectors[:, start:stop]
        residues.append((sys.c @ basis) @ (basis.T @ sys.b))
    scale = max((np.linalg.norm(r, 2) for r in residues if r.size), default=1.0)
    return sum(_restricted_rank(r, scale) for r in residues)


def _sample_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    for _ in range(_CENSUS_REJECTION_CAP):
        mask = rng.random(len(pairs)) < p
        g = Graph(n=n, edges=frozenset(pair for pair, hit in zip(pairs, mask) if hit))
        if is_connected(g):
            return g
    raise ValueError(
        f"failed to sample a connected graph on {n} vertices at p={p} "
        f"within {_CENSUS_REJECTION_CAP} rejections; edge probability too low"
    )


def controllability_census(n: int, edge_probability: float, trials: int, rng_seed: int) -> float:
    """Fraction of sampled connected Erdos-Renyi graphs that are controllable
    from at least one single node.

    Each trial draws from its own seed-derived substream, so the result is
    independent of evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 < edge_probability < 1:
        raise ValueError("edge probability must be strictly between 0 and 1")
    hits = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((int(rng_seed), int(n), trial)))
        g = _sample_connected_graph(rng, n, edge_probability)
        if any(pbh_check(g, [v])[0] for v in range(1, n + 1)):
            hits += 1
    return hits / trials


# ---------------------------------------------------------------------------
# IoRecord files: one CSV per experiment ("k, v_1.., w_1..") plus a shared
# metadata sidecar {"delta", "n", "inputs", "outputs"}.

def io_record_to_csv(record: IoRecord, path) -> None:
    r_in = record.inputs.shape[1]
    r_out = record.outputs.shape[1]
    header = ["k"] + [f"v_{j + 1}" for j in range(r_in)] + [f"w_{i + 1}" for i in range(r_out)]
    rows = []
    for k in range(record.outputs.shape[0]):
        row: list = [k]
        if k < record.inputs.shape[0]:
            row.extend(record.inputs[k])
        else:
            row.extend([None] * r_in)  # final step has an output but no input
        row.extend(record.outputs[k])
        rows.append(row)
    fileio.write_csv(path, header, rows)


def save_io_records(records: list[IoRecord], directory) -> list[str]:
    """Write one impulse CSV per record plus the metadata sidecar; returns paths."""
    os.makedirs(directory, exist_ok=True)
    first = records[0]
    sidecar = {
        "delta": first.delta,
        "n": first.n,
        "inputs": list(first.input_nodes),
        "outputs": list(first.output_nodes),
    }
    fileio.atomic_write_text(os.path.join(directory, "metadata.json"), fileio.dumps_json(sidecar))
    paths = []
    for j, record in enumerate(records):
        path = os.path.join(directory, f"impulse_{j + 1}.csv")
        io_record_to_csv(record, path)
        paths.append(path)
    return paths


def load_io_records(directory) -> list[IoRecord]:
    """Read back the experiments written by :func:`save_io_records`."""
    with open(os.path.join(directory, "metadata.json")) as handle:
        sidecar = json.load(handle)
    delta = float(sidecar["delta"])
    n = int(sidecar["n"])
    input_nodes = tuple(int(v) for v in sidecar["inputs"])
    output_nodes = tuple(int(v) for v in sidecar["outputs"])
    names = sorted(
        (name for name in os.listdir(directory) if re.fullmatch(r"impulse_\d+\.csv", name)),
        key=lambda name: int(name.split("_")[1].split(".")[0]),
    )
    if not names:
        raise ValueError(f"no impulse_*.csv files in {directory}")
    records = []
    for name in names:
        with open(os.path.join(directory, name)) as handle:
            lines = [line.strip() for line in handle if line.strip()]
        header = lines[0].split(",")
        r_in = sum(1 for col in header if col.startswith("v_"))
        r_out = sum(1 for col in header if col.startswith("w_"))
        inputs, outputs = [], []
        for line in lines[1:]:
            cells = line.split(",")
            v_cells = cells[1:1 + r_in]
            if all(cell != "" for cell in v_cells):
                inputs.append([float(cell) for cell in v_cells])
            outputs.append([float(cell) for cell in cells[1 + r_in:1 + r_in + r_out]])
        records.append(IoRecord(
            delta=delta,
            inputs=np.array(inputs).reshape(len(inputs), r_in),
            outputs=np.array(outputs).reshape(len(outputs), r_out),
            initial_state=np.zeros(n),
            input_nodes=input_nodes,
            output_nodes=output_nodes,
            n=n,
        ))
    return records
