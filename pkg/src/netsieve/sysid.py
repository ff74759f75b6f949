"""Realization of the consensus dynamics from sampled boundary data.

The chain is: impulse responses -> Markov parameters -> block-Hankel
factorization (Ho-Kalman) -> discrete realization -> principal matrix
logarithm -> continuous realization similar to the negative Laplacian.
Only similarity-invariant quantities (spectrum, characteristic polynomial,
the boundary product C~ A~ B~, trace) are exposed; the similarity transform
itself is never estimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import IoRecord
from .errors import (
    BranchAmbiguityError,
    IdentificationQualityError,
    NotFullOrderError,
)
from .graphs import char_poly

RANK_TOL = 1e-8
ROUNDING_LIMIT = 0.1  # identified boundary entries further than this from integers are rejected


@dataclass(frozen=True, eq=False)
class MarkovSequence:
    """Impulse-response matrices M_k = C_d A_d^{k-1} B_d, k = 1..len(params)."""

    params: tuple[np.ndarray, ...]
    delta: float
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]
    n: int

    @property
    def horizon(self) -> int:
        """Block rows available for a square Hankel matrix."""
        return len(self.params) // 2


@dataclass(frozen=True, eq=False)
class IdentifiedModel:
    """A realization (a, b, c) recovered from data, discrete or continuous."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int
    delta: float
    discrete: bool
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]
    spectrum_est: np.ndarray | None = None   # Laplacian eigenvalue estimates (ascending)
    char_poly_est: np.ndarray | None = None  # [1, a1, ..., aq] of det(sI - a)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class SieveInput:
    """Everything the topology sieve needs, read off an identified model."""

    n: int
    r_tilde_nodes: tuple[int, ...]            # nodes in both port sets, degree known
    boundary_degrees: tuple[int, ...]         # aligned with r_tilde_nodes
    known_pairs: tuple[tuple[int, int, bool], ...]  # (u, v, present) with u < v
    s: int                                    # residual degree sum of the unknown nodes
    lower_bounds: tuple[tuple[int, int], ...]  # (node, bound) for single-port nodes
    boundary_block: np.ndarray                # rounded C~ A~ B~ (integer entries)
    rounding_residual: float
    input_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]


def markov_from_impulses(records: list[IoRecord]) -> MarkovSequence:
    """Assemble Markov parameters column-block-wise from per-channel impulses.

    Record j must be the unit-impulse experiment on channel j with zero
    initial state; then M_k[:, j] is simply its output at step k.
    """
    if not records:
        raise ValueError("no impulse records given")
    first = records[0]
    r_in = first.inputs.shape[1]
    if len(records) != r_in:
        raise ValueError(f"need one record per input channel: got {len(records)} records "
                         f"for {r_in} channels")
    steps = first.inputs.shape[0]
    for j, record in enumerate(records):
        if record.delta != first.delta:
            raise ValueError("records have inconsistent sampling periods")
        if record.inputs.shape != (steps, r_in) or record.outputs.shape[0] != steps + 1:
            raise ValueError("records have inconsistent horizons")
        if np.max(np.abs(record.initial_state)) > 0:
            raise ValueError(f"record {j} has a nonzero initial state")
        expected = np.zeros((steps, r_in))
        expected[0, j] = 1.0
        if not np.array_equal(record.inputs, expected):
            raise ValueError(f"record {j} is not a unit-impulse experiment on channel {j + 1}")
    params = tuple(
        np.column_stack([records[j].outputs[k] for j in range(r_in)])
        for k in range(1, steps + 1)
    )
    return MarkovSequence(
        params=params,
        delta=first.delta,
        input_nodes=first.input_nodes,
        output_nodes=first.output_nodes,
        n=first.n,
    )


def hankel_realize(markov: MarkovSequence, max_order: int, rank_tol: float = RANK_TOL) -> IdentifiedModel:
    """Ho-Kalman realization from the block-Hankel of Markov parameters.

    The numerical order is the count of singular values above
    ``rank_tol * sigma_max``; the balanced factorization of the rank-q
    truncation yields (A_d, B_d, C_d) up to similarity. A kept/dropped
    singular-value gap under 10x is flagged as a rank-ambiguity warning.
    """
    h = markov.horizon
    if h < max_order:
        raise ValueError(f"horizon {h} is too short for max_order {max_order}; "
                         f"need at least {2 * max_order} Markov parameters")
    r_out, r_in = markov.params[0].shape
    blocks0 = [[markov.params[i + j] for j in range(h)] for i in range(h)]
    blocks1 = [[markov.params[i + j + 1] for j in range(h)] for i in range(h)]
    h0 = np.block(blocks0)
    h1 = np.block(blocks1)
    u, sing, vt = np.linalg.svd(h0)

    warnings: tuple[str, ...] = ()
    if sing.size == 0 or sing[0] == 0.0:
        order = 0
    else:
        order = int(np.sum(sing > rank_tol * sing[0]))
        if 0 < order < sing.size and sing[order] > 0:
            gap = sing[order - 1] / sing[order]
            if gap < 10.0:
                warnings = (f"rank ambiguity: singular-value gap {gap:.2f} at order {order}",)

    if order == 0:
        return IdentifiedModel(
            a=np.zeros((0, 0)), b=np.zeros((0, r_in)), c=np.zeros((r_out, 0)),
            order=0, delta=markov.delta, discrete=True,
            input_nodes=markov.input_nodes, output_nodes=markov.output_nodes,
            warnings=warnings,
        )

    sqrt_sing = np.sqrt(sing[:order])
    observability = u[:, :order] * sqrt_sing          # (h*r_out, q)
    controllability = (vt[:order, :].T * sqrt_sing).T  # (q, h*r_in)
    a_d = (u[:, :order] / sqrt_sing).T @ h1 @ (vt[:order, :].T / sqrt_sing)
    if markov.input_nodes == markov.output_nodes:
        # Matched ports make the Hankel symmetric, so the balanced realization
        # is symmetric up to roundoff; restoring that exactly keeps the
        # eigenvalue extraction well-conditioned for weakly excited modes.
        a_d = (a_d + a_d.T) / 2
    b_d = controllability[:, :r_in]
    c_d = observability[:r_out, :]
    return IdentifiedModel(
        a=a_d, b=b_d, c=c_d, order=order, delta=markov.delta, discrete=True,
        input_nodes=markov.input_nodes, output_nodes=markov.output_nodes,
        warnings=warnings,
    )


def reconstructed_markov(model: IdentifiedModel, count: int) -> list[np.ndarray]:
    """Markov parameters M_k of a discrete model, for residual checks."""
    if not model.discrete:
        raise ValueError("expected a discrete model")
    out = []
    power = np.eye(model.order)
    for _ in range(count):
        out.append(model.c @ power @ model.b)
        power = power @ model.a
    return out


def to_continuous(model: IdentifiedModel) -> IdentifiedModel:
    """Invert the zero-order hold: A~ = log(A_d~)/delta, plus B and C.

    The principal logarithm requires every eigenvalue of A_d~ strictly
    positive; a zero or negative eigenvalue means the sampling period was too
    large or an uncontrollable/unobservable mode collapsed, and is reported
    as a branch ambiguity.
    """
    if not model.discrete:
        raise ValueError("model is already continuous")
    if model.order == 0:
        return IdentifiedModel(
            a=model.a, b=model.b, c=model.c, order=0, delta=model.delta, discrete=False,
            input_nodes=model.input_nodes, output_nodes=model.output_nodes,
            spectrum_est=np.zeros(0), char_poly_est=np.array([1.0]),
            warnings=model.warnings,
        )
    symmetric = np.max(np.abs(model.a - model.a.T)) == 0.0
    if symmetric:
        lam_d, basis = np.linalg.eigh(model.a)
        if lam_d[0] <= 0:
            raise BranchAmbiguityError(
                f"discrete eigenvalues {lam_d} are not all strictly positive; "
                "matrix logarithm branch is ambiguous"
            )
        a = (basis * np.log(lam_d)) @ basis.T / model.delta
    else:
        # Numerically repeated eigenvalues of a non-normal realized matrix may
        # split into conjugate pairs with O(sqrt(eps)) imaginary parts; only
        # the closed negative real axis is out of the logarithm's domain.
        eigs = np.linalg.eigvals(model.a)
        if np.min(eigs.real) <= 0:
            raise BranchAmbiguityError(
                f"discrete eigenvalues {np.sort(eigs.real)} are not all strictly positive; "
                "matrix logarithm branch is ambiguous"
            )
        log_a = scipy.linalg.logm(model.a)
        if np.max(np.abs(np.imag(log_a))) > 1e-6 * max(1.0, float(np.max(np.abs(log_a)))):
            raise BranchAmbiguityError("matrix logarithm has a non-negligible imaginary part")
        a = np.real(log_a) / model.delta

    # B_d = (int_0^delta e^{At} dt) B; recover B through the same augmented
    # exponential used for discretization.
    q = model.order
    augmented = np.zeros((2 * q, 2 * q))
    augmented[:q, :q] = a * model.delta
    augmented[:q, q:] = np.eye(q) * model.delta
    integral = scipy.linalg.expm(augmented)[:q, q:]
    b = np.linalg.solve(integral, model.b)
    c = model.c.copy()

    lam = np.linalg.eigvalsh(-a) if symmetric else np.sort(np.linalg.eigvals(-a).real)
    return IdentifiedModel(
        a=a, b=b, c=c, order=q, delta=model.delta, discrete=False,
        input_nodes=model.input_nodes, output_nodes=model.output_nodes,
        spectrum_est=lam, char_poly_est=char_poly(lam),
        warnings=model.warnings,
    )


def extract_boundary_block(model: IdentifiedModel, n: int) -> SieveInput:
    """Read degrees and adjacencies off the similarity invariant C~ A~ B~.

    The product equals C A B for the true system, i.e. minus the Laplacian
    restricted to output rows and input columns: diagonal positions of nodes
    ported both ways carry their degree, off-diagonal positions decide the
    presence of every boundary-boundary pair, and rows of single-port nodes
    bound their degree from below. ``s`` is the degree sum left for the
    remaining nodes: trace(-A~) - sum of known degrees.
    """
    if model.discrete:
        raise ValueError("boundary extraction needs the continuous model")
    if model.order != n:
        raise NotFullOrderError(
            f"model order {model.order} != agent count {n}; "
            "the port sets do not render the network controllable and observable"
        )
    product = model.c @ model.a @ model.b
    block = np.round(product)
    residual = float(np.max(np.abs(product - block)))
    trace = float(np.trace(-model.a))
    residual = max(residual, abs(trace - round(trace)))
    if residual > ROUNDING_LIMIT:
        raise IdentificationQualityError(
            f"boundary block rounding residual {residual:.3g} exceeds {ROUNDING_LIMIT}"
        )
    block = block.astype(int)

    inputs = model.input_nodes
    outputs = model.output_nodes
    r_tilde = tuple(sorted(set(inputs) & set(outputs)))
    in_col = {v: j for j, v in enumerate(inputs)}
    out_row = {v: i for i, v in enumerate(outputs)}

    degrees = []
    for v in r_tilde:
        degree = -int(block[out_row[v], in_col[v]])
        if not 0 <= degree <= n - 1:
            raise IdentificationQualityError(f"identified degree {degree} of node {v} outside 0..{n - 1}")
        degrees.append(degree)

    pair_values: dict[tuple[int, int], int] = {}
    for u in outputs:
        for w in inputs:
            if u == w:
                continue
            value = int(block[out_row[u], in_col[w]])
            if value not in (0, 1):
                raise IdentificationQualityError(
                    f"identified off-diagonal entry {value} for pair ({u}, {w}) is not 0 or 1"
                )
            pair = (min(u, w), max(u, w))
            if pair_values.setdefault(pair, value) != value:
                raise IdentificationQualityError(f"inconsistent symmetric readings for pair {pair}")
    known_pairs = tuple((u, v, bool(val)) for (u, v), val in sorted(pair_values.items()))

    r_d = sum(degrees)
    s = int(round(trace)) - r_d
    if s < 0:
        raise IdentificationQualityError(f"negative residual degree sum s = {s}")

    lower_bounds = []
    for u in sorted(set(inputs) ^ set(outputs)):
        bound = sum(1 for (x, y, present) in known_pairs if present and u in (x, y))
        lower_bounds.append((u, bound))

    return SieveInput(
        n=n,
        r_tilde_nodes=r_tilde,
        boundary_degrees=tuple(degrees),
        known_pairs=known_pairs,
        s=s,
        lower_bounds=tuple(lower_bounds),
        boundary_block=block,
        rounding_residual=residual,
        input_nodes=inputs,
        output_nodes=outputs,
    )


# ---------------------------------------------------------------------------
# JSON form: matrices as row-major arrays of reals, boundary data as integers.

def model_to_json_dict(model: IdentifiedModel, sieve_input: SieveInput | None = None,
                       n: int | None = None) -> dict:
    if n is None:
        n = sieve_input.n if sieve_input is not None else model.order
    data = {
        "n": int(n),
        "order": model.order,
        "delta": model.delta,
        "discrete": model.discrete,
        "input_nodes": list(model.input_nodes),
        "output_nodes": list(model.output_nodes),
        "a": model.a.tolist(),
        "b": model.b.tolist(),
        "c": model.c.tolist(),
        "spectrum": None if model.spectrum_est is None else model.spectrum_est.tolist(),
        "char_poly": None if model.char_poly_est is None else model.char_poly_est.tolist(),
        "warnings": list(model.warnings),
    }
    if sieve_input is not None:
        data.update({
            "boundary_block": sieve_input.boundary_block.tolist(),
            "rounding_residual": sieve_input.rounding_residual,
            "r_tilde_nodes": list(sieve_input.r_tilde_nodes),
            "boundary_degrees": list(sieve_input.boundary_degrees),
            "known_pairs": [[u, v, present] for u, v, present in sieve_input.known_pairs],
            "s": sieve_input.s,
            "lower_bounds": [[node, bound] for node, bound in sieve_input.lower_bounds],
        })
    return data


def model_from_json_dict(data: dict) -> IdentifiedModel:
    spec = data.get("spectrum")
    poly = data.get("char_poly")
    try:
        return IdentifiedModel(
            a=np.array(data["a"], dtype=float).reshape(data["order"], data["order"]),
            b=np.array(data["b"], dtype=float).reshape(data["order"], len(data["input_nodes"])),
            c=np.array(data["c"], dtype=float).reshape(len(data["output_nodes"]), data["order"]),
            order=int(data["order"]),
            delta=float(data["delta"]),
            discrete=bool(data["discrete"]),
            input_nodes=tuple(int(v) for v in data["input_nodes"]),
            output_nodes=tuple(int(v) for v in data["output_nodes"]),
            spectrum_est=None if spec is None else np.asarray(spec, dtype=float),
            char_poly_est=None if poly is None else np.asarray(poly, dtype=float),
            warnings=tuple(data.get("warnings", ())),
        )
    except KeyError as exc:
        raise ValueError(f"model JSON is missing field {exc}") from exc


def sieve_input_from_json_dict(data: dict) -> SieveInput:
    try:
        return SieveInput(
            n=int(data["n"]),
            r_tilde_nodes=tuple(int(v) for v in data["r_tilde_nodes"]),
            boundary_degrees=tuple(int(d) for d in data["boundary_degrees"]),
            known_pairs=tuple((int(u), int(v), bool(p)) for u, v, p in data["known_pairs"]),
            s=int(data["s"]),
            lower_bounds=tuple((int(v), int(b)) for v, b in data["lower_bounds"]),
            boundary_block=np.array(data["boundary_block"], dtype=int),
            rounding_residual=float(data["rounding_residual"]),
            input_nodes=tuple(int(v) for v in data["input_nodes"]),
            output_nodes=tuple(int(v) for v in data["output_nodes"]),
        )
    except KeyError as exc:
        raise ValueError(f"model JSON is missing boundary data ({exc}); "
                         "was it produced by the identify step?") from exc
