"""Trotter gate sequences approximating exp(-beta H).

The gate set has a one-qubit gate f(t) = diag(t, 1) and two-qubit gates

    g(t) = [[1+t^2, 0, 0, t], [0,1,0,0], [0,0,1,0], [t, 0, 0, 1]]
    h(t) = (I x X) g(t) (I x X)

with f used for the d (I+Z) terms via f(e^{+-2s}) = e^{+-s(I+Z)}, g for the
q-couplings and h for the p-couplings of the split Hamiltonian.  One
half-period C holds every local factor once (f-block, g-block, h-block in
ascending qubit order); the full sequence is (C C^T) repeated r times, with
the reversal literal since every gate matrix is symmetric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import (
    DENSE_CAP_DEFAULT,
    DimensionTooLarge,
    FerroHamiltonian,
    embed_one,
    embed_two,
    split_coefficients,
    to_dense,
    _XX,
    _YY,
    _X,
)

GATE_KINDS = ("f", "g", "h")


@dataclass(frozen=True)
class Gate:
    """One elementary gate: kind 'f' on a single qubit or 'g'/'h' on a pair."""

    kind: str
    qubits: tuple[int, ...]
    t: float

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "f":
            if len(self.qubits) != 1:
                raise ValueError("f acts on one qubit")
            if not 0.0 < self.t < 2.0:
                raise ValueError(f"f parameter {self.t} outside (0, 2)")
        else:
            if len(self.qubits) != 2 or not self.qubits[0] < self.qubits[1]:
                raise ValueError("g/h act on an ordered pair i < j")
            if not 0.0 < self.t < 1.0:
                raise ValueError(f"{self.kind} parameter {self.t} outside (0, 1)")

    @property
    def arity(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class GateSequence:
    """Gates in application order (gates[0] acts first)."""

    gates: tuple[Gate, ...]
    n: int
    r: int
    period_len: int
    skipped: int

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def nominal_len(self) -> int:
        """Gate count before identity elision, 2 n^2 r."""
        return 2 * self.n * self.n * self.r


@dataclass
class TrotterDiagnostics:
    """Measured norms against their analytic bounds."""

    q_norm: float
    q_bound: float
    magnus_delta_norm: float
    magnus_bound: float
    prop1_norms: list[tuple[float, float, float]] = field(default_factory=list)


def f_matrix(t: float) -> np.ndarray:
    return np.array([[t, 0.0], [0.0, 1.0]])


def g_matrix(t: float) -> np.ndarray:
    return np.array(
        [
            [1.0 + t * t, 0.0, 0.0, t],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [t, 0.0, 0.0, 1.0],
        ]
    )


def h_matrix(t: float) -> np.ndarray:
    ix = np.kron(np.eye(2), _X)
    return ix @ g_matrix(t) @ ix


def local_matrix(gate: Gate) -> np.ndarray:
    if gate.kind == "f":
        return f_matrix(gate.t)
    if gate.kind == "g":
        return g_matrix(gate.t)
    return h_matrix(gate.t)


def gate_matrix(gate: Gate, n: int, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Dense 2^n x 2^n embedding of the gate on its qubits."""
    if n > cap:
        raise DimensionTooLarge(n, cap)
    if gate.kind == "f":
        return embed_one(f_matrix(gate.t), gate.qubits[0], n)
    return embed_two(local_matrix(gate), gate.qubits[0], gate.qubits[1], n)


def choose_r(n: int, beta: float, eps: float) -> int:
    """Smallest period count satisfying the step-size inequalities.

    Scans integers for r > 2 beta with 6 beta n^2 / r <= 1 and

        4 n^2 beta / r + 2 n^2 beta^2 / r + 2 pi 27 beta^3 n^6 / r^2 <= eps / 4.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    r = max(1, int(2 * beta))
    while True:
        if (
            r > 2 * beta
            and 6.0 * beta * n * n / r <= 1.0
            and (
                4.0 * n * n * beta / r
                + 2.0 * n * n * beta * beta / r
                + 2.0 * math.pi * 27.0 * beta**3 * n**6 / (r * r)
            )
            <= eps / 4.0
        ):
            return r
        r += 1


def build_sequence(
    ham: FerroHamiltonian,
    beta: float,
    eps: float | None = None,
    r: int | None = None,
) -> GateSequence:
    """Trotter sequence for exp(-beta H); r defaults to choose_r(n, beta, eps).

    Identity factors (d_i = 0, or zero split couplings) are elided and counted
    in `skipped`.  A Hamiltonian with all coefficients zero yields an empty
    sequence, whose trace is 2^n by convention.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if r is None:
        if eps is None:
            raise ValueError("provide eps or an explicit r")
        r = choose_r(ham.n, beta, eps)
    if r < 1:
        raise ValueError("r must be a positive integer")
    split = split_coefficients(ham)
    scale = beta / r
    half: list[Gate] = []
    for i, di in enumerate(ham.d, start=1):
        if di != 0.0:
            half.append(Gate("f", (i,), math.exp(-scale * di)))
    for key in sorted(split.q):
        if split.q[key] > 0.0:
            half.append(Gate("g", key, scale * split.q[key]))
    for key in sorted(split.p):
        if split.p[key] > 0.0:
            half.append(Gate("h", key, scale * split.p[key]))
    gates = tuple((half + half[::-1]) * r)
    nominal_half = ham.n * ham.n
    return GateSequence(
        gates=gates,
        n=ham.n,
        r=r,
        period_len=len(half),
        skipped=2 * r * (nominal_half - len(half)),
    )


def _distinct_matrices(seq: GateSequence, cap: int) -> dict[Gate, np.ndarray]:
    return {g: gate_matrix(g, seq.n, cap) for g in set(seq.gates)}


def sequence_product(seq: GateSequence, cap: int = DENSE_CAP_DEFAULT) -> tuple[np.ndarray, float]:
    """Ordered dense product of the sequence as (matrix, log_scale).

    The true product is matrix * exp(log_scale); the matrix is renormalized
    periodically so long sequences stay inside float range.
    """
    dim = 1 << seq.n
    if seq.n > cap:
        raise DimensionTooLarge(seq.n, cap)
    mats = _distinct_matrices(seq, cap)
    prod = np.eye(dim)
    log_scale = 0.0
    for idx, gate in enumerate(seq.gates):
        prod = mats[gate] @ prod
        if idx % 64 == 63:
            peak = np.abs(prod).max()
            if peak > 0.0:
                prod /= peak
                log_scale += math.log(peak)
    return prod, log_scale


def sequence_trace_exact(seq: GateSequence, cap: int = DENSE_CAP_DEFAULT) -> float:
    """Trace of the ordered product; 2^n for the empty sequence."""
    prod, log_scale = sequence_product(seq, cap)
    return float(np.trace(prod) * math.exp(log_scale))


def sequence_log_trace(seq: GateSequence, cap: int = DENSE_CAP_DEFAULT) -> float:
    """log Tr of the ordered product, stable for long sequences."""
    prod, log_scale = sequence_product(seq, cap)
    return math.log(float(np.trace(prod))) + log_scale


class MatrixLogError(RuntimeError):
    pass


def spd_log(mat: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Principal log of a symmetric positive-definite matrix."""
    sym = (mat + mat.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    if vals.min() <= floor:
        raise MatrixLogError(f"matrix not positive definite (min eig {vals.min():.3g})")
    return (vecs * np.log(vals)) @ vecs.T


def spectral_norm(mat: np.ndarray) -> float:
    sym = (mat + mat.T) / 2.0
    return float(np.abs(np.linalg.eigvalsh(sym)).max())


def g_log_coefficient(t: float) -> float:
    """Coefficient R(t) with log g(t) = (R/2)(XX - YY) + (t R / 4)(Z1 + Z2).

    Closed form acosh(1 + t^2/2) / sqrt(1 + t^2/4); satisfies
    |R(t) - t| <= t^3 / 6 on (0, 1).
    """
    return math.acosh(1.0 + t * t / 2.0) / math.sqrt(1.0 + t * t / 4.0)


def verify_prop1(t: float) -> tuple[float, float]:
    """Spectral norms of the g/h exponent remainders at parameter t.

    E(t) = log g(t) + (t/2)(YY - XX) and F(t) = (I x X) E(t) (I x X); both
    norms are bounded by t^2 for 0 < t < 1.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    e_mat = spd_log(g_matrix(t)) + (t / 2.0) * (_YY - _XX)
    ix = np.kron(np.eye(2), _X)
    f_mat = ix @ e_mat @ ix
    return spectral_norm(e_mat), spectral_norm(f_mat)


def prop1_remainder(t: float) -> np.ndarray:
    """The matrix E(t) itself, for inspecting individual coefficients."""
    return spd_log(g_matrix(t)) + (t / 2.0) * (_YY - _XX)


def period_matrix(seq: GateSequence, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Dense operator of one period (the first 2 * period_len gates)."""
    if seq.period_len == 0:
        return np.eye(1 << seq.n)
    mats = _distinct_matrices(seq, cap)
    dim = 1 << seq.n
    prod = np.eye(dim)
    for gate in seq.gates[: 2 * seq.period_len]:
        prod = mats[gate] @ prod
    return prod


def half_period_matrix(seq: GateSequence, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Product of the first half-period gates in stored order (C itself)."""
    dim = 1 << seq.n
    prod = np.eye(dim)
    for gate in seq.gates[: seq.period_len]:
        prod = prod @ gate_matrix(gate, seq.n, cap)
    return prod


def verify_magnus(
    seq: GateSequence,
    beta: float,
    ham: FerroHamiltonian,
    cap: int = DENSE_CAP_DEFAULT,
) -> TrotterDiagnostics:
    """Measure the one-period commutator remainder and the full-product error.

    One period satisfies C C^T = exp(-(beta/r) H + sum(2E + 2F) + Delta) with
    ||Delta|| <= 2 pi (delta L)^3 for delta = 3 beta / r and L the period gate
    count; the full product satisfies G_J...G_1 = exp(-beta H + Q).
    """
    if seq.n > cap:
        raise DimensionTooLarge(seq.n, cap)
    r = seq.r
    h_dense = to_dense(ham, cap)
    if seq.period_len == 0:
        zero = 0.0
        return TrotterDiagnostics(zero, _q_bound(seq.n, beta, r), zero, 0.0, [])

    period = period_matrix(seq, cap)
    log_period = spd_log(period)

    target = -(beta / r) * h_dense
    prop1: list[tuple[float, float, float]] = []
    for gate in seq.gates[: seq.period_len]:
        if gate.kind == "g":
            rem = spd_log(g_matrix(gate.t)) + (gate.t / 2.0) * (_YY - _XX)
            target += 2.0 * embed_two(rem, gate.qubits[0], gate.qubits[1], seq.n)
            prop1.append((gate.t, spectral_norm(rem), spectral_norm(rem)))
        elif gate.kind == "h":
            rem = spd_log(h_matrix(gate.t)) - (gate.t / 2.0) * (_YY + _XX)
            target += 2.0 * embed_two(rem, gate.qubits[0], gate.qubits[1], seq.n)
            prop1.append((gate.t, spectral_norm(rem), spectral_norm(rem)))

    delta = log_period - target
    l_count = seq.period_len
    magnus_bound = 2.0 * math.pi * (3.0 * beta / r * l_count) ** 3

    # log of the full product = r * log of one period (same eigenbasis).
    q_mat = r * log_period + beta * h_dense
    return TrotterDiagnostics(
        q_norm=spectral_norm(q_mat),
        q_bound=_q_bound(seq.n, beta, r),
        magnus_delta_norm=spectral_norm(delta),
        magnus_bound=magnus_bound,
        prop1_norms=prop1,
    )


def _q_bound(n: int, beta: float, r: int) -> float:
    return 2.0 * n * n * beta * beta / r + 2.0 * math.pi * 27.0 * beta**3 * n**6 / (r * r)


def to_json_dict(seq: GateSequence) -> dict:
    return {
        "n": seq.n,
        "r": seq.r,
        "period_len": seq.period_len,
        "skipped": seq.skipped,
        "gates": [
            {"kind": g.kind, "qubits": list(g.qubits), "t": g.t} for g in seq.gates
        ],
    }


def from_json_dict(data: dict) -> GateSequence:
    gates = tuple(
        Gate(g["kind"], tuple(g["qubits"]), float(g["t"])) for g in data["gates"]
    )
    return GateSequence(
        gates=gates,
        n=int(data["n"]),
        r=int(data["r"]),
        period_len=int(data["period_len"]),
        skipped=int(data["skipped"]),
    )


def save(seq: GateSequence, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(seq), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path) -> GateSequence:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
