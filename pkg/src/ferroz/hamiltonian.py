"""Ferromagnetic XY-type spin Hamiltonians and dense thermal oracles.

The model family is

    H = sum_{i<j} (-b_ij X_i X_j + c_ij Y_i Y_j) + sum_i d_i (I + Z_i)

with |c_ij| <= b_ij (ferromagnetic condition), b_ij in [0,1] and
|c_ij|, |d_i| <= 1.  Everything here is a small-system oracle: matrices are
dense, real symmetric, and capped at n <= 10 qubits by default.

Basis convention: qubit i occupies bit i-1, so a computational basis state
has index sum_i x_i 2^(i-1), and |0> is the +1 eigenvector of Z.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

DENSE_CAP_DEFAULT = 10

_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
# Y x Y is real in the computational basis even though Y itself is not.
_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])).real
_XX = np.kron(_X, _X)


class HamiltonianError(ValueError):
    """Invalid Hamiltonian data."""


class NotFerromagnetic(HamiltonianError):
    def __init__(self, i: int, j: int, b: float, c: float):
        self.pair = (i, j)
        super().__init__(
            f"pair ({i},{j}): |c_ij| = {abs(c):.6g} exceeds b_ij = {b:.6g}"
        )


class OutOfRange(HamiltonianError):
    def __init__(self, what: str, value: float, lo: float, hi: float):
        self.what = what
        self.value = value
        super().__init__(f"{what} = {value:.6g} outside [{lo:g}, {hi:g}]")


class DimensionTooLarge(HamiltonianError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"n = {n} exceeds dense cap {cap}")


class EigensolveFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class FerroHamiltonian:
    """Validated coefficients of the spin model.

    b and c are keyed by ordered pairs (i, j) with 1 <= i < j <= n; absent
    pairs mean b = c = 0.  d has one entry per qubit.
    """

    n: int
    b: dict[tuple[int, int], float]
    c: dict[tuple[int, int], float]
    d: tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise OutOfRange("n", self.n, 1, math.inf)
        if len(self.d) != self.n:
            raise HamiltonianError(f"d has {len(self.d)} entries, expected {self.n}")
        for (i, j) in self.b:
            if not (1 <= i < j <= self.n):
                raise HamiltonianError(f"bad pair ({i},{j}) for n = {self.n}")
        if set(self.b) != set(self.c):
            raise HamiltonianError("b and c must be keyed by the same pairs")
        for (i, j), bij in sorted(self.b.items()):
            cij = self.c[(i, j)]
            if not 0.0 <= bij <= 1.0:
                raise OutOfRange(f"b[{i},{j}]", bij, 0.0, 1.0)
            if abs(cij) > 1.0:
                raise OutOfRange(f"c[{i},{j}]", cij, -1.0, 1.0)
            if abs(cij) > bij:
                raise NotFerromagnetic(i, j, bij, cij)
        for i, di in enumerate(self.d, start=1):
            if abs(di) > 1.0:
                raise OutOfRange(f"d[{i}]", di, -1.0, 1.0)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.b)


@dataclass(frozen=True)
class SplitCoefficients:
    """Nonnegative split p = (b - c)/2, q = (b + c)/2 of the pair couplings."""

    p: dict[tuple[int, int], float]
    q: dict[tuple[int, int], float]


def validate(n: int, pairs, d) -> FerroHamiltonian:
    """Build a FerroHamiltonian from raw coefficients.

    pairs is an iterable of (i, j, b, c) with 1-based qubit indices;
    raises NotFerromagnetic / OutOfRange naming the offending entry.
    """
    b: dict[tuple[int, int], float] = {}
    c: dict[tuple[int, int], float] = {}
    for (i, j, bij, cij) in pairs:
        if i == j:
            raise HamiltonianError(f"pair ({i},{j}) couples a qubit to itself")
        key = (i, j) if i < j else (j, i)
        if key in b:
            raise HamiltonianError(f"duplicate pair {key}")
        b[key] = float(bij)
        c[key] = float(cij)
    return FerroHamiltonian(n=n, b=b, c=c, d=tuple(float(x) for x in d))


def split_coefficients(ham: FerroHamiltonian) -> SplitCoefficients:
    p = {k: (ham.b[k] - ham.c[k]) / 2.0 for k in ham.b}
    q = {k: (ham.b[k] + ham.c[k]) / 2.0 for k in ham.b}
    return SplitCoefficients(p=p, q=q)


def embed_one(mat2: np.ndarray, i: int, n: int) -> np.ndarray:
    """Embed a 2x2 operator acting on qubit i into the 2^n space."""
    dim = 1 << n
    out = np.zeros((dim, dim))
    bi = i - 1
    cols = np.arange(dim)
    ci = cols >> bi & 1
    base = cols & ~(1 << bi)
    for ri in range(2):
        out[base | (ri << bi), cols] += mat2[ri, ci]
    return out


def embed_two(mat4: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Embed a 4x4 operator on qubits (i, j), i < j, qubit i in the low slot."""
    if not i < j:
        raise ValueError("embed_two expects i < j")
    dim = 1 << n
    out = np.zeros((dim, dim))
    bi, bj = i - 1, j - 1
    cols = np.arange(dim)
    ci = cols >> bi & 1
    cj = cols >> bj & 1
    base = cols & ~(1 << bi) & ~(1 << bj)
    for ri in range(2):
        for rj in range(2):
            rows = base | (ri << bi) | (rj << bj)
            out[rows, cols] += mat4[(rj << 1) | ri, (cj << 1) | ci]
    return out


def to_dense(ham: FerroHamiltonian, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Dense real-symmetric matrix of H under the fixed basis convention."""
    if ham.n > cap:
        raise DimensionTooLarge(ham.n, cap)
    dim = 1 << ham.n
    mat = np.zeros((dim, dim))
    for (i, j) in ham.pairs():
        term = -ham.b[(i, j)] * _XX + ham.c[(i, j)] * _YY
        mat += embed_two(term, i, j, ham.n)
    for i, di in enumerate(ham.d, start=1):
        if di != 0.0:
            mat += di * embed_one(np.eye(2) + _Z, i, ham.n)
    return mat


def _eigenvalues(ham: FerroHamiltonian, cap: int) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(to_dense(ham, cap))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolveFailure(str(exc)) from exc


def exact_partition(ham: FerroHamiltonian, beta: float, cap: int = DENSE_CAP_DEFAULT) -> float:
    """Tr exp(-beta H) by dense eigendecomposition."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return float(np.sum(np.exp(-beta * _eigenvalues(ham, cap))))


def exact_free_energy(ham: FerroHamiltonian, beta: float, cap: int = DENSE_CAP_DEFAULT) -> float:
    return -math.log(exact_partition(ham, beta, cap)) / beta


def exact_ground_energy(ham: FerroHamiltonian, cap: int = DENSE_CAP_DEFAULT) -> float:
    return float(_eigenvalues(ham, cap)[0])


def coefficient_bound(ham: FerroHamiltonian) -> float:
    """Simple eigenvalue bound sum(b + |c|) + 2 sum(|d|)."""
    pair_part = sum(ham.b[k] + abs(ham.c[k]) for k in ham.b)
    return pair_part + 2.0 * sum(abs(x) for x in ham.d)


def to_json_dict(ham: FerroHamiltonian) -> dict:
    return {
        "n": ham.n,
        "pairs": [
            {"i": i, "j": j, "b": ham.b[(i, j)], "c": ham.c[(i, j)]}
            for (i, j) in ham.pairs()
        ],
        "d": list(ham.d),
    }


def from_json_dict(data: dict) -> FerroHamiltonian:
    pairs = [(p["i"], p["j"], p.get("b", 0.0), p.get("c", 0.0)) for p in data.get("pairs", [])]
    return validate(int(data["n"]), pairs, data.get("d", [0.0] * int(data["n"])))


def load(path) -> FerroHamiltonian:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def save(ham: FerroHamiltonian, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(ham), fh, indent=2, sort_keys=True)
        fh.write("\n")
