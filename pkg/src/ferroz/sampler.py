"""Approximate sampler over all matchings of a weighted graph.

The chain state is a matching; the stationary law is W(M) / Z(gamma) with
W the product of member edge weights.  Chains always start at the empty
matching.  Batch entry points run many independent chains with per-sample
derived random streams, so a fixed seed gives the same multiset of samples
regardless of execution order or parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _chain, exact

MODES = ("theory", "practical")


@dataclass(frozen=True)
class MoveStats:
    """Accepted-move tallies over a batch of chains."""

    accepted: int = 0
    added: int = 0
    deleted: int = 0
    shifted: int = 0
    total_steps: int = 0

    def __add__(self, other: "MoveStats") -> "MoveStats":
        return MoveStats(
            self.accepted + other.accepted,
            self.added + other.added,
            self.deleted + other.deleted,
            self.shifted + other.shifted,
            self.total_steps + other.total_steps,
        )

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.total_steps if self.total_steps else 0.0

    def to_json_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "added": self.added,
            "deleted": self.deleted,
            "shifted": self.shifted,
            "total_steps": self.total_steps,
            "acceptance_rate": self.acceptance_rate,
        }


@dataclass(frozen=True)
class Matching:
    """A set of edge ids, no two sharing a vertex."""

    edges: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.edges)

    def covered(self, gamma) -> int:
        """Vertex-cover bitmap."""
        mask = 0
        for eid in self.edges:
            e = gamma.edges[eid]
            mask |= (1 << e.u) | (1 << e.v)
        return mask

    def is_valid(self, gamma) -> bool:
        seen = 0
        for eid in self.edges:
            e = gamma.edges[eid]
            bits = (1 << e.u) | (1 << e.v)
            if seen & bits:
                return False
            seen |= bits
        return True

    def weight(self, gamma, alpha: float = 1.0) -> float:
        out = 1.0
        for eid in self.edges:
            out *= gamma.edges[eid].weight * alpha
        return out


EMPTY_MATCHING = Matching(frozenset())


@dataclass(frozen=True)
class SamplerConfig:
    steps: int
    mode: str = "practical"
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


class ChainStream:
    """Deterministic splitmix64 stream shared by Python- and kernel-level steps."""

    def __init__(self, seed: int, *substream: int):
        state = _chain.as_seed(seed)
        if substream:
            a = substream[0] if len(substream) > 0 else 0
            b = substream[1] if len(substream) > 1 else 0
            c = substream[2] if len(substream) > 2 else 1
            state = _chain.call(
                _chain._derive,
                state,
                _chain.as_seed(a),
                _chain.as_seed(b),
                _chain.as_seed(c),
            )
        self.state = np.uint64(state)


def graph_arrays(gamma, alpha: float = 1.0):
    """(eu, ev, w) arrays for the kernels, weights scaled by alpha."""
    ne = gamma.num_edges
    eu = np.empty(ne, np.int32)
    ev = np.empty(ne, np.int32)
    w = np.empty(ne, np.float64)
    for i, e in enumerate(gamma.edges):
        eu[i] = e.u
        ev[i] = e.v
        w[i] = e.weight * alpha
    return eu, ev, w


def _match_edge_array(gamma, m: Matching) -> np.ndarray:
    arr = np.full(gamma.num_vertices, -1, np.int32)
    for eid in m.edges:
        e = gamma.edges[eid]
        arr[e.u] = eid
        arr[e.v] = eid
    return arr


def _matching_from_array(arr) -> Matching:
    return Matching(frozenset(int(x) for x in arr if x >= 0))


def chain_step(gamma, m: Matching, stream: ChainStream, alpha: float = 1.0) -> Matching:
    """One chain transition; always returns a valid matching."""
    eu, ev, w = graph_arrays(gamma, alpha)
    arr = _match_edge_array(gamma, m)
    state, _ = _chain.call(_chain.step, eu, ev, w, arr, stream.state)
    stream.state = np.uint64(state)  # kernels hand back plain ints
    return _matching_from_array(arr)


def sample(gamma, cfg: SamplerConfig, stream: ChainStream | None = None,
           alpha: float = 1.0) -> Matching:
    """Run cfg.steps transitions from the empty matching; return the end state."""
    if stream is None:
        stream = ChainStream(cfg.seed, 0, 0, 1)
    eu, ev, w = graph_arrays(gamma, alpha)
    arr = np.full(gamma.num_vertices, -1, np.int32)
    out = _chain.call(_chain.run_chain, eu, ev, w, arr, cfg.steps, stream.state)
    stream.state = np.uint64(out[0])
    return _matching_from_array(arr)


def sample_sizes(gamma, steps: int, n_samples: int, seed: int, level: int = 0,
                 alpha: float = 1.0) -> tuple[np.ndarray, MoveStats]:
    """Sizes of n_samples independent end states, plus move statistics."""
    eu, ev, w = graph_arrays(gamma, alpha)
    sizes, moves = _chain.call(
        _chain.batch_sizes, eu, ev, w, gamma.num_vertices, steps, n_samples,
        _chain.as_seed(seed), _chain.as_seed(level),
    )
    totals = moves.sum(axis=0)
    stats = MoveStats(
        accepted=int(totals[0]),
        added=int(totals[1]),
        deleted=int(totals[2]),
        shifted=int(totals[3]),
        total_steps=steps * n_samples,
    )
    return sizes, stats


def sample_matchings(gamma, steps: int, n_samples: int, seed: int, level: int = 0,
                     alpha: float = 1.0) -> list[frozenset[int]]:
    """Full end states for graphs with <= 64 edges."""
    if gamma.num_edges > 64:
        raise exact.TooLarge(gamma.num_edges, 64, what="edges")
    eu, ev, w = graph_arrays(gamma, alpha)
    masks = _chain.call(
        _chain.batch_masks, eu, ev, w, gamma.num_vertices, steps, n_samples,
        _chain.as_seed(seed), _chain.as_seed(level),
    )
    out = []
    for mask in masks:
        mask = int(mask)
        out.append(frozenset(i for i in range(gamma.num_edges) if mask >> i & 1))
    return out


def default_steps(gamma, delta: float, mode: str = "practical",
                  c_theory: float = 1.0, c_practical: float = 50.0) -> int:
    """Step budget per sample.

    Theory mode prices the chain at its worst-case analysis,
    c * (|E|^3 |V| wmax^4 max(1, log(wmax/wmin)) + |E|^2 wmax^4 log(1/delta));
    practical mode uses c * |E| |V| log(1/delta), plenty for desk-scale graphs.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    ws = gamma.weights()
    w_max = max([1.0] + ws)
    w_min = min([1.0] + ws)
    ne = gamma.num_edges
    nv = gamma.num_vertices
    if mode == "theory":
        budget = c_theory * (
            ne**3 * nv * w_max**4 * max(1.0, math.log(w_max / w_min))
            + ne**2 * w_max**4 * math.log(1.0 / delta)
        )
    elif mode == "practical":
        budget = c_practical * ne * nv * math.log(1.0 / delta)
    else:
        raise ValueError(f"mode must be one of {MODES}")
    return max(1, math.ceil(budget))


def stationary_exact(gamma, alpha: float = 1.0, cap: int = 10**4) -> dict[frozenset[int], float]:
    """Exact stationary table {matching: W(M) alpha^|M| / Z} by enumeration."""
    table: dict[frozenset[int], float] = {}
    for edges, weight in exact.enumerate_matchings(gamma):
        table[edges] = weight * alpha ** len(edges)
        if len(table) > cap:
            raise exact.TooLarge(len(table), cap, what="matchings")
    total = sum(table.values())
    return {k: v / total for k, v in table.items()}


def transition_matrix(gamma, alpha: float = 1.0, cap: int = 10**4):
    """(states, P) where P[i, j] is the exact one-step transition probability.

    Built from the same proposal function the kernels use; the 1/2 laziness
    appears as a floor on every diagonal entry.
    """
    states = sorted(
        (m for m, _ in exact.enumerate_matchings(gamma)),
        key=lambda s: (len(s), sorted(s)),
    )
    if len(states) > cap:
        raise exact.TooLarge(len(states), cap, what="matchings")
    index = {s: i for i, s in enumerate(states)}
    eu, ev, w = graph_arrays(gamma, alpha)
    ne = gamma.num_edges
    P = np.zeros((len(states), len(states)))
    for s, i in index.items():
        P[i, i] += 0.5  # lazy hold
        arr = _match_edge_array(gamma, Matching(s))
        for e in range(ne):
            kind, ratio, displaced = _chain.call(_chain.proposal, eu, ev, w, arr, e)
            if kind == 0:
                P[i, i] += 0.5 / ne
                continue
            if kind == 1:
                target = s - {e}
            elif kind == 2:
                target = s | {e}
            else:
                target = (s - {int(displaced)}) | {e}
            accept = min(1.0, ratio)
            P[i, index[frozenset(target)]] += 0.5 / ne * accept
            P[i, i] += 0.5 / ne * (1.0 - accept)
    return states, P
