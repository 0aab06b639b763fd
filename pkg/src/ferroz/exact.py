"""Brute-force oracles over matchings of a weighted multigraph.

Z_k(gamma) sums the weight products of all k-edge matchings; the ladder
z = (Z_0, ..., Z_N) gives PerfMatch = z[N] and NearPerfMatch = z[N-1] for
|V| = 2N.  Values come from a recursion on the lowest-indexed present
vertex, memoized on the vertex-subset bitmask, so circuit-shaped graphs
with a few dozen vertices stay cheap.  An independent edge-backtracking
enumerator is kept for oracle-vs-oracle tests and for exact stationary
distributions on tiny graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

VERTEX_CAP_DEFAULT = 30


class TooLarge(ValueError):
    def __init__(self, size: int, cap: int, what: str = "vertices"):
        super().__init__(f"{size} {what} exceeds cap {cap}")


class OddVertexCount(ValueError):
    pass


@dataclass(frozen=True)
class MatchingLadder:
    """z[k] = Z_k(gamma); total = Z(gamma) = sum_k z[k]."""

    z: tuple[float, ...]
    total: float
    n_vertices: int

    @property
    def log_z(self) -> tuple[float, ...]:
        return tuple(math.log(v) if v > 0.0 else -math.inf for v in self.z)

    def to_json_dict(self) -> dict:
        return {"z": list(self.z), "total": self.total, "n_vertices": self.n_vertices}


def _adjacency(gamma) -> list[list[tuple[int, float, int]]]:
    adj: list[list[tuple[int, float, int]]] = [[] for _ in range(gamma.num_vertices)]
    for eid, e in enumerate(gamma.edges):
        adj[e.u].append((e.v, e.weight, eid))
        adj[e.v].append((e.u, e.weight, eid))
    return adj


class _SubsetEngine:
    """Shared-memo matching sums over induced vertex subsets of one graph."""

    def __init__(self, gamma):
        self.nv = gamma.num_vertices
        self.adj = _adjacency(gamma)
        self.full_mask = (1 << self.nv) - 1
        self._pm_memo: dict[int, float] = {0: 1.0}
        self._ladder_memo: dict[int, tuple[float, ...]] = {0: (1.0,)}

    def perfmatch(self, mask: int) -> float:
        memo = self._pm_memo
        cached = memo.get(mask)
        if cached is not None:
            return cached
        # The lowest present vertex must be matched by some incident edge.
        v = (mask & -mask).bit_length() - 1
        total = 0.0
        rest = mask & ~(1 << v)
        for (u, w, _eid) in self.adj[v]:
            if rest >> u & 1:
                total += w * self.perfmatch(rest & ~(1 << u))
        memo[mask] = total
        return total

    def ladder(self, mask: int) -> tuple[float, ...]:
        memo = self._ladder_memo
        cached = memo.get(mask)
        if cached is not None:
            return cached
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        acc = list(self.ladder(rest))  # v unmatched
        size = bin(mask).count("1")
        top = size // 2
        while len(acc) <= top:
            acc.append(0.0)
        for (u, w, _eid) in self.adj[v]:
            if rest >> u & 1:
                sub = self.ladder(rest & ~(1 << u))
                for k, val in enumerate(sub):
                    acc[k + 1] += w * val
        out = tuple(acc)
        memo[mask] = out
        return out

    def mask_excluding(self, removed=()) -> int:
        mask = self.full_mask
        for v in removed:
            if not 0 <= v < self.nv:
                raise ValueError(f"vertex {v} out of range")
            mask &= ~(1 << v)
        return mask


def matching_ladder(gamma, max_vertices: int = VERTEX_CAP_DEFAULT) -> MatchingLadder:
    """Exact ladder (Z_0, ..., Z_N) for the whole graph."""
    nv = gamma.num_vertices
    if nv > max_vertices:
        raise TooLarge(nv, max_vertices)
    eng = _SubsetEngine(gamma)
    z = eng.ladder(eng.full_mask)
    return MatchingLadder(z=z, total=float(sum(z)), n_vertices=nv)


def perfmatch_exact(
    gamma, max_vertices: int = VERTEX_CAP_DEFAULT, removed=()
) -> float:
    """Perfect matching sum; `removed` drops vertices before matching."""
    nv = gamma.num_vertices
    if nv > max_vertices:
        raise TooLarge(nv, max_vertices)
    if (nv - len(set(removed))) % 2 != 0:
        raise OddVertexCount(f"{nv - len(set(removed))} vertices cannot be perfectly matched")
    eng = _SubsetEngine(gamma)
    return eng.perfmatch(eng.mask_excluding(removed))


def nearperfmatch_exact(gamma, max_vertices: int = VERTEX_CAP_DEFAULT) -> float:
    nv = gamma.num_vertices
    if nv % 2 != 0:
        raise OddVertexCount(f"|V| = {nv} is odd")
    ladder = matching_ladder(gamma, max_vertices)
    return ladder.z[nv // 2 - 1] if nv >= 2 else 0.0


def omega_exact(gamma, u: int, v: int, max_vertices: int = VERTEX_CAP_DEFAULT) -> float:
    """Weight sum of near-perfect matchings leaving exactly u and v unmatched.

    Equals the perfect matching sum of the graph with u, v removed, and also
    PerfMatch of the graph with dangling edges attached at u and v.
    """
    if u == v:
        raise ValueError("u and v must be distinct")
    return perfmatch_exact(gamma, max_vertices, removed=(u, v))


def omega_table(gamma, max_vertices: int = VERTEX_CAP_DEFAULT) -> dict[tuple[int, int], float]:
    """Omega_{u,v} for every unordered pair, sharing one memo across queries."""
    nv = gamma.num_vertices
    if nv > max_vertices:
        raise TooLarge(nv, max_vertices)
    if nv % 2 != 0:
        raise OddVertexCount(f"|V| = {nv} is odd")
    eng = _SubsetEngine(gamma)
    out: dict[tuple[int, int], float] = {}
    for u in range(nv):
        for v in range(u + 1, nv):
            out[(u, v)] = eng.perfmatch(eng.mask_excluding((u, v)))
    return out


def check_log_concavity(
    gamma, max_vertices: int = VERTEX_CAP_DEFAULT, rel_tol: float = 1e-9
) -> tuple[bool, int | None]:
    """Check Z_k^2 >= Z_{k-1} Z_{k+1}; returns (ok, first violating k)."""
    z = matching_ladder(gamma, max_vertices).z
    for k in range(1, len(z) - 1):
        lhs = z[k] * z[k]
        rhs = z[k - 1] * z[k + 1]
        if lhs < rhs * (1.0 - rel_tol) - 1e-300:
            return False, k
    return True, None


def enumerate_matchings(gamma) -> Iterator[tuple[frozenset[int], float]]:
    """Yield every matching as (edge-id set, weight product), empty included.

    Independent of the ladder recursion: plain backtracking over edges in
    increasing id order.
    """
    edges = list(gamma.edges)
    ne = len(edges)

    def rec(start: int, used: int, chosen: tuple[int, ...], weight: float):
        yield frozenset(chosen), weight
        for eid in range(start, ne):
            e = edges[eid]
            if used >> e.u & 1 or used >> e.v & 1:
                continue
            yield from rec(
                eid + 1,
                used | (1 << e.u) | (1 << e.v),
                chosen + (eid,),
                weight * e.weight,
            )

    yield from rec(0, 0, (), 1.0)


def count_matchings(gamma, cap: int = 10**4) -> int:
    """Number of matchings, aborting with TooLarge past `cap`."""
    count = 0
    for _ in enumerate_matchings(gamma):
        count += 1
        if count > cap:
            raise TooLarge(count, cap, what="matchings")
    return count
