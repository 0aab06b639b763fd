"""Matchings Markov chain kernel.

One lazy Metropolis step: with probability 1/2 hold; otherwise pick an edge
e = (u, v) uniformly; delete it if present, add it if both endpoints are
free, slide it in place of the single edge blocking it if exactly one
endpoint is matched; accept with min(1, W(M')/W(M)).  The laziness keeps the
chain aperiodic even on graphs where every proposal is accepted.

All randomness is a splitmix64 stream, so results are bit-identical whether
the kernels run under numba or as plain Python, and per-sample streams are
derived from (seed, level, sample index) independent of execution order.

`step` is the reference single-transition implementation; `run_chain` is the
same transition hand-inlined into one loop (the factored form costs ~3x in
numba).  The sampler test suite replays `step` against `run_chain` on a
shared stream to pin their equivalence.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco

    prange = range

U64 = np.uint64
_MASK64 = (1 << 64) - 1
_GOLD = U64(0x9E3779B97F4A7C15)
_MULT1 = U64(0xBF58476D1CE4E5B9)
_MULT2 = U64(0x94D049BB133111EB)
_K1 = U64(0xD1342543DE82EF95)
_K2 = U64(0xAF251AF3B0F025B5)
_K3 = U64(0x9E6C63D0876A9A43)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_INV53 = 1.1102230246251565e-16  # 2^-53


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> _S30)) * _MULT1
    z = (z ^ (z >> _S27)) * _MULT2
    return z ^ (z >> _S31)


@njit(cache=True)
def _u01(state):
    """Advance the stream; return (state, uniform in [0, 1))."""
    state = state + _GOLD
    return state, np.float64(_mix(state) >> _S11) * _INV53


@njit(cache=True)
def _derive(seed, a, b, c):
    s = _mix(seed ^ _GOLD)
    s = _mix(s + _GOLD + a * _K1)
    s = _mix(s + _GOLD + b * _K2)
    s = _mix(s + _GOLD + c * _K3)
    return s


@njit(cache=True)
def proposal(eu, ev, w, match_edge, e):
    """Move proposed by picking edge e from the current matching state.

    Returns (kind, ratio, displaced): kind 0 = no move, 1 = delete e,
    2 = add e, 3 = add e displacing edge `displaced`; ratio = W(M')/W(M).
    """
    a = eu[e]
    b = ev[e]
    ma = match_edge[a]
    mb = match_edge[b]
    if ma == e:
        return 1, 1.0 / w[e], -1
    if ma < 0 and mb < 0:
        return 2, w[e], -1
    if ma >= 0 and mb < 0:
        return 3, w[e] / w[ma], ma
    if mb >= 0 and ma < 0:
        return 3, w[e] / w[mb], mb
    return 0, 1.0, -1


@njit(cache=True)
def apply_move(match_edge, eu, ev, e, kind, displaced):
    a = eu[e]
    b = ev[e]
    if kind == 1:
        match_edge[a] = -1
        match_edge[b] = -1
    elif kind == 2:
        match_edge[a] = e
        match_edge[b] = e
    elif kind == 3:
        match_edge[eu[displaced]] = -1
        match_edge[ev[displaced]] = -1
        match_edge[a] = e
        match_edge[b] = e


@njit(cache=True)
def step(eu, ev, w, match_edge, state):
    """One lazy Metropolis step in place; returns (state, accepted)."""
    ne = len(eu)
    state, u = _u01(state)
    if u < 0.5:
        return state, False
    state, ue = _u01(state)
    e = int(ue * ne)
    if e >= ne:
        e = ne - 1
    kind, ratio, displaced = proposal(eu, ev, w, match_edge, e)
    if kind == 0:
        return state, False
    if ratio < 1.0:
        state, ua = _u01(state)
        if ua >= ratio:
            return state, False
    apply_move(match_edge, eu, ev, e, kind, displaced)
    return state, True


@njit(cache=True)
def run_chain(eu, ev, w, match_edge, steps, state):
    """`steps` transitions in place.

    Returns (state, accepted, added, deleted, shifted).  Must consume the
    stream exactly as `step` does: one draw for laziness, one for the edge,
    one more only when the ratio is below 1.
    """
    ne = len(eu)
    accepts = 0
    adds = 0
    dels = 0
    shifts = 0
    for _ in range(steps):
        state = state + _GOLD
        z = (state ^ (state >> _S30)) * _MULT1
        z = (z ^ (z >> _S27)) * _MULT2
        z = z ^ (z >> _S31)
        if np.float64(z >> _S11) * _INV53 < 0.5:
            continue
        state = state + _GOLD
        z = (state ^ (state >> _S30)) * _MULT1
        z = (z ^ (z >> _S27)) * _MULT2
        z = z ^ (z >> _S31)
        e = int(np.float64(z >> _S11) * _INV53 * ne)
        if e >= ne:
            e = ne - 1
        a = eu[e]
        b = ev[e]
        ma = match_edge[a]
        mb = match_edge[b]
        if ma == e:
            kind = 1
            ratio = 1.0 / w[e]
            displaced = -1
        elif ma < 0 and mb < 0:
            kind = 2
            ratio = w[e]
            displaced = -1
        elif ma >= 0 and mb < 0:
            kind = 3
            ratio = w[e] / w[ma]
            displaced = ma
        elif mb >= 0 and ma < 0:
            kind = 3
            ratio = w[e] / w[mb]
            displaced = mb
        else:
            continue
        if ratio < 1.0:
            state = state + _GOLD
            z = (state ^ (state >> _S30)) * _MULT1
            z = (z ^ (z >> _S27)) * _MULT2
            z = z ^ (z >> _S31)
            if np.float64(z >> _S11) * _INV53 >= ratio:
                continue
        accepts += 1
        if kind == 1:
            dels += 1
            match_edge[a] = -1
            match_edge[b] = -1
        elif kind == 2:
            adds += 1
            match_edge[a] = e
            match_edge[b] = e
        else:
            shifts += 1
            match_edge[eu[displaced]] = -1
            match_edge[ev[displaced]] = -1
            match_edge[a] = e
            match_edge[b] = e
    return state, accepts, adds, dels, shifts


@njit(cache=True, parallel=True)
def batch_sizes(eu, ev, w, nv, steps, n_samples, seed, level):
    """Final matching sizes of n_samples independent chains from empty.

    Also returns per-sample move statistics (accepted, add, delete, shift)."""
    sizes = np.empty(n_samples, np.int64)
    moves = np.empty((n_samples, 4), np.int64)
    for i in prange(n_samples):
        match_edge = np.full(nv, -1, np.int32)
        stream = _derive(seed, level, U64(i), U64(1))
        _, acc, adds, dels, shifts = run_chain(eu, ev, w, match_edge, steps, stream)
        covered = 0
        for v in range(nv):
            if match_edge[v] >= 0:
                covered += 1
        sizes[i] = covered // 2
        moves[i, 0] = acc
        moves[i, 1] = adds
        moves[i, 2] = dels
        moves[i, 3] = shifts
    return sizes, moves


@njit(cache=True, parallel=True)
def batch_masks(eu, ev, w, nv, steps, n_samples, seed, level):
    """Final matchings as edge-id bitmasks (graphs with <= 64 edges)."""
    masks = np.empty(n_samples, np.uint64)
    for i in prange(n_samples):
        match_edge = np.full(nv, -1, np.int32)
        stream = _derive(seed, level, U64(i), U64(1))
        run_chain(eu, ev, w, match_edge, steps, stream)
        mask = U64(0)
        for v in range(nv):
            if match_edge[v] >= 0:
                mask |= U64(1) << U64(match_edge[v])
        masks[i] = mask
    return masks


def call(fn, *args):
    """Invoke a kernel, silencing expected uint64 wraparound warnings when
    running the pure-Python fallback."""
    if HAVE_NUMBA:
        return fn(*args)
    with np.errstate(over="ignore"):
        return fn(*args)


def as_seed(x: int) -> np.uint64:
    return U64(x & _MASK64)
