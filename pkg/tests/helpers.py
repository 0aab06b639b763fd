"""Small builders shared across test modules."""

from __future__ import annotations

import numpy as np

from ferroz.matchgraph import VertexLabel, WeightedMultigraph
from ferroz.trotter import Gate, GateSequence


def graph_from_edges(n_vertices: int, edges) -> WeightedMultigraph:
    """Bare multigraph from (u, v, weight) triples."""
    g = WeightedMultigraph()
    for i in range(n_vertices):
        g.add_vertex(VertexLabel(gate_index=-1, role="internal", qubit=None, slot=None))
    for (u, v, w) in edges:
        g.add_edge(u, v, w)
    return g


def manual_sequence(n: int, gates) -> GateSequence:
    """Ad-hoc sequence from (kind, qubits, t) triples, application order."""
    gs = tuple(Gate(kind, tuple(qubits), t) for (kind, qubits, t) in gates)
    return GateSequence(gates=gs, n=n, r=1, period_len=len(gs), skipped=0)


def random_circuit(rng: np.random.Generator, n: int, n_gates: int) -> GateSequence:
    """Random gate list with parameters uniform in (0, 1)."""
    gates = []
    kinds = ["f"] if n == 1 else ["f", "g", "h"]
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        t = float(rng.uniform(0.05, 0.95))
        if kind == "f":
            gates.append(("f", (int(rng.integers(1, n + 1)),), t))
        else:
            i, j = sorted(rng.choice(np.arange(1, n + 1), size=2, replace=False))
            gates.append((kind, (int(i), int(j)), t))
    return manual_sequence(n, gates)


def random_ferro(rng: np.random.Generator, n: int):
    """Random valid Hamiltonian with every coefficient type present."""
    from ferroz.hamiltonian import validate

    pairs = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            b = float(rng.uniform(0.1, 1.0))
            c = float(rng.uniform(-b, b))
            pairs.append((i, j, b, c))
    d = [float(rng.uniform(-1.0, 1.0)) for _ in range(n)]
    return validate(n, pairs, d)
