"""Gate gadgets and the circuit-to-graph compiler.

Every elementary gate has a small weighted gadget whose induced-subgraph
perfect-matching sums reproduce its matrix elements: remove the distinguished
vertices whose bit is 1 in <y_m..y_1|G|x_m..x_1> and sum matchings of the
rest.  Chaining gadget outputs to inputs along each qubit line, plus one wrap
edge per line, yields a graph whose perfect matching sum equals the trace of
the gate product.

Gadget layouts (all unlabeled weights are 1):

    f(t):  in --t-- out

    g(t):  in1 --(1)-- out1        rails, plus weight-t edges joining
           in2 --(1)-- out2        in1-in2 and out1-out2

    h(t):  the g gadget with the rail-1 endpoints pushed out through two
           extra weight-1 pendant edges (the pendants carry the labels)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import exact
from .trotter import Gate, GateSequence

ROLES = ("in", "out", "internal", "dangling")
EDGE_TAGS = ("internal", "external", "dangling")


class GraphError(ValueError):
    pass


class UnknownVertex(GraphError):
    pass


class EmptyCircuit(GraphError):
    pass


@dataclass(frozen=True)
class VertexLabel:
    gate_index: int
    role: str
    qubit: int | None = None
    slot: int | None = None

    def short(self) -> str:
        q = f"q{self.qubit}" if self.qubit is not None else ""
        return f"g{self.gate_index}/{self.role}{q}"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    weight: float
    tag: str = "internal"


class WeightedMultigraph:
    """Vertex-labeled multigraph with positive edge weights, no self-loops."""

    def __init__(self):
        self.vertices: list[VertexLabel] = []
        self.edges: list[Edge] = []

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def add_vertex(self, label: VertexLabel) -> int:
        self.vertices.append(label)
        return len(self.vertices) - 1

    def add_edge(self, u: int, v: int, weight: float, tag: str = "internal") -> int:
        if u == v:
            raise GraphError("self-loops are not allowed")
        for x in (u, v):
            if not 0 <= x < len(self.vertices):
                raise UnknownVertex(f"vertex {x} does not exist")
        if weight <= 0.0:
            raise GraphError(f"edge weight {weight} must be positive")
        if tag not in EDGE_TAGS:
            raise GraphError(f"unknown edge tag {tag!r}")
        self.edges.append(Edge(u, v, float(weight), tag))
        return len(self.edges) - 1

    def weight_sum(self) -> float:
        return sum(e.weight for e in self.edges)

    def weights(self) -> list[float]:
        return [e.weight for e in self.edges]

    def copy(self) -> "WeightedMultigraph":
        out = WeightedMultigraph()
        out.vertices = list(self.vertices)
        out.edges = list(self.edges)
        return out

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in (e.u, e.v))

    def to_json_dict(self) -> dict:
        return {
            "vertices": [
                {
                    "id": i,
                    "label": {
                        "gate_index": lab.gate_index,
                        "role": lab.role,
                        "qubit": lab.qubit,
                        "slot": lab.slot,
                    },
                }
                for i, lab in enumerate(self.vertices)
            ],
            "edges": [
                {"u": e.u, "v": e.v, "w": e.weight, "tag": e.tag} for e in self.edges
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightedMultigraph":
        out = cls()
        for rec in sorted(data["vertices"], key=lambda r: r["id"]):
            lab = rec.get("label", {})
            out.add_vertex(
                VertexLabel(
                    gate_index=lab.get("gate_index", -1),
                    role=lab.get("role", "internal"),
                    qubit=lab.get("qubit"),
                    slot=lab.get("slot"),
                )
            )
        for rec in data["edges"]:
            out.add_edge(rec["u"], rec["v"], rec["w"], rec.get("tag", "internal"))
        return out

    def to_dot(self) -> str:
        lines = ["graph gamma {"]
        for i, lab in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{i}:{lab.short()}"];')
        for e in self.edges:
            style = ' style=dashed' if e.tag != "internal" else ""
            lines.append(f'  v{e.u} -- v{e.v} [label="{e.weight:g}"{style}];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Gadget:
    graph: WeightedMultigraph
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.inputs)


def gadget_for(gate: Gate, gate_index: int = 0) -> Gadget:
    """Gadget implementing the gate; inputs/outputs ordered by slot."""
    g = WeightedMultigraph()
    t = gate.t
    if gate.kind == "f":
        (q,) = gate.qubits
        a = g.add_vertex(VertexLabel(gate_index, "in", q, 1))
        b = g.add_vertex(VertexLabel(gate_index, "out", q, 1))
        g.add_edge(a, b, t)
        return Gadget(g, (a,), (b,))
    qi, qj = gate.qubits
    if gate.kind == "g":
        in1 = g.add_vertex(VertexLabel(gate_index, "in", qi, 1))
        in2 = g.add_vertex(VertexLabel(gate_index, "in", qj, 2))
        out2 = g.add_vertex(VertexLabel(gate_index, "out", qj, 2))
        out1 = g.add_vertex(VertexLabel(gate_index, "out", qi, 1))
        g.add_edge(in1, in2, t)
        g.add_edge(in2, out2, 1.0)
        g.add_edge(out2, out1, t)
        g.add_edge(in1, out1, 1.0)
        return Gadget(g, (in1, in2), (out1, out2))
    # h: the g gadget with rail-1 labels pushed onto pendant vertices
    pin = g.add_vertex(VertexLabel(gate_index, "in", qi, 1))
    a = g.add_vertex(VertexLabel(gate_index, "internal", qi, 1))
    in2 = g.add_vertex(VertexLabel(gate_index, "in", qj, 2))
    out2 = g.add_vertex(VertexLabel(gate_index, "out", qj, 2))
    b = g.add_vertex(VertexLabel(gate_index, "internal", qi, 1))
    pout = g.add_vertex(VertexLabel(gate_index, "out", qi, 1))
    g.add_edge(pin, a, 1.0)
    g.add_edge(a, in2, t)
    g.add_edge(in2, out2, 1.0)
    g.add_edge(out2, b, t)
    g.add_edge(a, b, 1.0)
    g.add_edge(b, pout, 1.0)
    return Gadget(g, (pin, in2), (pout, out2))


def implemented_gate(gd: Gadget) -> np.ndarray:
    """Matrix whose entry <y|G|x> is PerfMatch of the induced subgraph.

    Bit k of x selects input slot k+1, bit k of y output slot k+1; vertices
    with bit 1 are removed.  Odd induced subgraphs contribute 0; the empty
    graph contributes 1.
    """
    m = gd.arity
    dim = 1 << m
    out = np.zeros((dim, dim))
    total = gd.graph.num_vertices
    for col in range(dim):
        for row in range(dim):
            removed = [gd.inputs[k] for k in range(m) if col >> k & 1]
            removed += [gd.outputs[k] for k in range(m) if row >> k & 1]
            if (total - len(removed)) % 2 != 0:
                continue
            out[row, col] = exact.perfmatch_exact(
                gd.graph, max_vertices=64, removed=removed
            )
    return out


def compile_circuit(seq: GateSequence) -> WeightedMultigraph:
    """Disjoint gadgets wired along qubit lines; PerfMatch equals the trace.

    Qubits acted on by no gate are omitted entirely; callers account for the
    factor 2 each such qubit contributes to the trace.  Raises EmptyCircuit
    for a sequence with no gates (trace 2^n by convention).
    """
    if len(seq.gates) == 0:
        raise EmptyCircuit("no gates; trace is 2^n by convention")
    graph = WeightedMultigraph()
    lines: dict[int, list[tuple[int, int]]] = {}
    for idx, gate in enumerate(seq.gates):
        gd = gadget_for(gate, gate_index=idx)
        offset = graph.num_vertices
        for lab in gd.graph.vertices:
            graph.add_vertex(lab)
        for e in gd.graph.edges:
            graph.add_edge(e.u + offset, e.v + offset, e.weight, "internal")
        for slot, qubit in enumerate(gate.qubits):
            lines.setdefault(qubit, []).append(
                (gd.inputs[slot] + offset, gd.outputs[slot] + offset)
            )
    for qubit in sorted(lines):
        chain = lines[qubit]
        for k in range(len(chain) - 1):
            graph.add_edge(chain[k][1], chain[k + 1][0], 1.0, "external")
        graph.add_edge(chain[-1][1], chain[0][0], 1.0, "external")
    return graph


def active_qubits(seq: GateSequence) -> set[int]:
    return {q for gate in seq.gates for q in gate.qubits}


def add_dangling(gamma: WeightedMultigraph, u: int, v: int) -> WeightedMultigraph:
    """Attach weight-1 pendant edges at u and v (two new vertices).

    Perfect matchings of the result are exactly the near-perfect matchings of
    gamma leaving u and v unmatched, so PerfMatch(result) = Omega_{u,v}(gamma).
    """
    if u == v:
        raise GraphError("u and v must be distinct")
    for x in (u, v):
        if not 0 <= x < gamma.num_vertices:
            raise UnknownVertex(f"vertex {x} does not exist")
    out = gamma.copy()
    u0 = out.add_vertex(VertexLabel(-1, "dangling", None, None))
    out.add_edge(u, u0, 1.0, "dangling")
    v0 = out.add_vertex(VertexLabel(-1, "dangling", None, None))
    out.add_edge(v, v0, 1.0, "dangling")
    return out


def add_dangling_at(gd: Gadget, vertices) -> Gadget:
    """Gadget variant with dangling edges at the given vertices."""
    graph = gd.graph.copy()
    for v in vertices:
        pend = graph.add_vertex(VertexLabel(-1, "dangling", None, None))
        graph.add_edge(v, pend, 1.0, "dangling")
    return Gadget(graph, gd.inputs, gd.outputs)


@dataclass(frozen=True)
class GraphStats:
    num_vertices: int
    num_edges: int
    w_max: float
    w_min: float


def graph_stats(gamma: WeightedMultigraph) -> GraphStats:
    """Counts plus the conventions w_max >= 1 >= w_min."""
    ws = gamma.weights()
    w_max = max([1.0] + ws)
    w_min = min([1.0] + ws)
    return GraphStats(gamma.num_vertices, gamma.num_edges, w_max, w_min)


def save(gamma: WeightedMultigraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(gamma.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path) -> WeightedMultigraph:
    with open(path) as fh:
        return WeightedMultigraph.from_json_dict(json.load(fh))
