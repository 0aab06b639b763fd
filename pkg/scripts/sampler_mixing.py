#!/usr/bin/env python3
"""Empirical total-variation distance of the matchings chain versus the
number of steps, against the exact stationary distribution.

Prints one CSV row per (graph, steps).  The distance should decay to the
sampling-noise floor well before the practical step budget.
"""

import argparse

from ferroz.matchgraph import VertexLabel, WeightedMultigraph
from ferroz.sampler import default_steps, sample_matchings, stationary_exact
from ferroz.trotter import Gate
from ferroz.matchgraph import gadget_for


def graph_from_edges(n_vertices, edges):
    g = WeightedMultigraph()
    for _ in range(n_vertices):
        g.add_vertex(VertexLabel(-1, "internal"))
    for (u, v, w) in edges:
        g.add_edge(u, v, w)
    return g


def graphs():
    yield "single-edge-w3", graph_from_edges(2, [(0, 1, 3.0)])
    yield "path-4", graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    yield "cycle-4+parallel", graph_from_edges(
        4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 1, 0.7)]
    )
    yield "h-gadget", gadget_for(Gate("h", (1, 2), 0.5)).graph


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=50000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("graph,steps,practical_budget,tv_distance")
    for name, g in graphs():
        budget = default_steps(g, 0.2, "practical")
        table = stationary_exact(g)
        steps = 4
        while steps <= 2 * budget:
            samples = sample_matchings(g, steps, args.samples, args.seed)
            counts = {}
            for s in samples:
                counts[s] = counts.get(s, 0) + 1
            tv = 0.5 * sum(
                abs(counts.get(s, 0) / args.samples - p) for s, p in table.items()
            )
            tv += 0.5 * sum(
                c / args.samples for s, c in counts.items() if s not in table
            )
            print(f"{name},{steps},{budget},{tv:.4f}")
            steps *= 4


if __name__ == "__main__":
    main()
