#!/usr/bin/env python3
"""Relative error of the telescoping estimator versus samples per level.

Runs repeated independent trials on graphs with known perfect matching sums
and prints the empirical error quantiles per (graph, T).
"""

import argparse
import itertools

import numpy as np

from ferroz.estimator import EstimatorConfig, algorithm_b
from ferroz.exact import perfmatch_exact
from ferroz.hamiltonian import validate
from ferroz.matchgraph import VertexLabel, WeightedMultigraph, compile_circuit
from ferroz.trotter import build_sequence


def graph_from_edges(n_vertices, edges):
    g = WeightedMultigraph()
    for _ in range(n_vertices):
        g.add_vertex(VertexLabel(-1, "internal"))
    for (u, v, w) in edges:
        g.add_edge(u, v, w)
    return g


def graphs():
    yield "cycle-4", graph_from_edges(
        4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]
    )
    yield "k6", graph_from_edges(
        6, [(u, v, 1.0) for u, v in itertools.combinations(range(6), 2)]
    )
    xy = validate(2, [(1, 2, 1.0, -1.0)], [0.0, 0.0])
    yield "compiled-xy", compile_circuit(build_sequence(xy, 0.5, r=1))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("graph,samples_per_level,median_rel_error,p90_rel_error,aborted")
    for name, g in graphs():
        truth = perfmatch_exact(g, max_vertices=16)
        for t_budget in (500, 2000, 8000):
            cfg = EstimatorConfig(samples_per_level=t_budget, delta=0.5, seed=args.seed)
            errors = []
            aborted = 0
            for trial in range(args.trials):
                rep = algorithm_b(g, cfg, seed=args.seed + 7919 * trial)
                if rep.aborted:
                    aborted += 1
                    continue
                errors.append(abs(rep.estimate - truth) / truth)
            med, p90 = np.quantile(errors, [0.5, 0.9]) if errors else (np.nan, np.nan)
            print(f"{name},{t_budget},{med:.4f},{p90:.4f},{aborted}")


if __name__ == "__main__":
    main()
