"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest -s tests/test_acceptance.py` to see the lines.  Budgets are
wall-clock seconds; the chain kernels are warmed up once before timing so JIT
compilation is not charged to any single criterion.
"""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ferroz.estimator import EstimatorConfig, algorithm_b
from ferroz.exact import matching_ladder, nearperfmatch_exact, omega_table, perfmatch_exact
from ferroz.hamiltonian import exact_partition, validate
from ferroz.matchgraph import (
    add_dangling_at,
    compile_circuit,
    gadget_for,
    graph_stats,
    implemented_gate,
)
from ferroz.pipeline import PipelineConfig, estimate_partition
from ferroz.sampler import default_steps, sample_matchings, sample_sizes, stationary_exact
from ferroz.trotter import (
    Gate,
    build_sequence,
    choose_r,
    f_matrix,
    g_matrix,
    gate_matrix,
    h_matrix,
    sequence_log_trace,
    verify_magnus,
    verify_prop1,
)
from helpers import graph_from_edges, manual_sequence, random_ferro

KET0_BRA1 = np.array([[0.0, 1.0], [0.0, 0.0]])
KET1_BRA0 = np.array([[0.0, 0.0], [1.0, 0.0]])
I2 = np.eye(2)


def op_on_slot(op, slot):
    return np.kron(op, I2) if slot == 2 else np.kron(I2, op)


@contextmanager
def criterion(num, label, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {num:02d} {label}: FAIL "
              f"({time.perf_counter() - start:.2f}s)")
        raise
    elapsed = time.perf_counter() - start
    verdict = "PASS" if elapsed <= budget_s else "FAIL (over time budget)"
    print(f"\nACCEPTANCE {num:02d} {label}: {verdict} "
          f"({elapsed:.2f}s, budget {budget_s:.0f}s)")
    assert elapsed <= budget_s, f"criterion {num} exceeded {budget_s}s"


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    g = graph_from_edges(2, [(0, 1, 1.0)])
    sample_sizes(g, 4, 4, 0)
    sample_matchings(g, 4, 4, 0)


def random_circuit_unit(rng, n, n_gates):
    gates = []
    kinds = ["f"] if n == 1 else ["f", "g", "h"]
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        t = float(rng.uniform())
        while t <= 0.0:
            t = float(rng.uniform())
        if kind == "f":
            gates.append(("f", (int(rng.integers(1, n + 1)),), t))
        else:
            i, j = sorted(rng.choice(np.arange(1, n + 1), size=2, replace=False))
            gates.append((kind, (int(i), int(j)), t))
    return manual_sequence(n, gates)


def test_criterion_1_gadget_fidelity():
    with criterion(1, "gadget fidelity incl. dangling variants", 1.0):
        for t in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert np.abs(implemented_gate(gadget_for(Gate("f", (1,), t))) - f_matrix(t)).max() <= 1e-12
            assert np.abs(implemented_gate(gadget_for(Gate("g", (1, 2), t))) - g_matrix(t)).max() <= 1e-12
            assert np.abs(implemented_gate(gadget_for(Gate("h", (1, 2), t))) - h_matrix(t)).max() <= 1e-12

        t = 0.5
        gd = gadget_for(Gate("g", (1, 2), t))
        gmat = g_matrix(t)
        expected_single = {
            gd.inputs[0]: gmat @ op_on_slot(KET1_BRA0, 1),
            gd.inputs[1]: gmat @ op_on_slot(KET1_BRA0, 2),
            gd.outputs[0]: op_on_slot(KET0_BRA1, 1) @ gmat,
            gd.outputs[1]: op_on_slot(KET0_BRA1, 2) @ gmat,
        }
        for vertex, expected in expected_single.items():
            got = implemented_gate(add_dangling_at(gd, [vertex]))
            assert np.abs(got - expected).max() <= 1e-12
        # six double-dangle variants
        doubles = {
            (gd.inputs[0], gd.inputs[1]): gmat @ op_on_slot(KET1_BRA0, 1) @ op_on_slot(KET1_BRA0, 2),
            (gd.outputs[0], gd.outputs[1]): op_on_slot(KET0_BRA1, 1) @ op_on_slot(KET0_BRA1, 2) @ gmat,
            (gd.inputs[0], gd.outputs[0]): op_on_slot(KET0_BRA1, 1) @ gmat @ op_on_slot(KET1_BRA0, 1),
            (gd.inputs[0], gd.outputs[1]): op_on_slot(KET0_BRA1, 2) @ gmat @ op_on_slot(KET1_BRA0, 1),
            (gd.inputs[1], gd.outputs[0]): op_on_slot(KET0_BRA1, 1) @ gmat @ op_on_slot(KET1_BRA0, 2),
            (gd.inputs[1], gd.outputs[1]): op_on_slot(KET0_BRA1, 2) @ gmat @ op_on_slot(KET1_BRA0, 2),
        }
        for vertices, expected in doubles.items():
            got = implemented_gate(add_dangling_at(gd, list(vertices)))
            assert np.abs(got - expected).max() <= 1e-12

        # h gadget: every dangle combination is a one- or two-sided product
        hd = gadget_for(Gate("h", (1, 2), t))
        hmat = h_matrix(t)
        ops = [KET0_BRA1, KET1_BRA0]
        singles = []
        for a in (1, 2):
            for op in ops:
                singles.append(op_on_slot(op, a) @ hmat)
                singles.append(hmat @ op_on_slot(op, a))
        doubles_h = []
        for a in (1, 2):
            for b in (1, 2):
                for op_p in ops:
                    for op_o in ops:
                        p_mat, o_mat = op_on_slot(op_p, a), op_on_slot(op_o, b)
                        doubles_h += [o_mat @ hmat @ p_mat, o_mat @ p_mat @ hmat, hmat @ o_mat @ p_mat]
        singles = [m for m in singles if np.abs(m).max() > 0]
        doubles_h = [m for m in doubles_h if np.abs(m).max() > 0]
        for v in range(6):
            got = implemented_gate(add_dangling_at(hd, [v]))
            assert any(np.abs(got - cand).max() <= 1e-12 for cand in singles)
        for u, v in itertools.combinations(range(6), 2):
            got = implemented_gate(add_dangling_at(hd, [u, v]))
            assert any(np.abs(got - cand).max() <= 1e-12 for cand in doubles_h)


def test_criterion_2_trace_identity():
    with criterion(2, "perfect matching sum equals circuit trace", 30.0):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(1, 4))
            seq = random_circuit_unit(rng, n, int(rng.integers(1, 9)))
            prod = np.eye(2**n)
            for gate in seq.gates:
                prod = gate_matrix(gate, n) @ prod
            trace = float(np.trace(prod))
            graph = compile_circuit(seq)
            covered = {q for g in seq.gates for q in g.qubits}
            pm = perfmatch_exact(graph, max_vertices=64) * 2 ** (n - len(covered))
            assert abs(pm - trace) / trace <= 1e-9


def test_criterion_3_trotter_accuracy():
    with criterion(3, "gate-product trace tracks the true partition function", 300.0):
        rng = np.random.default_rng(33)
        eps = 0.5
        for case in range(10):
            n = 1 if case < 3 else 2
            beta = float(rng.choice([0.5, 1.0]))
            ham = random_ferro(rng, n)
            seq = build_sequence(ham, beta, eps=eps)
            assert seq.r == choose_r(n, beta, eps)
            err = abs(sequence_log_trace(seq) - math.log(exact_partition(ham, beta)))
            assert err <= eps / 4

        # 1/r convergence over three doublings
        ham = random_ferro(np.random.default_rng(34), 2)
        beta = 1.0
        log_z = math.log(exact_partition(ham, beta))
        rs = [24, 48, 96, 192]
        errs = [abs(sequence_log_trace(build_sequence(ham, beta, r=r)) - log_z) for r in rs]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        slope = (math.log(errs[-1]) - math.log(errs[0])) / (math.log(rs[-1]) - math.log(rs[0]))
        assert -1.5 <= slope <= -0.6


def test_criterion_4_local_exponent_bounds():
    with criterion(4, "local remainder and one-period commutator bounds", 10.0):
        for t in np.linspace(0.045, 0.95, 20):
            e_norm, f_norm = verify_prop1(float(t))
            assert e_norm <= t * t + 1e-12
            assert f_norm <= t * t + 1e-12
        rng = np.random.default_rng(44)
        for _ in range(3):
            ham = random_ferro(rng, 2)
            beta = 1.0
            seq = build_sequence(ham, beta, eps=0.5)
            diag = verify_magnus(seq, beta, ham)
            assert diag.magnus_delta_norm <= 2 * math.pi * (3 * beta * 4 / seq.r) ** 3


def test_criterion_5_log_concavity():
    with criterion(5, "ladder log-concavity and monotone ratios", 30.0):
        rng = np.random.default_rng(55)
        for _ in range(50):
            nv = int(rng.integers(3, 13))
            ne = int(rng.integers(2, 2 * nv))
            edges = [
                (int(u), int(v), float(rng.uniform(1e-6, 2.0)))
                for u, v in (rng.choice(nv, size=2, replace=False) for _ in range(ne))
            ]
            z = matching_ladder(graph_from_edges(nv, edges)).z
            for k in range(1, len(z) - 1):
                assert z[k] * z[k] >= z[k - 1] * z[k + 1] * (1 - 1e-9)
            ratios = [z[k - 1] / z[k] for k in range(1, len(z)) if z[k] > 0 and z[k - 1] > 0]
            assert all(a <= b * (1 + 1e-9) for a, b in zip(ratios, ratios[1:]))


def test_criterion_6_ratio_bound():
    with criterion(6, "near-perfect/perfect ratio bound and pair decomposition", 120.0):
        rng = np.random.default_rng(66)
        built = 0
        while built < 20:
            n = int(rng.integers(1, 4))
            n_gates = int(rng.integers(2, 9))
            seq = random_circuit_unit(rng, n, n_gates)
            graph = compile_circuit(seq)
            if graph.num_vertices > 32:
                continue
            built += 1
            pm = perfmatch_exact(graph, max_vertices=34)
            assert pm > 0
            near = nearperfmatch_exact(graph, max_vertices=34)
            assert near / pm <= 10 * len(seq) ** 2
            total = sum(omega_table(graph, max_vertices=34).values())
            assert total == pytest.approx(near, rel=1e-12)


def test_criterion_7_sampler_correctness():
    with criterion(7, "detailed balance and stationary accuracy", 300.0):
        # exact detailed balance on every <= 4-edge subgraph of K4 plus
        # parallel-edge multigraphs
        from ferroz.sampler import Matching, transition_matrix

        rng = np.random.default_rng(77)
        families = []
        all_edges = list(itertools.combinations(range(4), 2))
        for k in range(1, 5):
            for subset in itertools.combinations(all_edges, k):
                families.append([(u, v, float(rng.uniform(0.1, 2.0))) for (u, v) in subset])
        families += [
            [(0, 1, 0.5), (0, 1, 1.5)],
            [(0, 1, 1.0), (0, 1, 1.0), (1, 2, 0.7), (2, 3, 1.2)],
        ]
        for edges in families:
            g = graph_from_edges(4, edges)
            states, P = transition_matrix(g)
            weights = [Matching(s).weight(g) for s in states]
            for i, j in itertools.product(range(len(states)), repeat=2):
                assert abs(weights[i] * P[i, j] - weights[j] * P[j, i]) <= 1e-12

        # empirical total variation on five fixed graphs
        fixed = [
            graph_from_edges(2, [(0, 1, 1.0)]),
            graph_from_edges(2, [(0, 1, 3.0)]),
            graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]),
            graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 1, 0.7)]),
            gadget_for(Gate("h", (1, 2), 0.5)).graph,
        ]
        n_samples = 10**5
        for idx, g in enumerate(fixed):
            steps = default_steps(g, 0.2, "practical")
            samples = sample_matchings(g, steps, n_samples, 700 + idx)
            counts: dict = {}
            for s in samples:
                counts[s] = counts.get(s, 0) + 1
            table = stationary_exact(g)
            tv = 0.5 * sum(abs(counts.get(s, 0) / n_samples - p) for s, p in table.items())
            tv += 0.5 * sum(c / n_samples for s, c in counts.items() if s not in table)
            assert tv <= 0.05, f"graph {idx}: TV {tv:.4f}"


def test_criterion_8_estimator_accuracy():
    with criterion(8, "telescoping estimator hits known matching sums", 900.0):
        rng = np.random.default_rng(88)
        graphs = [
            graph_from_edges(2, [(0, 1, 2.5)]),
            graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]),
            graph_from_edges(4, [(0, 1, 0.4), (1, 2, 1.6), (2, 3, 0.9), (3, 0, 1.2)]),
            graph_from_edges(4, [(u, v, 1.0) for u, v in itertools.combinations(range(4), 2)]),
            graph_from_edges(6, [(u, v, 1.0) for u, v in itertools.combinations(range(6), 2)]),
            graph_from_edges(6, [(u, v + 3, 1.0) for u in range(3) for v in range(3)]),
            graph_from_edges(8, [(i, i + 1, 1.0) for i in range(7)]),
            graph_from_edges(6, [(i, (i + 1) % 6, float(rng.uniform(0.4, 1.8))) for i in range(6)]),
            graph_from_edges(10, [(i, (i + 1) % 10, 1.0) for i in range(10)] + [(0, 5, 1.3), (2, 7, 0.8)]),
            compile_circuit(build_sequence(validate(2, [(1, 2, 1.0, -1.0)], [0.0, 0.0]), 0.5, r=1)),
        ]
        for idx, g in enumerate(graphs):
            truth = perfmatch_exact(g, max_vertices=16)
            assert truth > 0
            cfg = EstimatorConfig(samples_per_level=4000, delta=0.5, seed=0)
            hits = 0
            for trial in range(20):
                rep = algorithm_b(g, cfg, seed=880_000 + 1000 * idx + trial)
                if rep.aborted:
                    continue
                if abs(rep.estimate - truth) / truth <= 0.2:
                    hits += 1
            assert hits >= 15, f"graph {idx}: only {hits}/20 within 20%"


def test_criterion_9_end_to_end():
    with criterion(9, "pipeline reproduces exact partition functions", 1800.0):
        cases = [
            # (hamiltonian, beta, r, samples, tolerance)
            (validate(1, [], [1.0]), 1.0, 1, 20000, 0.10),
            (validate(2, [(1, 2, 1.0, -1.0)], [0.0, 0.0]), 0.5, 1, 8000, 0.15),
        ]
        for idx, (ham, beta, r, samples, tol) in enumerate(cases):
            truth = exact_partition(ham, beta)
            hits = 0
            for trial in range(20):
                cfg = PipelineConfig(
                    beta=beta, eps=0.3, r=r, samples_per_level=samples,
                    seed=990_000 + 1000 * idx + trial, trials=1,
                )
                rep = estimate_partition(ham, cfg)
                if rep.aborted:
                    continue
                if abs(rep.estimate - truth) / truth <= tol:
                    hits += 1
            assert hits >= 15, f"case {idx}: only {hits}/20 within {tol:.0%}"


def test_criterion_10_determinism():
    with criterion(10, "bit-identical reports under a fixed seed", 60.0):
        import json

        ham = validate(2, [(1, 2, 1.0, -1.0)], [0.0, 0.0])
        cfg = PipelineConfig(beta=0.5, eps=0.3, r=1, samples_per_level=1000, seed=123, trials=3)
        first = json.dumps(estimate_partition(ham, cfg).to_json_dict(), sort_keys=True)
        second = json.dumps(estimate_partition(ham, cfg).to_json_dict(), sort_keys=True)
        assert first == second

        # the parallel batch kernel is deterministic sample-by-sample
        g = graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
        a, acc_a = sample_sizes(g, 500, 4000, 9)
        b, acc_b = sample_sizes(g, 500, 4000, 9)
        assert np.array_equal(a, b) and acc_a == acc_b
