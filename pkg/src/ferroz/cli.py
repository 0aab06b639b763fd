"""Command-line interface.

Subcommands mirror the pipeline stages: validate, trotterize, compile-graph,
exact, sample, estimate-pm, estimate-z, free-energy, ground-energy.  All
randomness flows from --seed.  Exit codes: 0 success, 1 invalid input,
2 estimator abort.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import estimator, exact, hamiltonian, matchgraph, pipeline, sampler, trotter

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ABORT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # invalid usage is invalid input
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_common(p: argparse.ArgumentParser, *, needs_eps=True) -> None:
    p.add_argument("--hamiltonian", required=True, help="Hamiltonian JSON file")
    p.add_argument("--beta", type=float, required=True)
    if needs_eps:
        p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--r", type=int, default=None, help="period count override")
    p.add_argument("--out", default=None)


def _add_estimation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("theory", "practical"), default="practical")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--samples", type=int, default=None, help="samples per level (T)")
    p.add_argument("--steps", type=int, default=None, help="chain steps per sample")
    p.add_argument("--delta", type=float, default=None, help="sampler precision")
    p.add_argument("--cross-validate", action="store_true")


def _pipeline_config(args, beta=None, eps=None) -> pipeline.PipelineConfig:
    return pipeline.PipelineConfig(
        beta=beta if beta is not None else args.beta,
        eps=eps if eps is not None else args.eps,
        mode=args.mode,
        r=args.r,
        samples_per_level=args.samples,
        steps=args.steps,
        delta=args.delta,
        seed=args.seed,
        trials=args.trials,
        cross_validate=getattr(args, "cross_validate", False),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ferroz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a Hamiltonian file")
    p.add_argument("--hamiltonian", required=True)

    p = sub.add_parser("trotterize", help="write the gate sequence")
    _add_common(p)

    p = sub.add_parser("compile-graph", help="write the compiled matching graph")
    _add_common(p)
    p.add_argument("--dot", default=None, help="also write a DOT rendering")

    p = sub.add_parser("exact", help="dense oracles for small systems")
    _add_common(p, needs_eps=False)
    p.add_argument("--cross-validate", action="store_true",
                   help="also trace the gate product and matching sum (needs --r or --eps)")
    p.add_argument("--eps", type=float, default=None)

    p = sub.add_parser("sample", help="draw matchings from a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--out", default=None)

    p = sub.add_parser("estimate-pm", help="estimate the perfect matching sum of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--samples", type=int, default=pipeline.PRACTICAL_SAMPLES_DEFAULT)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--delta", type=float, default=pipeline.PRACTICAL_DELTA_DEFAULT)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("estimate-z", help="full pipeline: partition function")
    _add_common(p)
    _add_estimation(p)

    p = sub.add_parser("free-energy", help="absolute-error free energy")
    _add_common(p, needs_eps=False)
    p.add_argument("--delta-abs", type=float, required=True)
    _add_estimation(p)

    p = sub.add_parser("ground-energy", help="absolute-error ground energy")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--delta-abs", type=float, required=True)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--out", default=None)
    _add_estimation(p)

    return parser


def _load_ham(path: str) -> hamiltonian.FerroHamiltonian:
    return hamiltonian.load(path)


def _cmd_validate(args) -> int:
    ham = _load_ham(args.hamiltonian)
    print(json.dumps({"valid": True, "n": ham.n, "pairs": len(ham.b)}))
    return EXIT_OK


def _cmd_trotterize(args) -> int:
    ham = _load_ham(args.hamiltonian)
    seq = trotter.build_sequence(ham, args.beta, eps=args.eps, r=args.r)
    _emit(trotter.to_json_dict(seq), args.out)
    return EXIT_OK


def _cmd_compile_graph(args) -> int:
    ham = _load_ham(args.hamiltonian)
    seq = trotter.build_sequence(ham, args.beta, eps=args.eps, r=args.r)
    graph = matchgraph.compile_circuit(seq)
    _emit(graph.to_json_dict(), args.out)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(graph.to_dot() + "\n")
    return EXIT_OK


def _cmd_exact(args) -> int:
    ham = _load_ham(args.hamiltonian)
    data = {
        "partition": hamiltonian.exact_partition(ham, args.beta),
        "free_energy": hamiltonian.exact_free_energy(ham, args.beta),
        "ground_energy": hamiltonian.exact_ground_energy(ham),
        "beta": args.beta,
    }
    if args.cross_validate:
        seq = trotter.build_sequence(ham, args.beta, eps=args.eps, r=args.r)
        data["gate_product_trace"] = trotter.sequence_trace_exact(seq)
        if len(seq) > 0:
            graph = matchgraph.compile_circuit(seq)
            free = ham.n - len(matchgraph.active_qubits(seq))
            data["perfect_matching_sum"] = (
                exact.perfmatch_exact(graph, max_vertices=graph.num_vertices)
                * 2**free
            )
    _emit(data, args.out)
    return EXIT_OK


def _cmd_sample(args) -> int:
    graph = matchgraph.load(args.graph)
    steps = args.steps or sampler.default_steps(graph, args.delta, "practical")
    sizes, stats = sampler.sample_sizes(graph, steps, args.samples, args.seed)
    counts: dict[str, int] = {}
    for s in sizes:
        counts[str(int(s))] = counts.get(str(int(s)), 0) + 1
    _emit(
        {
            "samples": args.samples,
            "steps_per_sample": steps,
            "size_counts": counts,
            "sampler_stats": stats.to_json_dict(),
            "seed": args.seed,
        },
        args.out,
    )
    return EXIT_OK


def _cmd_estimate_pm(args) -> int:
    graph = matchgraph.load(args.graph)
    cfg = estimator.EstimatorConfig(
        samples_per_level=args.samples,
        delta=args.delta,
        seed=args.seed,
        steps=args.steps,
    )

    def run(trial_seed: int) -> estimator.EstimateReport:
        return estimator.algorithm_b(graph, cfg, seed=trial_seed)

    try:
        median, reports = estimator.amplify_median(run, args.trials, seed=args.seed)
    except estimator.MajorityAborted as exc:
        _emit({"aborted": True, "reason": str(exc)}, args.out)
        return EXIT_ABORT
    _emit(
        {
            "estimate": median,
            "trials": args.trials,
            "trial_reports": [r.to_json_dict() for r in reports],
        },
        args.out,
    )
    return EXIT_OK


def _cmd_estimate_z(args) -> int:
    ham = _load_ham(args.hamiltonian)
    report = pipeline.estimate_partition(ham, _pipeline_config(args))
    _emit(report.to_json_dict(), args.out)
    return EXIT_ABORT if report.aborted else EXIT_OK


def _cmd_free_energy(args) -> int:
    ham = _load_ham(args.hamiltonian)
    cfg = _pipeline_config(args, eps=0.5)
    value, report = pipeline.estimate_free_energy(ham, args.beta, args.delta_abs, cfg)
    data = report.to_json_dict()
    data["free_energy"] = None if math.isnan(value) else value
    data["delta_abs"] = args.delta_abs
    _emit(data, args.out)
    return EXIT_ABORT if report.aborted else EXIT_OK


def _cmd_ground_energy(args) -> int:
    ham = _load_ham(args.hamiltonian)
    cfg = _pipeline_config(args, beta=1.0, eps=0.5)
    value, report = pipeline.estimate_ground_energy(ham, args.delta_abs, cfg)
    data = report.to_json_dict()
    data["ground_energy"] = None if math.isnan(value) else value
    data["delta_abs"] = args.delta_abs
    _emit(data, args.out)
    return EXIT_ABORT if report.aborted else EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "trotterize": _cmd_trotterize,
    "compile-graph": _cmd_compile_graph,
    "exact": _cmd_exact,
    "sample": _cmd_sample,
    "estimate-pm": _cmd_estimate_pm,
    "estimate-z": _cmd_estimate_z,
    "free-energy": _cmd_free_energy,
    "ground-energy": _cmd_ground_energy,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        hamiltonian.HamiltonianError,
        matchgraph.GraphError,
        exact.TooLarge,
        exact.OddVertexCount,
        pipeline.TheoryBudgetExceeded,
        FileNotFoundError,
        json.JSONDecodeError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
