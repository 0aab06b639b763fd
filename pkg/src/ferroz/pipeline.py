"""End-to-end partition function estimation.

estimate_partition chains the stages: Trotterize the Hamiltonian, compile the
gate sequence into a weighted graph, estimate its perfect matching sum with
the telescoping estimator (median-amplified over independent trials), and
multiply by 2 per gate-free qubit.  The error budget splits the requested
relative error eps as exp(eps/4) for the gate-product approximation times
(1 + eps/2) for the estimator, whose product stays within 1 + eps.

Free-energy and ground-energy estimation reduce to partition function calls:
F = -log(Z)/beta with eps = min(1/2, beta*Delta/2), and the ground energy is
F at beta = 2n/Delta estimated to Delta/2.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

from . import estimator, exact, matchgraph, sampler, trotter
from .hamiltonian import FerroHamiltonian, exact_partition

PRACTICAL_SAMPLES_DEFAULT = 2000
PRACTICAL_DELTA_DEFAULT = 0.5


class TheoryBudgetExceeded(RuntimeError):
    """Theory-mode parameters imply more work than the configured budget."""


@dataclass(frozen=True)
class PipelineConfig:
    beta: float
    eps: float = 0.2
    mode: str = "practical"
    r: int | None = None
    samples_per_level: int | None = None
    steps: int | None = None
    delta: float | None = None
    seed: int = 0
    trials: int = 1
    q_coeff: float = 1.0
    cross_validate: bool = False
    max_theory_work: float = 5e8

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.mode not in ("theory", "practical"):
            raise ValueError("mode must be 'theory' or 'practical'")
        if self.trials < 1 or self.trials % 2 == 0:
            raise ValueError("trials must be odd and >= 1")


@dataclass
class PipelineReport:
    estimate: float | None
    aborted: bool
    relative_error_target: float
    mode: str
    beta: float
    seed: int
    exact_shortcut: bool = False
    free_qubit_factor: int = 1
    trotter_info: dict = field(default_factory=dict)
    graph_info: dict = field(default_factory=dict)
    estimator_info: dict = field(default_factory=dict)
    error_budget: dict = field(default_factory=dict)
    levels: list[dict] = field(default_factory=list)
    trial_reports: list[dict] = field(default_factory=list)
    cross_validation: dict | None = None
    wall_time: float | None = None  # diagnostics only, never serialized

    @property
    def trial_estimates(self) -> list[float | None]:
        return [rep["estimate"] for rep in self.trial_reports]

    def to_json_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "aborted": self.aborted,
            "relative_error_target": self.relative_error_target,
            "mode": self.mode,
            "beta": self.beta,
            "seed": self.seed,
            "exact_shortcut": self.exact_shortcut,
            "free_qubit_factor": self.free_qubit_factor,
            "trotter": self.trotter_info,
            "graph": self.graph_info,
            "estimator": self.estimator_info,
            "error_budget": self.error_budget,
            "levels": self.levels,
            "trials": self.trial_reports,
            "cross_validation": self.cross_validation,
        }


def _default_practical_r(beta: float) -> int:
    # smallest integer strictly above 2*beta, keeping every gate in range
    return max(1, math.floor(2.0 * beta) + 1)


def _error_budget(eps: float) -> dict:
    lhs = math.exp(eps / 4.0) * (1.0 + eps / 2.0)
    return {
        "eps": eps,
        "trotter_log_budget": eps / 4.0,
        "estimator_relative_budget": eps / 2.0,
        "composition_bound": lhs,
        "composition_ok": lhs <= 1.0 + eps,
    }


def estimate_partition(ham: FerroHamiltonian, cfg: PipelineConfig) -> PipelineReport:
    """Randomized estimate of Tr exp(-beta H) within relative error eps."""
    start = time.perf_counter()
    beta, eps = cfg.beta, cfg.eps
    if cfg.r is not None:
        seq = trotter.build_sequence(ham, beta, r=cfg.r)
    elif cfg.mode == "theory":
        seq = trotter.build_sequence(ham, beta, eps=eps)
    else:
        seq = trotter.build_sequence(ham, beta, r=_default_practical_r(beta))

    report = PipelineReport(
        estimate=None,
        aborted=False,
        relative_error_target=eps,
        mode=cfg.mode,
        beta=beta,
        seed=cfg.seed,
        trotter_info={
            "r": seq.r,
            "period_len": seq.period_len,
            "gates": len(seq),
            "nominal_gates": seq.nominal_len,
            "skipped": seq.skipped,
        },
        error_budget=_error_budget(eps),
    )

    if len(seq) == 0:
        # H has no nonzero coefficients: the trace is 2^n exactly.
        report.estimate = float(2**ham.n)
        report.exact_shortcut = True
        report.free_qubit_factor = 2**ham.n
        report.wall_time = time.perf_counter() - start
        return report

    graph = matchgraph.compile_circuit(seq)
    free = ham.n - len(matchgraph.active_qubits(seq))
    stats = matchgraph.graph_stats(graph)
    report.graph_info = {
        "num_vertices": stats.num_vertices,
        "num_edges": stats.num_edges,
        "w_max": stats.w_max,
        "w_min": stats.w_min,
    }
    report.free_qubit_factor = 2**free

    n_half = graph.num_vertices // 2
    if cfg.mode == "theory":
        t_samples, delta = estimator.theory_params(graph, eps / 2.0, cfg.q_coeff)
        steps = sampler.default_steps(graph, delta, "theory")
        projected = float(cfg.trials) * max(1, n_half - 1) * t_samples * steps
        if projected > cfg.max_theory_work:
            raise TheoryBudgetExceeded(
                f"theory mode would run ~{projected:.3g} chain steps: "
                f"r={seq.r}, J={len(seq)}, |V|={stats.num_vertices}, "
                f"|E|={stats.num_edges}, T={t_samples}, steps={steps}, "
                f"levels={n_half - 1}, trials={cfg.trials}; "
                f"budget is {cfg.max_theory_work:.3g}. "
                "Use practical mode with explicit --samples/--steps."
            )
    else:
        t_samples = cfg.samples_per_level or PRACTICAL_SAMPLES_DEFAULT
        delta = cfg.delta or PRACTICAL_DELTA_DEFAULT
        steps = cfg.steps or sampler.default_steps(graph, delta, "practical")

    est_cfg = estimator.EstimatorConfig(
        samples_per_level=t_samples,
        delta=delta,
        q_coeff=cfg.q_coeff,
        mode=cfg.mode,
        seed=cfg.seed,
        steps=steps,
    )
    report.estimator_info = {
        "samples_per_level": t_samples,
        "delta": delta,
        "steps_per_sample": steps,
        "trials": cfg.trials,
        "levels": max(0, n_half - 1),
    }

    def run(trial_seed: int) -> estimator.EstimateReport:
        return estimator.algorithm_b(graph, est_cfg, seed=trial_seed)

    try:
        median, trial_reports = estimator.amplify_median(run, cfg.trials, seed=cfg.seed)
    except estimator.MajorityAborted as exc:
        report.aborted = True
        report.estimator_info["abort"] = str(exc)
        report.wall_time = time.perf_counter() - start
        return report

    report.estimate = median * report.free_qubit_factor
    report.trial_reports = [rep.to_json_dict() for rep in trial_reports]
    first_ok = next(rep for rep in trial_reports if not rep.aborted)
    report.levels = [
        {"k": r.k, "alpha": r.alpha, "p_k": r.p_k, "p_k1": r.p_k1}
        for r in first_ok.levels
    ]

    if cfg.cross_validate and ham.n <= 3:
        report.cross_validation = _cross_validate(ham, beta, seq, graph, free)
    report.wall_time = time.perf_counter() - start
    return report


def _cross_validate(ham, beta, seq, graph, free) -> dict:
    z_exact = exact_partition(ham, beta)
    z_gates = trotter.sequence_trace_exact(seq)
    pm = exact.perfmatch_exact(graph, max_vertices=graph.num_vertices) * 2**free
    gate_vs_graph = abs(pm - z_gates) / abs(z_gates)
    return {
        "exact_partition": z_exact,
        "gate_product_trace": z_gates,
        "perfect_matching_sum": pm,
        "trotter_log_error": abs(math.log(z_gates) - math.log(z_exact)),
        "graph_stage_consistent": gate_vs_graph <= 1e-9,
    }


def estimate_free_energy(ham: FerroHamiltonian, beta: float, delta_abs: float,
                         cfg: PipelineConfig) -> tuple[float, PipelineReport]:
    """F = -log(Z)/beta to absolute error delta_abs (with high probability)."""
    if delta_abs <= 0.0:
        raise ValueError("delta_abs must be positive")
    eps = min(0.5, beta * delta_abs / 2.0)
    run_cfg = replace(cfg, beta=beta, eps=eps)
    report = estimate_partition(ham, run_cfg)
    if report.aborted or report.estimate is None:
        return math.nan, report
    return -math.log(report.estimate) / beta, report


def estimate_ground_energy(ham: FerroHamiltonian, delta_abs: float,
                           cfg: PipelineConfig) -> tuple[float, PipelineReport]:
    """Ground energy via the low-temperature free energy at beta = 2n/Delta."""
    if delta_abs <= 0.0:
        raise ValueError("delta_abs must be positive")
    beta = 2.0 * ham.n / delta_abs
    return estimate_free_energy(ham, beta, delta_abs / 2.0, cfg)
