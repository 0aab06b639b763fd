"""Ratio-telescoping estimator for the perfect matching sum.

Level k reweights every edge by alpha_k (an estimate of Z_{k-1}/Z_k, which
concentrates the matching-size distribution around k), samples T matchings,
and turns the empirical size-k and size-(k+1) fractions into the next ratio
estimate.  The product of the inverted ratios telescopes to Z_N = PerfMatch.
Out-of-range ratios or empty level counts abort the run; an abort is a
structured failure, never a silent zero.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import sampler
from .exact import OddVertexCount

MODES = ("theory", "practical")


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs for one estimation run.

    samples_per_level is T; delta is the per-sample sampler precision, which
    in practical mode only sets the default step budget.  q_coeff is the
    coefficient of the ratio-bound polynomial q(N) = q_coeff * N^2 used by
    the abort guard.  steps overrides the per-sample step budget.
    """

    samples_per_level: int
    delta: float
    q_coeff: float = 1.0
    mode: str = "practical"
    seed: int = 0
    trials: int = 1
    steps: int | None = None

    def __post_init__(self):
        if self.samples_per_level < 1:
            raise ValueError("samples_per_level must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.q_coeff <= 0.0:
            raise ValueError("q_coeff must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.trials < 1 or self.trials % 2 == 0:
            raise ValueError("trials must be odd and >= 1")


@dataclass
class LevelRecord:
    k: int
    alpha: float
    p_k: float
    p_k1: float


@dataclass
class EstimateReport:
    """Outcome of one estimator run; estimate is None when aborted."""

    estimate: float | None
    aborted: bool = False
    abort_level: int | None = None
    abort_reason: str | None = None
    levels: list[LevelRecord] = field(default_factory=list)
    n_levels: int = 0
    samples_per_level: int = 0
    steps_per_sample: int = 0
    total_samples: int = 0
    sampler_stats: sampler.MoveStats = field(default_factory=sampler.MoveStats)
    seed: int = 0
    mode: str = "practical"

    @property
    def alpha_trace(self) -> list[float]:
        return [rec.alpha for rec in self.levels]

    def to_json_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "aborted": self.aborted,
            "abort_level": self.abort_level,
            "abort_reason": self.abort_reason,
            "levels": [
                {"k": r.k, "alpha": r.alpha, "p_k": r.p_k, "p_k1": r.p_k1}
                for r in self.levels
            ],
            "n_levels": self.n_levels,
            "samples_per_level": self.samples_per_level,
            "steps_per_sample": self.steps_per_sample,
            "total_samples": self.total_samples,
            "sampler_stats": self.sampler_stats.to_json_dict(),
            "seed": self.seed,
            "mode": self.mode,
        }


class MajorityAborted(RuntimeError):
    def __init__(self, aborted: int, trials: int):
        self.aborted = aborted
        self.trials = trials
        super().__init__(f"{aborted} of {trials} estimator runs aborted")


def theory_params(gamma, eps: float, q_coeff: float = 1.0,
                  c_samples: float = 1.0, c_delta: float = 8.0) -> tuple[int, float]:
    """Worst-case (T, delta) for relative error eps.

    T = ceil(c * eps^-2 N^4 |E|^2 wmax^2 q(N)^2 log N) with q(N) = q_coeff N^2,
    and delta = eps / (c_delta N).  Astronomical by design; practical runs
    should pass their own budgets.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    nv = gamma.num_vertices
    if nv % 2 != 0:
        raise OddVertexCount(f"|V| = {nv} is odd")
    n_half = nv // 2
    ws = gamma.weights()
    w_max = max([1.0] + ws)
    q_n = q_coeff * n_half * n_half
    t_val = (
        c_samples
        * eps**-2
        * n_half**4
        * gamma.num_edges**2
        * w_max**2
        * q_n**2
        * math.log(max(n_half, 2))
    )
    return max(1, math.ceil(t_val)), eps / (c_delta * n_half)


SizeSampler = Callable[[float, int, int], np.ndarray]
"""(alpha, n_samples, level) -> array of matching sizes."""


def algorithm_b(gamma, cfg: EstimatorConfig, seed: int | None = None,
                size_sampler: SizeSampler | None = None) -> EstimateReport:
    """One telescoping pass over the levels; see the module docstring.

    size_sampler substitutes the Markov chain (e.g. with exact stationary
    sampling in tests); the default draws from the chain with the configured
    step budget.
    """
    nv = gamma.num_vertices
    if nv % 2 != 0:
        raise OddVertexCount(f"|V| = {nv} is odd")
    n_half = nv // 2
    run_seed = cfg.seed if seed is None else seed
    steps = cfg.steps
    if steps is None:
        steps = sampler.default_steps(gamma, cfg.delta, cfg.mode)

    report = EstimateReport(
        estimate=None,
        n_levels=max(0, n_half - 1),
        samples_per_level=cfg.samples_per_level,
        steps_per_sample=steps,
        seed=run_seed,
        mode=cfg.mode,
    )

    weight_total = gamma.weight_sum()
    if weight_total <= 0.0:
        report.aborted = True
        report.abort_reason = "graph has no edges"
        return report
    alpha = 1.0 / weight_total
    product = weight_total
    q_n = cfg.q_coeff * n_half * n_half

    stats = sampler.MoveStats()
    total_samples = 0
    for k in range(1, n_half):
        if alpha > 2.0 * q_n:
            report.aborted = True
            report.abort_level = k
            report.abort_reason = f"alpha_{k} = {alpha:.6g} > 2 q(N) = {2 * q_n:.6g}"
            return report
        if alpha < 1.0 / (2.0 * weight_total):
            report.aborted = True
            report.abort_level = k
            report.abort_reason = (
                f"alpha_{k} = {alpha:.6g} < 1 / (2 sum w) = {0.5 / weight_total:.6g}"
            )
            return report
        if size_sampler is not None:
            sizes = np.asarray(size_sampler(alpha, cfg.samples_per_level, k))
        else:
            sizes, level_stats = sampler.sample_sizes(
                gamma, steps, cfg.samples_per_level, run_seed, level=k, alpha=alpha
            )
            stats = stats + level_stats
        total_samples += cfg.samples_per_level
        report.total_samples = total_samples
        report.sampler_stats = stats
        p_k = float(np.count_nonzero(sizes == k)) / cfg.samples_per_level
        p_k1 = float(np.count_nonzero(sizes == k + 1)) / cfg.samples_per_level
        report.levels.append(LevelRecord(k=k, alpha=alpha, p_k=p_k, p_k1=p_k1))
        if p_k == 0.0 or p_k1 == 0.0:
            report.aborted = True
            report.abort_level = k
            report.abort_reason = f"empty level count p_{k}={p_k:g}, p_{k + 1}={p_k1:g}"
            return report
        alpha = alpha * p_k / p_k1
        product = product / alpha

    if not math.isfinite(product) or product <= 0.0:
        report.aborted = True
        report.abort_reason = f"non-finite estimate {product!r}"
        return report
    report.estimate = product
    return report


def amplify_median(run: Callable[[int], EstimateReport], trials: int,
                   seed: int = 0) -> tuple[float, list[EstimateReport]]:
    """Median of independent non-aborted runs.

    run(trial_seed) must produce an EstimateReport; trial seeds are derived
    from (seed, trial index).  Raises MajorityAborted when more than half the
    runs abort.
    """
    if trials < 1 or trials % 2 == 0:
        raise ValueError("trials must be odd and >= 1")
    reports = []
    estimates = []
    aborted = 0
    for trial in range(trials):
        trial_seed = int(
            sampler.ChainStream(seed, 0x7472, trial, 1).state
        )
        rep = run(trial_seed)
        reports.append(rep)
        if rep.aborted or rep.estimate is None:
            aborted += 1
        else:
            estimates.append(rep.estimate)
    if aborted * 2 > trials:
        raise MajorityAborted(aborted, trials)
    return float(statistics.median(estimates)), reports
