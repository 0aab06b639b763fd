"""Partition functions of ferromagnetic XY-type spin systems, estimated by
compiling a Trotter gate product into a weighted graph and Monte Carlo
sampling its perfect matching sum."""

from .hamiltonian import (
    FerroHamiltonian,
    SplitCoefficients,
    exact_free_energy,
    exact_ground_energy,
    exact_partition,
    split_coefficients,
    to_dense,
    validate,
)
from .trotter import Gate, GateSequence, build_sequence, choose_r, sequence_trace_exact
from .matchgraph import (
    Gadget,
    WeightedMultigraph,
    add_dangling,
    compile_circuit,
    gadget_for,
    graph_stats,
    implemented_gate,
)
from .exact import (
    MatchingLadder,
    check_log_concavity,
    matching_ladder,
    nearperfmatch_exact,
    omega_exact,
    perfmatch_exact,
)
from .sampler import (
    Matching,
    MoveStats,
    SamplerConfig,
    chain_step,
    default_steps,
    sample,
    stationary_exact,
)
from .estimator import EstimateReport, EstimatorConfig, algorithm_b, amplify_median, theory_params
from .pipeline import (
    PipelineConfig,
    PipelineReport,
    estimate_free_energy,
    estimate_ground_energy,
    estimate_partition,
)

__version__ = "0.1.0"
