"""Mixed Birth-death/death-Birth Moran processes on undirected graphs.

Fixation probabilities and absorption times via three routes that check each
other: an exact 2^n-state solver, closed forms for the structured regimes
(neutral, regular, bidegreed, cycles, stars), and a seeded Monte Carlo
estimator with theorem-driven run budgets.
"""

from .closed_forms import (
    CycleRates,
    NotBidegreedError,
    SingularRecurrenceError,
    StarCoefficients,
    StarFixation,
    bidegreed_neutral_fp,
    cycle_fp,
    cycle_rates,
    neutral_half_lambda_fp,
    neutral_regular_fp,
    star_coefficients,
    star_fp,
)
from .drift import (
    DriftTerms,
    NotBoundaryEdgeError,
    Potential,
    boundary_edges,
    edge_drift,
    expected_drift,
    is_bad_configuration,
)
from .estimator import (
    AbortedError,
    EstimateReport,
    EstimatorConfig,
    InvalidConfigError,
    certified_auto_config,
    estimate,
    sweep,
    wilson_interval,
)
from .exact import (
    ExactSolution,
    NonConvergenceError,
    TooLargeError,
    absorption_time,
    fixation_probability,
    solve,
    solve_exact,
)
from .graphs import (
    DISCONNECTED,
    DegreeProfile,
    Disconnected,
    DisconnectedError,
    DuplicateEdgeError,
    Graph,
    GraphError,
    InvalidParamError,
    MalformedLineError,
    SelfLoopError,
    book_graph,
    complete_graph,
    cycle_graph,
    degree_profile,
    generate_connected_gnp,
    generate_gnp,
    gnp_edges,
    parse_edge_list,
    path_graph,
    random_regular_graph,
    serialize_edge_list,
    star_graph,
)
from .process import (
    AbsorptionResult,
    Configuration,
    Outcome,
    ProcessParams,
    TransitionDistribution,
    default_max_steps,
    neighborhood_fitness,
    run_to_absorption,
    sample_step,
    total_fitness,
    transition_distribution,
    transition_distribution_exact,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
