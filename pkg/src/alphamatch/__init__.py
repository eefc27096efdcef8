"""alphamatch: matching mechanisms with a tunable employment guarantee.

Computes family-to-location matchings that trade family welfare (preference
ranks) against the predicted employment objective, with mechanisms that
guarantee at least an ``alpha`` share of the optimal objective.
"""

from .errors import (
    AlphamatchError,
    IncompletePreferences,
    InfeasibleAssignment,
    InfeasibleMatching,
    InfeasiblePins,
    InvalidInstance,
    InvalidKnapsack,
    LimitExceeded,
    MalformedCsv,
    MalformedMatching,
    StrictIncompleteUnmatched,
)
from .model import (
    EPSILON,
    AlphaParam,
    Instance,
    Matching,
    QuotaMode,
    RankValueFunction,
    ValidationReport,
    government_objective,
    is_feasible,
    rank_of,
    validate_instance,
)
from .assignment import (
    AssignSolution,
    PinnedSet,
    describe_reduced_problem,
    solve_assignment,
    solve_assignment_value,
)
from .cmrv import (
    CmrvProblem,
    CmrvSolution,
    KnapsackInstance,
    SolveLimits,
    SolveStatus,
    extract_induced_knapsack,
    knapsack_to_cmrv,
    solve_cmrv,
)
from .mechanisms import (
    IncompleteMode,
    MechanismConfig,
    crsd_order,
    location_priorities,
    run_crsd,
    run_crsd_with_order,
    run_crv,
    run_da,
    run_government_optimal,
    run_ttc,
)
from .generator import (
    GeneratorSpec,
    Regime,
    TruncationSpec,
    allocate_quotas,
    generate_instance,
)
from .metrics import MetricsReport, compute_metrics
from .sweep import SweepSpec, SweepResult, aggregate, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AlphamatchError",
    "AlphaParam",
    "AssignSolution",
    "CmrvProblem",
    "CmrvSolution",
    "EPSILON",
    "GeneratorSpec",
    "IncompleteMode",
    "IncompletePreferences",
    "InfeasibleAssignment",
    "InfeasibleMatching",
    "InfeasiblePins",
    "Instance",
    "InvalidInstance",
    "InvalidKnapsack",
    "KnapsackInstance",
    "LimitExceeded",
    "MalformedCsv",
    "MalformedMatching",
    "Matching",
    "MechanismConfig",
    "MetricsReport",
    "PinnedSet",
    "QuotaMode",
    "RankValueFunction",
    "Regime",
    "SolveLimits",
    "SolveStatus",
    "StrictIncompleteUnmatched",
    "SweepResult",
    "SweepSpec",
    "TruncationSpec",
    "ValidationReport",
    "aggregate",
    "allocate_quotas",
    "compute_metrics",
    "crsd_order",
    "describe_reduced_problem",
    "extract_induced_knapsack",
    "generate_instance",
    "government_objective",
    "is_feasible",
    "knapsack_to_cmrv",
    "location_priorities",
    "rank_of",
    "run_crsd",
    "run_crsd_with_order",
    "run_crv",
    "run_da",
    "run_government_optimal",
    "run_sweep",
    "run_ttc",
    "solve_assignment",
    "solve_assignment_value",
    "solve_cmrv",
    "validate_instance",
]
