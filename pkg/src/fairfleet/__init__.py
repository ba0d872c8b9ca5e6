"""Fair assignment of customer requests to vehicle drivers with monotone
profits and binary feasibility constraints."""

from .algorithms import (
    EnvyGraph,
    GraphProjection,
    RoundTrace,
    build_feasible_envy_graph,
    eliminate_feasible_cycles,
    feasible_envy_graph_algorithm,
    feasible_min_max,
    find_unenvied,
    project_graph,
    return_non_feasible,
)
from .exact import (
    ExistenceQuery,
    PartitionInstance,
    build_partition_reduction,
    decide_existence,
    enumerate_assignments,
    verify_reduction,
)
from .fairness import (
    FairnessReport,
    Notion,
    check_ef1,
    check_eq1,
    check_fef1,
    check_feq1,
    fairness_report,
    is_complete,
    is_feasible,
)
from .model import (
    Additive,
    Assignment,
    BonusSuperadditive,
    BudgetAdditive,
    ConstraintSpec,
    ExplicitTable,
    Instance,
    compile_feasibility,
    evaluate_profit,
    feasible_subset,
    marginal_profit,
    validate_instance,
)

__version__ = "0.1.0"
