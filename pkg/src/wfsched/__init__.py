"""Workflow scheduling over heterogeneous clusters.

Scheduling is split into a mapping step (which node runs each task) and a
canonical derivation step (when it runs).  Exact and heuristic mappers share
the derivation, so their objectives are directly comparable.
"""

from .derive import (
    Mapping,
    ObjectiveReport,
    Schedule,
    ScheduleEntry,
    Violation,
    Weights,
    compute_carbon,
    compute_energy,
    derive_schedule,
    objective,
    read_schedule_csv,
    schedule_to_csv,
    validate_schedule,
)
from .exact import SearchStats, branch_and_bound, enumerate_optimal
from .heuristics import (
    HeuristicConfig,
    RankTable,
    aco_map,
    ga_map,
    heft_map,
    heft_rank,
    olb_map,
    pso_map,
    sa_map,
)
from .model import (
    ClusterSpec,
    DependencyEdge,
    NodeSpec,
    Task,
    Workflow,
    load_fixture,
    parse_cluster,
    parse_workflow,
    validate_dag,
)
from .twin import (
    AnomalyPolicy,
    CarbonTrace,
    TelemetrySnapshot,
    filter_nodes,
    intensity_at,
    load_snapshot,
    load_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyPolicy",
    "CarbonTrace",
    "ClusterSpec",
    "DependencyEdge",
    "HeuristicConfig",
    "Mapping",
    "NodeSpec",
    "ObjectiveReport",
    "RankTable",
    "Schedule",
    "ScheduleEntry",
    "SearchStats",
    "Task",
    "TelemetrySnapshot",
    "Violation",
    "Weights",
    "Workflow",
    "aco_map",
    "branch_and_bound",
    "compute_carbon",
    "compute_energy",
    "derive_schedule",
    "enumerate_optimal",
    "filter_nodes",
    "ga_map",
    "heft_map",
    "heft_rank",
    "intensity_at",
    "load_fixture",
    "load_snapshot",
    "load_trace",
    "objective",
    "olb_map",
    "parse_cluster",
    "parse_workflow",
    "pso_map",
    "read_schedule_csv",
    "sa_map",
    "schedule_to_csv",
    "validate_dag",
    "validate_schedule",
]
