"""The six heuristic mappers.  Each returns a :class:`~wfsched.derive.Mapping`."""

from .aco import aco_map
from .config import DEFAULT_BUDGETS, HeuristicConfig
from .ga import ga_map
from .heft import RankTable, heft_map, heft_rank
from .olb import olb_map
from .pso import pso_map
from .sa import sa_map

__all__ = [
    "DEFAULT_BUDGETS",
    "HeuristicConfig",
    "RankTable",
    "aco_map",
    "ga_map",
    "heft_map",
    "heft_rank",
    "olb_map",
    "pso_map",
    "sa_map",
]
