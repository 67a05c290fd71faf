"""Ant colony construction over a (task, node) pheromone matrix.

Ants assign tasks in topological order, choosing node ``j`` for task ``i``
with probability proportional to ``tau[i][j]**a * eta[i][j]**b`` where
``eta = speed_j / work_i`` (inverse execution time).  Every round all trails
evaporate by ``evaporation`` and the round's best ant deposits
``best_ever / round_best`` (1 when the round best is zero) on its choices.
"""

from __future__ import annotations

from collections.abc import Sequence

from ..derive import Mapping, Weights
from ..model import ClusterSpec, Workflow
from ..rng import SplitMix64
from ..twin import CarbonTrace
from ._common import Evaluator, feasible_instance
from .config import HeuristicConfig


def aco_map(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    config: HeuristicConfig | None = None,
    initial_pheromone: Sequence[Sequence[float]] | None = None,
) -> Mapping:
    """``initial_pheromone`` is indexed [topological task][cluster node]; default all ones."""
    config = config or HeuristicConfig()
    rounds, ants = config.budget("aco")
    inst = feasible_instance(workflow, cluster)
    score = Evaluator(inst, weights, trace)
    rng = SplitMix64(config.seed)
    n, m = len(inst), len(inst.node_ids)
    speeds = [node.speed for node in cluster.nodes]
    a, b, rho = config.pheromone_weight, config.desirability_weight, config.evaporation

    if initial_pheromone is not None:
        tau = [list(map(float, row)) for row in initial_pheromone]
    else:
        tau = [[1.0] * m for _ in range(n)]
    eta_b = [[(speeds[j] / inst.work[i]) ** b for j in range(m)] for i in range(n)]

    def construct() -> list[int]:
        assign = []
        for i in range(n):
            choices = inst.eligible[i]
            desire = [tau[i][j] ** a * eta_b[i][j] for j in choices]
            total = sum(desire)
            if total <= 0.0:
                assign.append(choices[rng.randbelow(len(choices))])
                continue
            u = rng.random() * total
            pick = choices[-1]
            for j, d in zip(choices, desire):
                u -= d
                if u < 0.0:
                    pick = j
                    break
            assign.append(pick)
        return assign

    best: list[int] | None = None
    best_val = float("inf")
    for _ in range(rounds):
        round_best, round_val = None, float("inf")
        for _ in range(ants):
            cand = construct()
            val = score(cand)
            if val < round_val:
                round_best, round_val = cand, val
        if round_val < best_val:
            best, best_val = round_best, round_val
        deposit = best_val / round_val if round_val > 0 else 1.0
        for i in range(n):
            row = tau[i]
            for j in range(m):
                row[j] *= 1.0 - rho
            row[round_best[i]] += deposit
    return inst.to_mapping(best)
