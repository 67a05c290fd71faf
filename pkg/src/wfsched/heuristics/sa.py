"""Simulated annealing over single-task reassignments, seeded from OLB."""

from __future__ import annotations

import math

from ..derive import Mapping, Weights
from ..model import ClusterSpec, Workflow
from ..rng import SplitMix64
from ..twin import CarbonTrace
from ._common import Evaluator, feasible_instance
from .config import HeuristicConfig
from .olb import olb_assignment


def sa_map(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    config: HeuristicConfig | None = None,
) -> Mapping:
    """Anneal from the OLB mapping and return the best mapping seen.

    A move picks a task uniformly among those with more than one feasible
    node and sends it to a uniformly chosen *different* feasible node.
    Worse moves pass with probability ``exp(-delta / T)``; ``T`` starts at
    ``initial_temperature`` (default 10x the starting objective, or 1 if that
    is zero) and is multiplied by ``cooling`` after every step.
    """
    config = config or HeuristicConfig()
    iterations, _ = config.budget("sa")
    inst = feasible_instance(workflow, cluster)
    score = Evaluator(inst, weights, trace)
    rng = SplitMix64(config.seed)

    current = olb_assignment(inst)
    cur_val = score(current)
    best, best_val = list(current), cur_val
    movable = [i for i in range(len(inst)) if len(inst.eligible[i]) > 1]
    if not movable:
        return inst.to_mapping(best)

    temp = config.initial_temperature or (10.0 * cur_val if cur_val > 0 else 1.0)
    for _ in range(iterations):
        i = movable[rng.randbelow(len(movable))]
        options = [j for j in inst.eligible[i] if j != current[i]]
        cand = list(current)
        cand[i] = options[rng.randbelow(len(options))]
        val = score(cand)
        delta = val - cur_val
        if delta < 0 or (temp > 0 and rng.random() < math.exp(-delta / temp)):
            current, cur_val = cand, val
            if cur_val < best_val:
                best, best_val = list(current), cur_val
        temp *= config.cooling
    return inst.to_mapping(best)
