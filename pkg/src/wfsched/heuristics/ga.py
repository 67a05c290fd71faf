"""Genetic algorithm on node-index chromosomes in topological task order."""

from __future__ import annotations

from collections.abc import Sequence

from ..derive import Mapping, Weights
from ..model import ClusterSpec, Workflow
from ..rng import SplitMix64
from ..twin import CarbonTrace
from ._common import Evaluator, feasible_instance
from .config import HeuristicConfig


def ga_map(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    config: HeuristicConfig | None = None,
    initial_population: Sequence[Mapping] | None = None,
) -> Mapping:
    """Binary tournament, uniform crossover, per-gene mutation, elitism of one.

    Gene ``i`` is the node of the ``i``-th task in topological order, drawn
    only from nodes that can host it.  Returns the best individual ever seen.
    """
    config = config or HeuristicConfig()
    generations, size = config.budget("ga")
    inst = feasible_instance(workflow, cluster)
    score = Evaluator(inst, weights, trace)
    rng = SplitMix64(config.seed)
    n = len(inst)
    elig = inst.eligible
    mutation = config.mutation_rate if config.mutation_rate is not None else 1.0 / n

    if initial_population:
        pop = [inst.to_assignment(m) for m in initial_population]
    else:
        pop = [[rng.choice(elig[i]) for i in range(n)] for _ in range(size)]
    fit = [score(c) for c in pop]
    size = len(pop)
    best_idx = min(range(size), key=fit.__getitem__)
    best, best_val = list(pop[best_idx]), fit[best_idx]

    def tournament() -> list[int]:
        a, b = rng.randbelow(size), rng.randbelow(size)
        return pop[a] if fit[a] <= fit[b] else pop[b]

    for _ in range(generations):
        elite = min(range(size), key=fit.__getitem__)
        nxt = [pop[elite]]
        while len(nxt) < size:
            p1, p2 = tournament(), tournament()
            if rng.random() < config.crossover_rate:
                child = [p1[i] if rng.random() < 0.5 else p2[i] for i in range(n)]
            else:
                child = list(p1)
            for i in range(n):
                if rng.random() < mutation:
                    child[i] = rng.choice(elig[i])
            nxt.append(child)
        pop = nxt
        fit = [fit[elite]] + [score(c) for c in pop[1:]]
        for c, v in zip(pop, fit):
            if v < best_val:
                best, best_val = list(c), v
    return inst.to_mapping(best)
