"""Particle swarm over continuous node coordinates.

Each task gets a coordinate in [0, m) for m cluster nodes (cluster order).
Decoding floors it, clamps to [0, m-1] and then snaps to the nearest node
that can host the task (ties go to the lower index).  Velocities start at
zero and are clamped to [-m, m]; positions are clipped to [0, m].
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from ..derive import Instance, Mapping, Weights
from ..model import ClusterSpec, Workflow
from ..rng import SplitMix64
from ..twin import CarbonTrace
from ._common import Evaluator, feasible_instance
from .config import HeuristicConfig


def _snap_tables(inst: Instance) -> list[list[int]]:
    m = len(inst.node_ids)
    tables = []
    for choices in inst.eligible:
        ok = sorted(choices)
        tables.append([min(ok, key=lambda j: (abs(j - k), j)) for k in range(m)])
    return tables


def pso_map(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    config: HeuristicConfig | None = None,
    initial_positions: Sequence[Sequence[float]] | None = None,
) -> Mapping:
    config = config or HeuristicConfig()
    iterations, size = config.budget("pso")
    inst = feasible_instance(workflow, cluster)
    score = Evaluator(inst, weights, trace)
    rng = SplitMix64(config.seed)
    n, m = len(inst), len(inst.node_ids)
    snap = _snap_tables(inst)

    def decode(x: Sequence[float]) -> list[int]:
        return [snap[i][min(max(math.floor(x[i]), 0), m - 1)] for i in range(n)]

    if initial_positions is not None:
        xs = [list(map(float, x)) for x in initial_positions]
    else:
        xs = [[rng.uniform(0.0, m) for _ in range(n)] for _ in range(size)]
    vs = [[0.0] * n for _ in xs]
    pbest = [list(x) for x in xs]
    pval = [score(decode(x)) for x in xs]
    g = min(range(len(xs)), key=pval.__getitem__)
    gbest, gval = list(pbest[g]), pval[g]

    w, c1, c2 = config.inertia, config.cognitive, config.social
    for _ in range(iterations):
        for k, (x, v) in enumerate(zip(xs, vs)):
            for i in range(n):
                r1, r2 = rng.random(), rng.random()
                vi = w * v[i] + c1 * r1 * (pbest[k][i] - x[i]) + c2 * r2 * (gbest[i] - x[i])
                v[i] = min(max(vi, -m), m)
                x[i] = min(max(x[i] + v[i], 0.0), float(m))
            val = score(decode(x))
            if val < pval[k]:
                pbest[k], pval[k] = list(x), val
                if val < gval:
                    gbest, gval = list(x), val
    return inst.to_mapping(decode(gbest))
