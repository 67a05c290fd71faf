"""Exact mapping search under the canonical derivation.

Both solvers walk mappings in the same lexicographic order: tasks in
topological order, candidate nodes in ascending id order.  Only strict
improvements replace the incumbent, so the first optimal mapping in that
order is returned and both solvers agree on mapping as well as value.
"""

from __future__ import annotations

import itertools
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass

from .derive import Instance, Mapping, ObjectiveReport, Schedule, Weights, objective
from .errors import CapExceededError, InfeasibleError
from .model import ClusterSpec, Workflow
from .twin import CarbonTrace

DEFAULT_CAP = 10**7
DEFAULT_NODE_LIMIT = 10**9
_BOUND_MARGIN = 1e-9


@dataclass(frozen=True)
class SearchStats:
    nodes_explored: int
    nodes_pruned: int
    runtime: float
    optimal_value: float


def _feasible_choices(inst: Instance) -> list[list[int]]:
    for tid, choices in zip(inst.order, inst.eligible):
        if not choices:
            raise InfeasibleError(f"no node can host task {tid}")
    return inst.eligible


def search_space_size(inst: Instance) -> int:
    return math.prod(len(c) for c in inst.eligible)


def _enumerate(
    inst: Instance, weights: Weights, trace: CarbonTrace | None, cap: int
) -> tuple[list[int], int]:
    choices = _feasible_choices(inst)
    size = search_space_size(inst)
    if size > cap:
        raise CapExceededError(f"{size} candidate mappings exceed the cap of {cap}")
    best_value = math.inf
    best: tuple[int, ...] | None = None
    for assign in itertools.product(*choices):
        if weights.makespan_only:
            value = weights.alpha * inst.makespan(assign)
        else:
            value = objective(inst.schedule(assign), inst.cluster, trace, weights).weighted
        if value < best_value:
            best_value, best = value, assign
    assert best is not None
    return list(best), size


def enumerate_optimal(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    cap: int = DEFAULT_CAP,
) -> tuple[Mapping, Schedule, ObjectiveReport]:
    """Exhaustive search over every class- and memory-feasible mapping."""
    weights = weights or Weights()
    inst = Instance(workflow, cluster)
    best, _ = _enumerate(inst, weights, trace, cap)
    schedule = inst.schedule(best)
    return inst.to_mapping(best), schedule, objective(schedule, cluster, trace, weights)


def tail_bounds(inst: Instance) -> list[float]:
    """Longest work-sum path from each task to a sink, at the fastest speed.

    Indexed by topological position, with one trailing 0.0 sentinel.
    """
    n = len(inst)
    cp = [0.0] * n
    for i in range(n - 1, -1, -1):
        cp[i] = inst.work[i] + max((cp[s] for s, _ in inst.succs[i]), default=0.0)
    # Sum-then-divide can round an ulp above the derivation's divide-then-sum;
    # the margin keeps the bound admissible in floating point.
    scale = (1.0 - _BOUND_MARGIN) / inst.cluster.max_speed
    return [w * scale for w in cp] + [0.0]


def prefix_bound(inst: Instance, prefix: Sequence[int]) -> float:
    """Lower bound on the makespan of any completion of ``prefix``.

    ``max(partial makespan, max over unassigned tasks of their tail bound)``.
    Admissible because derivation is append-only in topological order.
    """
    tails = tail_bounds(inst)
    k = len(prefix)
    partial = max(inst.derive(list(prefix) + [0] * (len(inst) - k))[1][:k], default=0.0)
    return max(partial, max(tails[k:]))


def branch_and_bound(
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    cap: int = DEFAULT_CAP,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> tuple[Mapping, Schedule, ObjectiveReport, SearchStats]:
    """Depth-first branch and bound on node choice per task.

    The critical-path bound only covers makespan, so any non-zero energy or
    carbon weight falls back to :func:`enumerate_optimal` (subject to ``cap``).
    ``node_limit`` caps explored branches for the bounded search itself.
    """
    weights = weights or Weights()
    inst = Instance(workflow, cluster)
    t0 = time.perf_counter()
    if not weights.makespan_only:
        best, size = _enumerate(inst, weights, trace, cap)
        schedule = inst.schedule(best)
        report = objective(schedule, cluster, trace, weights)
        stats = SearchStats(size, 0, time.perf_counter() - t0, report.weighted)
        return inst.to_mapping(best), schedule, report, stats

    elig = _feasible_choices(inst)
    n = len(inst)
    tails = tail_bounds(inst)
    # suffix maxima: bound contribution of tasks k.. still unassigned
    for k in range(n - 1, -1, -1):
        tails[k] = max(tails[k], tails[k + 1])

    assign = [0] * n
    finish = [0.0] * n
    saved_free = [0.0] * n
    partial_ms = [0.0] * (n + 1)
    free = [0.0] * len(inst.node_ids)
    pos = [0] * n
    best = math.inf
    best_assign: list[int] | None = None
    explored = pruned = 0
    preds, duration = inst.preds, inst.duration

    k = 0
    while True:
        if pos[k] >= len(elig[k]):
            pos[k] = 0
            k -= 1
            if k < 0:
                break
            free[assign[k]] = saved_free[k]
            continue
        node = elig[k][pos[k]]
        pos[k] += 1
        explored += 1
        if explored > node_limit:
            raise CapExceededError(f"branch and bound exceeded {node_limit} explored nodes")
        # same arithmetic as Instance.place, inlined for speed
        start = free[node]
        for p, comm in preds[k]:
            ready = finish[p] if assign[p] == node else finish[p] + comm
            if ready > start:
                start = ready
        f = start + duration[k][node]
        part = partial_ms[k] if partial_ms[k] > f else f
        bound = part if part > tails[k + 1] else tails[k + 1]
        if bound >= best:
            pruned += 1
            continue
        if k == n - 1:
            best = part
            best_assign = assign[:k] + [node]
            continue
        assign[k] = node
        finish[k] = f
        saved_free[k] = free[node]
        free[node] = f
        partial_ms[k + 1] = part
        k += 1

    assert best_assign is not None
    schedule = inst.schedule(best_assign)
    report = objective(schedule, cluster, trace, weights)
    stats = SearchStats(explored, pruned, time.perf_counter() - t0, report.weighted)
    return inst.to_mapping(best_assign), schedule, report, stats
