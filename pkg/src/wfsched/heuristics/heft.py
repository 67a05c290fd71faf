"""Heterogeneous Earliest Finish Time.

Tasks are taken in descending upward rank and each goes to the node giving
the earliest finish, allowing insertion into idle gaps left by earlier
placements.  The internal insertion schedule is discarded: callers rescore
the returned mapping with the canonical derivation.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from ..derive import Instance, Mapping
from ..model import ClusterSpec, Workflow
from ._common import feasible_instance


@dataclass(frozen=True)
class RankTable:
    ranks: dict[str, float]

    def __getitem__(self, task_id: str) -> float:
        return self.ranks[task_id]


def _upward_ranks(inst: Instance) -> list[float]:
    speeds = [n.speed for n in inst.cluster.nodes]
    mean_inv_speed = sum(1.0 / s for s in speeds) / len(speeds)
    n = len(inst)
    rank = [0.0] * n
    for i in range(n - 1, -1, -1):
        tail = max((comm + rank[s] for s, comm in inst.succs[i]), default=0.0)
        rank[i] = inst.work[i] * mean_inv_speed + tail
    return rank


def heft_rank(workflow: Workflow, cluster: ClusterSpec) -> RankTable:
    """Upward ranks with mean execution time and mean comm = data / bandwidth."""
    inst = Instance(workflow, cluster)
    return RankTable(dict(zip(inst.order, _upward_ranks(inst))))


def _earliest_slot(starts: list[float], finishes: list[float], ready: float, dur: float) -> float:
    # slots are disjoint and sorted; start scanning at the first one ending after `ready`
    k = bisect.bisect_right(finishes, ready)
    t = ready
    for s, f in zip(starts[k:], finishes[k:]):
        if t + dur <= s:
            return t
        if f > t:
            t = f
    return t


def heft_map(workflow: Workflow, cluster: ClusterSpec) -> Mapping:
    inst = feasible_instance(workflow, cluster)
    rank = _upward_ranks(inst)
    order = sorted(range(len(inst)), key=lambda i: (-rank[i], inst.order[i]))

    m = len(inst.node_ids)
    starts: list[list[float]] = [[] for _ in range(m)]
    finishes: list[list[float]] = [[] for _ in range(m)]
    assign = [-1] * len(inst)
    finish = [0.0] * len(inst)
    for i in order:
        # ready time on node j: preds elsewhere pay comm, preds on j do not
        via_node: dict[int, float] = {}
        remote: dict[int, float] = {}
        for p, comm in inst.preds[i]:
            j, fp = assign[p], finish[p]
            if fp > via_node.get(j, -1.0):
                via_node[j] = fp
            if fp + comm > remote.get(j, -1.0):
                remote[j] = fp + comm
        top = sorted(remote.items(), key=lambda kv: -kv[1])[:2]
        best_node, best_start, best_finish = -1, 0.0, float("inf")
        for j in inst.eligible[i]:
            others = next((v for node, v in top if node != j), 0.0)
            ready = max(others, via_node.get(j, 0.0))
            dur = inst.duration[i][j]
            s = _earliest_slot(starts[j], finishes[j], ready, dur)
            if s + dur < best_finish:
                best_node, best_start, best_finish = j, s, s + dur
        k = bisect.bisect_left(starts[best_node], best_start)
        starts[best_node].insert(k, best_start)
        finishes[best_node].insert(k, best_finish)
        assign[i] = best_node
        finish[i] = best_finish
    return inst.to_mapping(assign)
