"""Opportunistic Load Balancing: earliest-available node, costs ignored."""

from __future__ import annotations

from ..derive import Mapping
from ..model import ClusterSpec, Workflow
from ._common import feasible_instance


def olb_assignment(inst) -> list[int]:
    free = [0.0] * len(inst.node_ids)
    assign = [0] * len(inst)
    finish = [0.0] * len(inst)
    for i in range(len(inst)):
        node = min(inst.eligible[i], key=lambda j: free[j])
        # precedence is respected for bookkeeping; communication is not
        start = max([free[node]] + [finish[p] for p, _ in inst.preds[i]])
        finish[i] = start + inst.duration[i][node]
        free[node] = finish[i]
        assign[i] = node
    return assign


def olb_map(workflow: Workflow, cluster: ClusterSpec) -> Mapping:
    inst = feasible_instance(workflow, cluster)
    return inst.to_mapping(olb_assignment(inst))
