from __future__ import annotations

from collections.abc import Sequence

from ..derive import Instance, Weights, objective
from ..errors import InfeasibleError
from ..model import ClusterSpec, Workflow
from ..twin import CarbonTrace


def feasible_instance(workflow: Workflow, cluster: ClusterSpec) -> Instance:
    inst = Instance(workflow, cluster)
    for tid, choices in zip(inst.order, inst.eligible):
        if not choices:
            raise InfeasibleError(f"no node can host task {tid}")
    return inst


class Evaluator:
    """Weighted objective of an index assignment under canonical derivation."""

    def __init__(
        self, inst: Instance, weights: Weights | None, trace: CarbonTrace | None
    ) -> None:
        self.inst = inst
        self.weights = weights or Weights()
        self.trace = trace
        self.calls = 0

    def __call__(self, assign: Sequence[int]) -> float:
        self.calls += 1
        if self.weights.makespan_only:
            return self.weights.alpha * self.inst.makespan(assign)
        sched = self.inst.schedule(assign)
        return objective(sched, self.inst.cluster, self.trace, self.weights).weighted
