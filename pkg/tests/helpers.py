"""Test-only instance builders and independent oracles.

The oracles here deliberately avoid :class:`wfsched.derive.Instance` and the
solver code so they can check it.
"""

from __future__ import annotations

import itertools
import math

from wfsched.model import ClusterSpec, DependencyEdge, NodeSpec, Task, Workflow
from wfsched.rng import SplitMix64

CLASSES = ("hpc", "cloud", "edge")


def small_instance(seed: int, max_tasks: int = 6, max_nodes: int = 3, classes: bool = True):
    """Random DAG of 1..max_tasks tasks on 1..max_nodes nodes.

    About a third of tasks get a class affinity drawn from the classes that
    actually exist in the cluster, so every instance stays feasible.
    """
    rng = SplitMix64(seed)
    n = 1 + rng.randbelow(max_tasks)
    m = 1 + rng.randbelow(max_nodes)
    density = rng.random()
    nodes = []
    for j in range(m):
        p_busy = round(rng.uniform(50, 200), 2)
        nodes.append(
            NodeSpec(
                f"N{j + 1}",
                round(rng.uniform(0.5, 4), 2),
                round(rng.uniform(8, 32), 2),
                CLASSES[rng.randbelow(len(CLASSES))],
                p_busy,
                round(p_busy * rng.uniform(0, 0.5), 2),
            )
        )
    present = sorted({nd.node_class for nd in nodes})
    tasks = []
    for i in range(n):
        cls = None
        if classes and rng.random() < 0.33:
            cls = present[rng.randbelow(len(present))]
        tasks.append(Task(f"T{i}", round(rng.uniform(1, 10), 2), round(rng.uniform(0, 6), 2), cls))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append(DependencyEdge(f"T{i}", f"T{j}", round(rng.uniform(0, 10), 2)))
    return Workflow(tuple(tasks), tuple(edges)), ClusterSpec(tuple(nodes), round(rng.uniform(1, 8), 2))


def feasible_nodes(task: Task, cluster: ClusterSpec) -> list[str]:
    return sorted(
        n.id
        for n in cluster.nodes
        if (task.required_class is None or task.required_class == n.node_class)
        and task.mem_demand <= n.mem_capacity
    )


def naive_derive(workflow: Workflow, cluster: ClusterSpec, assignment: dict[str, str], order):
    """Straight transcription of the canonical policy over plain dicts."""
    nodes = {n.id: n for n in cluster.nodes}
    work = {t.id: t.work for t in workflow.tasks}
    free = {n: 0.0 for n in nodes}
    out = {}
    for tid in order:
        node = assignment[tid]
        ready = free[node]
        for e in workflow.edges:
            if e.dst != tid:
                continue
            src_node, _, src_finish = out[e.src]
            arrive = src_finish if src_node == node else src_finish + e.data / cluster.bandwidth
            ready = max(ready, arrive)
        finish = ready + work[tid] / nodes[node].speed
        out[tid] = (node, ready, finish)
        free[node] = finish
    return out


def brute_force_optimum(workflow: Workflow, cluster: ClusterSpec, order) -> float:
    """Minimum makespan over every feasible mapping, via :func:`naive_derive`."""
    choices = [feasible_nodes(workflow.task_by_id[t], cluster) for t in order]
    best = math.inf
    for combo in itertools.product(*choices):
        sched = naive_derive(workflow, cluster, dict(zip(order, combo)), order)
        best = min(best, max(f for _, _, f in sched.values()))
    return best


def energy_by_elementary_intervals(schedule, cluster) -> float:
    """Integrate cluster power over the time grid of all task boundaries."""
    used = {e.node for e in schedule.entries.values()}
    nodes = {n.id: n for n in cluster.nodes}
    cuts = sorted({0.0, schedule.makespan} | {x for e in schedule.entries.values() for x in (e.start, e.finish)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        power = 0.0
        for nid in used:
            busy = any(e.node == nid and e.start <= mid < e.finish for e in schedule.entries.values())
            power += nodes[nid].p_busy if busy else nodes[nid].p_idle
        total += power * (b - a)
    return total
