"""Workflow and cluster domain types, canonical JSON ingestion and DAG checks.

Canonical workflow document::

    {"tasks": [{"id": "A", "work": 4, "mem": 1.5, "class": "hpc", "labels": ["x"]}],
     "edges": [{"src": "A", "dst": "B", "data": 8}]}

Canonical cluster document::

    {"bandwidth": 4,
     "nodes": [{"id": "N1", "speed": 1, "mem": 16, "class": "hpc",
                "p_busy": 100, "p_idle": 10}]}

Optional task keys are ``mem`` (default 0), ``class`` and ``labels``; ``data``
on an edge defaults to 0.  Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import heapq
import json
import math
from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Any

from .errors import CycleError, ModelError

_TASK_KEYS = {"id", "work", "mem", "class", "labels"}
_EDGE_KEYS = {"src", "dst", "data"}
_NODE_KEYS = {"id", "speed", "mem", "class", "p_busy", "p_idle"}

FIXTURES = ("single", "chain3", "diamond4", "w1", "w2", "w3")


@dataclass(frozen=True)
class Task:
    id: str
    work: float
    mem_demand: float = 0.0
    required_class: str | None = None
    labels: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ModelError("task id must be a non-empty string")
        if not (math.isfinite(self.work) and self.work > 0):
            raise ModelError(f"task {self.id}: work must be positive, got {self.work}")
        if not (math.isfinite(self.mem_demand) and self.mem_demand >= 0):
            raise ModelError(f"task {self.id}: mem must be non-negative, got {self.mem_demand}")


@dataclass(frozen=True)
class DependencyEdge:
    src: str
    dst: str
    data: float = 0.0

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ModelError(f"self-loop on task {self.src}")
        if not (math.isfinite(self.data) and self.data >= 0):
            raise ModelError(f"edge {self.src}->{self.dst}: data must be non-negative")


@dataclass(frozen=True)
class Workflow:
    """A task DAG.  Construction checks ids, endpoints and acyclicity."""

    tasks: tuple[Task, ...]
    edges: tuple[DependencyEdge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.tasks:
            raise ModelError("workflow must contain at least one task")
        seen: set[str] = set()
        for t in self.tasks:
            if t.id in seen:
                raise ModelError(f"duplicate task id {t.id!r}")
            seen.add(t.id)
        pairs: set[tuple[str, str]] = set()
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in seen:
                    raise ModelError(f"edge {e.src}->{e.dst} references unknown task {end!r}")
            if (e.src, e.dst) in pairs:
                raise ModelError(f"duplicate edge {e.src}->{e.dst}")
            pairs.add((e.src, e.dst))
        # raises CycleError
        self.topological_order

    @cached_property
    def task_by_id(self) -> dict[str, Task]:
        return {t.id: t for t in self.tasks}

    @cached_property
    def predecessors(self) -> dict[str, list[DependencyEdge]]:
        preds: dict[str, list[DependencyEdge]] = {t.id: [] for t in self.tasks}
        for e in self.edges:
            preds[e.dst].append(e)
        return preds

    @cached_property
    def successors(self) -> dict[str, list[DependencyEdge]]:
        succs: dict[str, list[DependencyEdge]] = {t.id: [] for t in self.tasks}
        for e in self.edges:
            succs[e.src].append(e)
        return succs

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        return tuple(_kahn(self))


@dataclass(frozen=True)
class NodeSpec:
    id: str
    speed: float
    mem_capacity: float
    node_class: str
    p_busy: float
    p_idle: float

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ModelError("node id must be a non-empty string")
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise ModelError(f"node {self.id}: speed must be positive")
        if not (math.isfinite(self.mem_capacity) and self.mem_capacity > 0):
            raise ModelError(f"node {self.id}: mem must be positive")
        if not (math.isfinite(self.p_busy) and self.p_busy > 0):
            raise ModelError(f"node {self.id}: p_busy must be positive")
        if not (math.isfinite(self.p_idle) and self.p_idle >= 0):
            raise ModelError(f"node {self.id}: p_idle must be non-negative")
        if self.p_idle > self.p_busy:
            raise ModelError(f"node {self.id}: p_idle exceeds p_busy")


@dataclass(frozen=True)
class ClusterSpec:
    nodes: tuple[NodeSpec, ...]
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ModelError("cluster must contain at least one node")
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ModelError("bandwidth must be positive")
        seen: set[str] = set()
        for n in self.nodes:
            if n.id in seen:
                raise ModelError(f"duplicate node id {n.id!r}")
            seen.add(n.id)

    @cached_property
    def node_by_id(self) -> dict[str, NodeSpec]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def max_speed(self) -> float:
        return max(n.speed for n in self.nodes)


def can_host(task: Task, node: NodeSpec) -> bool:
    """Class affinity and single-task memory fit."""
    if task.required_class is not None and task.required_class != node.node_class:
        return False
    return task.mem_demand <= node.mem_capacity


# -- DAG checks --------------------------------------------------------------


def _kahn(workflow: Workflow) -> list[str]:
    indeg = {t.id: 0 for t in workflow.tasks}
    succs: dict[str, list[str]] = {t.id: [] for t in workflow.tasks}
    for e in workflow.edges:
        indeg[e.dst] += 1
        succs[e.src].append(e.dst)
    heap = [tid for tid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        tid = heapq.heappop(heap)
        order.append(tid)
        for s in succs[tid]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, s)
    if len(order) != len(indeg):
        residual = sorted(tid for tid, d in indeg.items() if d > 0)
        raise CycleError(residual, _find_cycle(residual, succs))
    return order


def _find_cycle(residual: list[str], succs: dict[str, list[str]]) -> list[str]:
    inside = set(residual)
    rpreds: dict[str, list[str]] = {t: [] for t in residual}
    for t in residual:
        for s in succs[t]:
            if s in inside:
                rpreds[s].append(t)
    # Every residual node keeps a residual predecessor, so walking backwards
    # from anywhere must revisit a node.
    path: list[str] = []
    pos: dict[str, int] = {}
    cur = residual[0]
    while cur not in pos:
        pos[cur] = len(path)
        path.append(cur)
        cur = min(rpreds[cur])
    cycle = path[pos[cur]:]
    cycle.reverse()
    return cycle


def validate_dag(workflow: Workflow) -> list[str]:
    """Kahn topological order, ties broken by ascending task id."""
    return list(workflow.topological_order)


# -- parsing / serialisation -------------------------------------------------


def _number(obj: dict[str, Any], key: str, where: str, default: float | None = None) -> float:
    if key not in obj:
        if default is None:
            raise ModelError(f"{where}: missing {key!r}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ModelError(f"{where}: {key!r} must be a number")
    return float(v)


def _string(obj: dict[str, Any], key: str, where: str) -> str:
    v = obj.get(key)
    if not isinstance(v, str):
        raise ModelError(f"{where}: {key!r} must be a string")
    return v


def _check_keys(obj: Any, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ModelError(f"{where}: unknown keys {sorted(unknown)}")


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from exc


def parse_workflow(text: str) -> Workflow:
    doc = _load_json(text)
    _check_keys(doc, {"tasks", "edges"}, "workflow")
    raw_tasks = doc.get("tasks")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_tasks, list) or not isinstance(raw_edges, list):
        raise ModelError("workflow: 'tasks' and 'edges' must be arrays")
    tasks = []
    for i, rt in enumerate(raw_tasks):
        where = f"tasks[{i}]"
        _check_keys(rt, _TASK_KEYS, where)
        labels = rt.get("labels", [])
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ModelError(f"{where}: 'labels' must be an array of strings")
        cls = rt.get("class")
        if cls is not None and not isinstance(cls, str):
            raise ModelError(f"{where}: 'class' must be a string")
        tasks.append(
            Task(
                id=_string(rt, "id", where),
                work=_number(rt, "work", where),
                mem_demand=_number(rt, "mem", where, 0.0),
                required_class=cls,
                labels=frozenset(labels),
            )
        )
    edges = []
    for i, re_ in enumerate(raw_edges):
        where = f"edges[{i}]"
        _check_keys(re_, _EDGE_KEYS, where)
        edges.append(
            DependencyEdge(
                src=_string(re_, "src", where),
                dst=_string(re_, "dst", where),
                data=_number(re_, "data", where, 0.0),
            )
        )
    return Workflow(tuple(tasks), tuple(edges))


def parse_cluster(text: str) -> ClusterSpec:
    doc = _load_json(text)
    _check_keys(doc, {"bandwidth", "nodes"}, "cluster")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list):
        raise ModelError("cluster: 'nodes' must be an array")
    nodes = []
    for i, rn in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        _check_keys(rn, _NODE_KEYS, where)
        nodes.append(
            NodeSpec(
                id=_string(rn, "id", where),
                speed=_number(rn, "speed", where),
                mem_capacity=_number(rn, "mem", where),
                node_class=_string(rn, "class", where),
                p_busy=_number(rn, "p_busy", where),
                p_idle=_number(rn, "p_idle", where),
            )
        )
    return ClusterSpec(tuple(nodes), _number(doc, "bandwidth", "cluster"))


def workflow_to_dict(workflow: Workflow) -> dict[str, Any]:
    tasks = []
    for t in workflow.tasks:
        d: dict[str, Any] = {"id": t.id, "work": t.work, "mem": t.mem_demand}
        if t.required_class is not None:
            d["class"] = t.required_class
        if t.labels:
            d["labels"] = sorted(t.labels)
        tasks.append(d)
    edges = [{"src": e.src, "dst": e.dst, "data": e.data} for e in workflow.edges]
    return {"tasks": tasks, "edges": edges}


def cluster_to_dict(cluster: ClusterSpec) -> dict[str, Any]:
    return {
        "bandwidth": cluster.bandwidth,
        "nodes": [
            {
                "id": n.id,
                "speed": n.speed,
                "mem": n.mem_capacity,
                "class": n.node_class,
                "p_busy": n.p_busy,
                "p_idle": n.p_idle,
            }
            for n in cluster.nodes
        ],
    }


def dump_workflow(workflow: Workflow) -> str:
    return json.dumps(workflow_to_dict(workflow), indent=2) + "\n"


def dump_cluster(cluster: ClusterSpec) -> str:
    return json.dumps(cluster_to_dict(cluster), indent=2) + "\n"


def load_fixture(name: str) -> tuple[Workflow, ClusterSpec]:
    """Return a shipped fixture: ``single``, ``chain3``, ``diamond4`` or a scenario copy ``w1``..``w3``."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    root = resources.files("wfsched") / "fixtures"
    wf = parse_workflow((root / f"{name}.workflow.json").read_text(encoding="utf-8"))
    cl = parse_cluster((root / f"{name}.cluster.json").read_text(encoding="utf-8"))
    return wf, cl


def make_workflow(tasks: Iterable[Task], edges: Iterable[DependencyEdge] = ()) -> Workflow:
    return Workflow(tuple(tasks), tuple(edges))


__all__ = [
    "FIXTURES",
    "ClusterSpec",
    "DependencyEdge",
    "NodeSpec",
    "Task",
    "Workflow",
    "can_host",
    "cluster_to_dict",
    "dump_cluster",
    "dump_workflow",
    "load_fixture",
    "make_workflow",
    "parse_cluster",
    "parse_workflow",
    "validate_dag",
    "workflow_to_dict",
]
