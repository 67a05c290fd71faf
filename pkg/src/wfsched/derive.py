"""Canonical schedule derivation and the objectives computed on its output.

A mapping fixes *where* each task runs; derivation fixes *when*.  The policy
is append-only list scheduling: walk the tasks in :func:`validate_dag` order
and start each one at::

    max(node next-free time, max over preds p of p.finish + comm(p, task))

with ``comm = data / bandwidth`` between distinct nodes and 0 on one node.
There is no back-filling, so a prefix of the walk never changes once later
tasks are placed.  The exact solver relies on that.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import ConfigError, MappingError
from .model import ClusterSpec, Workflow, can_host
from .twin import ZERO_TRACE, CarbonTrace

JOULES_PER_KWH = 3.6e6
_TOL = 1e-9


@dataclass(frozen=True)
class Mapping:
    """Total task -> node assignment."""

    assignment: dict[str, str]

    def __getitem__(self, task_id: str) -> str:
        return self.assignment[task_id]


@dataclass(frozen=True)
class ScheduleEntry:
    node: str
    start: float
    finish: float


@dataclass(frozen=True)
class Schedule:
    """Per-task intervals, in derivation order."""

    entries: dict[str, ScheduleEntry]
    makespan: float

    @property
    def mapping(self) -> Mapping:
        return Mapping({t: e.node for t, e in self.entries.items()})


@dataclass(frozen=True)
class Weights:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.alpha, self.beta, self.gamma)
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ConfigError(f"objective weights must be finite and non-negative, got {vals}")
        if not any(vals):
            raise ConfigError("objective weights must not all be zero")

    @property
    def makespan_only(self) -> bool:
        return self.beta == 0 and self.gamma == 0


@dataclass(frozen=True)
class ObjectiveReport:
    makespan: float
    energy: float
    carbon: float
    weighted: float
    weights: Weights = field(default_factory=Weights)

    def to_text(self) -> str:
        rows = [
            ("makespan", self.makespan),
            ("energy", self.energy),
            ("carbon", self.carbon),
            ("weighted", self.weighted),
            ("alpha", self.weights.alpha),
            ("beta", self.weights.beta),
            ("gamma", self.weights.gamma),
        ]
        return "".join(f"{k}={v!r}\n" for k, v in rows)


@dataclass(frozen=True)
class Violation:
    kind: str
    subjects: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class Instance:
    """Index-based view of a (workflow, cluster) pair for repeated derivation.

    Tasks are numbered in topological order and nodes in cluster order.
    Search code builds one ``Instance`` and calls :meth:`derive` many times.
    """

    def __init__(self, workflow: Workflow, cluster: ClusterSpec) -> None:
        self.workflow = workflow
        self.cluster = cluster
        self.order: tuple[str, ...] = workflow.topological_order
        self.task_index = {t: i for i, t in enumerate(self.order)}
        self.node_ids: tuple[str, ...] = tuple(n.id for n in cluster.nodes)
        self.node_index = {n: j for j, n in enumerate(self.node_ids)}
        tasks = [workflow.task_by_id[t] for t in self.order]
        self.work = [t.work for t in tasks]
        self.duration = [[t.work / n.speed for n in cluster.nodes] for t in tasks]
        self.preds: list[list[tuple[int, float]]] = [
            [(self.task_index[e.src], e.data / cluster.bandwidth) for e in workflow.predecessors[t]]
            for t in self.order
        ]
        self.succs: list[list[tuple[int, float]]] = [[] for _ in self.order]
        for i, ps in enumerate(self.preds):
            for p, comm in ps:
                self.succs[p].append((i, comm))
        by_id = sorted(range(len(self.node_ids)), key=lambda j: self.node_ids[j])
        self.eligible: list[list[int]] = [
            [j for j in by_id if can_host(t, cluster.nodes[j])] for t in tasks
        ]
        self.class_ok: list[set[int]] = [
            {
                j
                for j, n in enumerate(cluster.nodes)
                if t.required_class is None or t.required_class == n.node_class
            }
            for t in tasks
        ]

    def __len__(self) -> int:
        return len(self.order)

    def place(
        self, i: int, node: int, assign: Sequence[int], finish: Sequence[float], free: float
    ) -> tuple[float, float]:
        """Start and finish of task ``i`` on ``node`` given placed predecessors."""
        start = free
        for p, comm in self.preds[i]:
            ready = finish[p] if assign[p] == node else finish[p] + comm
            if ready > start:
                start = ready
        return start, start + self.duration[i][node]

    def derive(self, assign: Sequence[int]) -> tuple[list[float], list[float]]:
        n = len(self.order)
        start = [0.0] * n
        finish = [0.0] * n
        free = [0.0] * len(self.node_ids)
        for i in range(n):
            node = assign[i]
            start[i], finish[i] = self.place(i, node, assign, finish, free[node])
            free[node] = finish[i]
        return start, finish

    def makespan(self, assign: Sequence[int]) -> float:
        return max(self.derive(assign)[1])

    def to_assignment(self, mapping: Mapping) -> list[int]:
        check_mapping(self.workflow, self.cluster, mapping)
        return [self.node_index[mapping.assignment[t]] for t in self.order]

    def to_mapping(self, assign: Sequence[int]) -> Mapping:
        return Mapping({t: self.node_ids[assign[i]] for i, t in enumerate(self.order)})

    def schedule(self, assign: Sequence[int]) -> Schedule:
        start, finish = self.derive(assign)
        entries = {
            t: ScheduleEntry(self.node_ids[assign[i]], start[i], finish[i])
            for i, t in enumerate(self.order)
        }
        return Schedule(entries, max(finish))


def check_mapping(workflow: Workflow, cluster: ClusterSpec, mapping: Mapping) -> None:
    """Raise :class:`MappingError` unless ``mapping`` is total and class-respecting."""
    assignment = mapping.assignment
    missing = [t.id for t in workflow.tasks if t.id not in assignment]
    if missing:
        raise MappingError(f"unmapped tasks: {', '.join(missing)}")
    extra = sorted(set(assignment) - set(workflow.task_by_id))
    if extra:
        raise MappingError(f"mapping names unknown tasks: {', '.join(extra)}")
    for t in workflow.tasks:
        node = cluster.node_by_id.get(assignment[t.id])
        if node is None:
            raise MappingError(f"task {t.id} mapped to unknown node {assignment[t.id]!r}")
        if t.required_class is not None and node.node_class != t.required_class:
            raise MappingError(
                f"task {t.id} requires class {t.required_class!r} but node {node.id} "
                f"is {node.node_class!r}"
            )


def derive_schedule(workflow: Workflow, cluster: ClusterSpec, mapping: Mapping) -> Schedule:
    inst = Instance(workflow, cluster)
    return inst.schedule(inst.to_assignment(mapping))


def _busy_by_node(schedule: Schedule) -> dict[str, list[tuple[float, float]]]:
    busy: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for e in schedule.entries.values():
        busy[e.node].append((e.start, e.finish))
    return busy


def compute_energy(schedule: Schedule, cluster: ClusterSpec) -> float:
    """Two-level power model; nodes that run nothing draw nothing."""
    total = 0.0
    for node_id, intervals in _busy_by_node(schedule).items():
        node = cluster.node_by_id[node_id]
        busy = sum(f - s for s, f in intervals)
        total += node.p_idle * schedule.makespan + (node.p_busy - node.p_idle) * busy
    return total


def compute_carbon(schedule: Schedule, cluster: ClusterSpec, trace: CarbonTrace) -> float:
    """Grams of CO2, integrating power times intensity exactly over [0, makespan).

    Power is piecewise constant between task boundaries and intensity between
    trace breakpoints, so splitting the integral per node into an idle floor
    over the whole horizon plus a busy surplus over each task interval is exact.
    """
    horizon = trace.integrate(0.0, schedule.makespan)
    total = 0.0
    for node_id, intervals in _busy_by_node(schedule).items():
        node = cluster.node_by_id[node_id]
        surplus = sum(trace.integrate(s, f) for s, f in intervals)
        total += node.p_idle * horizon + (node.p_busy - node.p_idle) * surplus
    return total / JOULES_PER_KWH


def objective(
    schedule: Schedule,
    cluster: ClusterSpec,
    trace: CarbonTrace | None = None,
    weights: Weights | None = None,
) -> ObjectiveReport:
    """Weighted makespan/energy/carbon.  No trace means zero carbon intensity."""
    weights = weights or Weights()
    trace = trace or ZERO_TRACE
    energy = compute_energy(schedule, cluster)
    carbon = compute_carbon(schedule, cluster, trace)
    weighted = weights.alpha * schedule.makespan + weights.beta * energy + weights.gamma * carbon
    return ObjectiveReport(schedule.makespan, energy, carbon, weighted, weights)


def _lt(a: float, b: float) -> bool:
    return a < b - _TOL * max(1.0, abs(b))


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _TOL * max(1.0, abs(a), abs(b))


def validate_schedule(
    workflow: Workflow, cluster: ClusterSpec, schedule: Schedule
) -> list[Violation]:
    """Every feasibility problem in ``schedule``; an empty list means valid."""
    out: list[Violation] = []
    entries = schedule.entries
    for t in workflow.tasks:
        if t.id not in entries:
            out.append(Violation("missing", (t.id,), f"task {t.id} is not scheduled"))
    for tid in entries:
        if tid not in workflow.task_by_id:
            out.append(Violation("unknown-task", (tid,), f"schedule names unknown task {tid}"))

    placed: dict[str, list[tuple[float, float, str]]] = defaultdict(list)
    for tid, e in entries.items():
        task = workflow.task_by_id.get(tid)
        node = cluster.node_by_id.get(e.node)
        if task is None:
            continue
        if node is None:
            out.append(Violation("unknown-node", (tid, e.node), f"task {tid} on unknown node {e.node}"))
            continue
        if _lt(e.start, 0.0):
            out.append(Violation("negative-start", (tid,), f"task {tid} starts at {e.start}"))
        expected = e.start + task.work / node.speed
        if not _close(e.finish, expected):
            out.append(
                Violation(
                    "duration",
                    (tid,),
                    f"task {tid} finishes at {e.finish}, expected {expected} on {node.id}",
                )
            )
        if task.required_class is not None and node.node_class != task.required_class:
            out.append(
                Violation(
                    "class",
                    (tid, node.id),
                    f"task {tid} needs class {task.required_class}, node {node.id} is {node.node_class}",
                )
            )
        placed[node.id].append((e.start, e.finish, tid))

    for node_id in sorted(placed):
        intervals = sorted(placed[node_id])
        active: list[tuple[float, float, str]] = []
        for s, f, tid in intervals:
            active = [a for a in active if _lt(s, a[1])]
            for _, _, other in active:
                out.append(
                    Violation(
                        "overlap",
                        (other, tid),
                        f"tasks {other} and {tid} overlap on node {node_id}",
                    )
                )
            active.append((s, f, tid))
        out.extend(_memory_violations(workflow, cluster.node_by_id[node_id], intervals))

    for edge in workflow.edges:
        src, dst = entries.get(edge.src), entries.get(edge.dst)
        if src is None or dst is None:
            continue
        comm = 0.0 if src.node == dst.node else edge.data / cluster.bandwidth
        if _lt(dst.start, src.finish + comm):
            out.append(
                Violation(
                    "precedence",
                    (edge.src, edge.dst),
                    f"edge {edge.src}->{edge.dst}: {edge.dst} starts at {dst.start} "
                    f"before {src.finish + comm}",
                )
            )

    if entries:
        latest = max(e.finish for e in entries.values())
        if not _close(schedule.makespan, latest):
            out.append(
                Violation("makespan", (), f"makespan {schedule.makespan} != last finish {latest}")
            )
    return out


def _memory_violations(workflow, node, intervals) -> list[Violation]:
    # sweep start/finish events; finishes sort before starts at equal times
    events = []
    for s, f, tid in intervals:
        events.append((s, 1, tid))
        events.append((f, 0, tid))
    events.sort()
    running: dict[str, float] = {}
    out = []
    for _, kind, tid in events:
        if kind == 0:
            running.pop(tid, None)
            continue
        running[tid] = workflow.task_by_id[tid].mem_demand
        used = sum(running.values())
        if used > node.mem_capacity * (1 + _TOL):
            names = tuple(sorted(running))
            out.append(
                Violation(
                    "memory",
                    names,
                    f"node {node.id} holds {used} GiB > capacity {node.mem_capacity} "
                    f"(tasks {', '.join(names)})",
                )
            )
    return out


# -- export ------------------------------------------------------------------

SCHEDULE_COLUMNS = ("task", "node", "start", "finish")


def schedule_to_csv(schedule: Schedule) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCHEDULE_COLUMNS)
    for tid, e in schedule.entries.items():
        w.writerow((tid, e.node, repr(e.start), repr(e.finish)))
    return buf.getvalue()


def read_schedule_csv(text: str) -> Schedule:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != SCHEDULE_COLUMNS:
        raise ValueError(f"schedule CSV must start with header {','.join(SCHEDULE_COLUMNS)}")
    entries = {}
    for row in reader:
        if not row:
            continue
        tid, node, start, finish = row
        entries[tid] = ScheduleEntry(node, float(start), float(finish))
    makespan = max((e.finish for e in entries.values()), default=0.0)
    return Schedule(entries, makespan)
