"""Scenario generation, benchmark runs and CSV emission.

Generated quantities are drawn from :class:`~wfsched.rng.SplitMix64` in a
fixed order (nodes first, then tasks in id order, then edges) and rounded to
two decimals:

=================  ===============  ====================================
quantity           range            notes
=================  ===============  ====================================
task work          U[2, 10]
task mem           U[0.5, 4]        always fits the smallest node
edge data          U[1, 8]
node speed         U[1, 4]
node mem           U[8, 64]
node p_busy        U[80, 250] W
node p_idle        p_busy x U[0.1, 0.3]
bandwidth          4                W1-W3; U[1, 10] for random instances
node class         hpc, cloud, edge, hpc, ...  (by node position)
=================  ===============  ====================================

The named scenarios are fixed-seed stand-ins of growing dependency density:

* ``W1`` 5 tasks, 4 edges (a chain of four plus one fork), 3 nodes.
* ``W2`` 10 tasks in layers 2-3-3-2 joined by 14 edges, 4 nodes.
* ``W3`` 15 tasks in five layers of three; every task past the first layer
  depends on the whole previous layer, and tasks from the third layer on also
  depend on one task two layers back: 45 edges, 5 nodes.
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .derive import (
    Mapping,
    Schedule,
    Weights,
    derive_schedule,
    objective,
    schedule_to_csv,
    validate_schedule,
)
from .errors import CapExceededError, InfeasibleError, MappingError
from .exact import SearchStats, branch_and_bound, enumerate_optimal
from .heuristics import (
    HeuristicConfig,
    aco_map,
    ga_map,
    heft_map,
    olb_map,
    pso_map,
    sa_map,
)
from .model import ClusterSpec, DependencyEdge, NodeSpec, Task, Workflow
from .rng import SplitMix64
from .twin import CarbonTrace

SCENARIO_SEEDS = {"W1": 101, "W2": 202, "W3": 303}
SCENARIO_NODES = {"W1": 3, "W2": 4, "W3": 5}
HEURISTICS = ("heft", "olb", "ga", "pso", "aco", "sa")
EXACT = ("bnb", "exhaustive")
ALGORITHMS = HEURISTICS + EXACT
CLASSES = ("hpc", "cloud", "edge")
BENCH_COLUMNS = (
    "scenario",
    "algorithm",
    "seed",
    "makespan",
    "energy",
    "carbon",
    "runtime_s",
    "status",
    "nodes_explored",
    "nodes_pruned",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    workflow: Workflow
    cluster: ClusterSpec
    seed: int


def _r(x: float) -> float:
    return round(x, 2)


def _nodes(rng: SplitMix64, count: int) -> list[NodeSpec]:
    nodes = []
    for j in range(count):
        speed = _r(rng.uniform(1, 4))
        mem = _r(rng.uniform(8, 64))
        p_busy = _r(rng.uniform(80, 250))
        p_idle = _r(p_busy * rng.uniform(0.1, 0.3))
        nodes.append(NodeSpec(f"N{j + 1}", speed, mem, CLASSES[j % len(CLASSES)], p_busy, p_idle))
    return nodes


def _tasks(rng: SplitMix64, ids: Sequence[str]) -> list[Task]:
    return [Task(t, _r(rng.uniform(2, 10)), _r(rng.uniform(0.5, 4))) for t in ids]


def _edges(rng: SplitMix64, pairs: Sequence[tuple[str, str]]) -> list[DependencyEdge]:
    return [DependencyEdge(s, d, _r(rng.uniform(1, 8))) for s, d in pairs]


def _layered_pairs(layers: list[list[str]], skip: bool) -> list[tuple[str, str]]:
    pairs = []
    for k in range(1, len(layers)):
        for pos, dst in enumerate(layers[k]):
            pairs.extend((src, dst) for src in layers[k - 1])
            if skip and k >= 2:
                back = layers[k - 2]
                pairs.append((back[pos % len(back)], dst))
    return pairs


def _scenario_shape(name: str) -> tuple[list[str], list[tuple[str, str]]]:
    if name == "W1":
        ids = [f"T{i}" for i in range(1, 6)]
        return ids, [("T1", "T2"), ("T2", "T3"), ("T3", "T4"), ("T2", "T5")]
    if name == "W2":
        ids = [f"T{i:02d}" for i in range(1, 11)]
        pairs = [
            ("T01", "T03"), ("T01", "T04"), ("T02", "T04"), ("T02", "T05"),
            ("T03", "T06"), ("T04", "T06"), ("T04", "T07"), ("T05", "T07"), ("T05", "T08"),
            ("T06", "T09"), ("T07", "T09"), ("T08", "T09"),
            ("T07", "T10"), ("T08", "T10"),
        ]  # fmt: skip
        return ids, pairs
    if name == "W3":
        ids = [f"T{i:02d}" for i in range(1, 16)]
        layers = [ids[k : k + 3] for k in range(0, 15, 3)]
        return ids, _layered_pairs(layers, skip=True)
    raise ValueError(f"unknown scenario {name!r}; choose W1, W2 or W3")


def gen_scenario(name: str) -> Scenario:
    ids, pairs = _scenario_shape(name)
    seed = SCENARIO_SEEDS[name]
    rng = SplitMix64(seed)
    nodes = _nodes(rng, SCENARIO_NODES[name])
    tasks = _tasks(rng, ids)
    edges = _edges(rng, pairs)
    return Scenario(name, Workflow(tuple(tasks), tuple(edges)), ClusterSpec(tuple(nodes), 4.0), seed)


def gen_random_instance(n_tasks: int, n_nodes: int, density: float, seed: int) -> Scenario:
    """Forward-edge random DAG: ``i -> j`` for ``i < j`` with probability ``density``."""
    if n_tasks < 1 or n_nodes < 1:
        raise ValueError("n_tasks and n_nodes must be >= 1")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = SplitMix64(seed)
    nodes = _nodes(rng, n_nodes)
    bandwidth = _r(rng.uniform(1, 10))
    width = len(str(n_tasks))
    ids = [f"T{i:0{width}d}" for i in range(1, n_tasks + 1)]
    tasks = _tasks(rng, ids)
    pairs = []
    if density > 0:
        for i in range(n_tasks):
            for j in range(i + 1, n_tasks):
                if rng.random() < density:
                    pairs.append((ids[i], ids[j]))
    edges = _edges(rng, pairs)
    name = f"rand-{n_tasks}x{n_nodes}"
    return Scenario(name, Workflow(tuple(tasks), tuple(edges)), ClusterSpec(tuple(nodes), bandwidth), seed)


# -- benchmark ---------------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    scenario: str
    algorithm: str
    seed: int
    repetition: int
    makespan: float | None
    energy: float | None
    carbon: float | None
    runtime_s: float
    status: str
    stats: SearchStats | None = None
    schedule: Schedule | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def solve(
    algorithm: str,
    workflow: Workflow,
    cluster: ClusterSpec,
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    seed: int = 0,
    config: HeuristicConfig | None = None,
) -> tuple[Mapping, SearchStats | None]:
    """Run one algorithm by name; returns its mapping and exact-search stats if any."""
    config = config or HeuristicConfig(seed=seed)
    if algorithm == "heft":
        return heft_map(workflow, cluster), None
    if algorithm == "olb":
        return olb_map(workflow, cluster), None
    stochastic: dict[str, Callable[..., Mapping]] = {
        "ga": ga_map,
        "pso": pso_map,
        "aco": aco_map,
        "sa": sa_map,
    }
    if algorithm in stochastic:
        return stochastic[algorithm](workflow, cluster, weights, trace, config), None
    if algorithm == "bnb":
        mapping, _, _, stats = branch_and_bound(workflow, cluster, weights, trace)
        return mapping, stats
    if algorithm == "exhaustive":
        t0 = time.perf_counter()
        mapping, _, report = enumerate_optimal(workflow, cluster, weights, trace)
        return mapping, SearchStats(0, 0, time.perf_counter() - t0, report.weighted)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def _run_one(
    scenario: Scenario,
    algorithm: str,
    repetition: int,
    weights: Weights,
    trace: CarbonTrace | None,
    config: HeuristicConfig | None,
) -> BenchRecord:
    seed = scenario.seed + repetition
    cfg = HeuristicConfig(**{**(config.__dict__ if config else {}), "seed": seed})
    t0 = time.perf_counter()
    try:
        mapping, stats = solve(algorithm, scenario.workflow, scenario.cluster, weights, trace, seed, cfg)
    except CapExceededError as exc:
        return BenchRecord(scenario.name, algorithm, seed, repetition, None, None, None,
                           time.perf_counter() - t0, "capped", detail=str(exc))  # fmt: skip
    except (InfeasibleError, MappingError) as exc:
        return BenchRecord(scenario.name, algorithm, seed, repetition, None, None, None,
                           time.perf_counter() - t0, "infeasible", detail=str(exc))  # fmt: skip
    runtime = time.perf_counter() - t0
    schedule = derive_schedule(scenario.workflow, scenario.cluster, mapping)
    report = objective(schedule, scenario.cluster, trace, weights)
    violations = validate_schedule(scenario.workflow, scenario.cluster, schedule)
    status = "ok" if not violations else "invalid"
    detail = "; ".join(map(str, violations))
    return BenchRecord(
        scenario.name, algorithm, seed, repetition,
        report.makespan, report.energy, report.carbon, runtime, status, stats, schedule, detail,
    )  # fmt: skip


def run_bench(
    scenarios: Sequence[Scenario],
    algorithms: Sequence[str],
    weights: Weights | None = None,
    trace: CarbonTrace | None = None,
    repetitions: int = 1,
    workers: int = 1,
    config: HeuristicConfig | None = None,
    schedules_dir: Path | None = None,
) -> list[BenchRecord]:
    """One record per (scenario, algorithm, repetition), in that nesting order.

    Repetition ``r`` uses seed ``scenario.seed + r``.  With ``workers > 1``
    runs go through a thread pool; the result order does not depend on it.
    Solver failures become records with status ``capped`` or ``infeasible``.
    """
    if not scenarios or not algorithms:
        raise ValueError("run_bench needs at least one scenario and one algorithm")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    weights = weights or Weights()
    jobs = [(s, a, r) for s in scenarios for a in algorithms for r in range(repetitions)]
    if workers <= 1:
        records = [_run_one(s, a, r, weights, trace, config) for s, a, r in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, s, a, r, weights, trace, config) for s, a, r in jobs]
            records = [f.result() for f in futures]
    if schedules_dir is not None:
        write_schedules(records, schedules_dir)
    return records


def schedule_filename(record: BenchRecord) -> str:
    return f"{record.scenario}__{record.algorithm}__r{record.repetition}.csv"


def write_schedules(records: Sequence[BenchRecord], directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for rec in records:
        if rec.schedule is not None:
            (directory / schedule_filename(rec)).write_text(schedule_to_csv(rec.schedule), encoding="utf-8")


def _fmt(x: float | int | None) -> str:
    return "" if x is None else repr(x)


def emit_csv(records: Sequence[BenchRecord]) -> str:
    """Benchmark table, rows sorted by scenario, algorithm, repetition.

    Search statistics trail the fixed columns and are empty for heuristics.
    Floats use ``repr`` so values round-trip exactly.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in sorted(records, key=lambda r: (r.scenario, r.algorithm, r.repetition)):
        w.writerow(
            (
                r.scenario,
                r.algorithm,
                r.seed,
                _fmt(r.makespan),
                _fmt(r.energy),
                _fmt(r.carbon),
                _fmt(r.runtime_s),
                r.status,
                _fmt(r.stats.nodes_explored if r.stats and r.algorithm == "bnb" else None),
                _fmt(r.stats.nodes_pruned if r.stats and r.algorithm == "bnb" else None),
            )
        )
    return buf.getvalue()


def parse_sizes(spec: str, node_cap: int = 100) -> list[tuple[int, int]]:
    """``"10,100,1000"`` -> [(10, 10), (100, 100), (1000, 100)]; ``"50x8"`` is explicit."""
    sizes = []
    for item in spec.split(","):
        item = item.strip().lower()
        if "x" in item:
            t, n = item.split("x", 1)
            sizes.append((int(t), int(n)))
        else:
            t = int(item)
            sizes.append((t, min(t, node_cap)))
    return sizes


def sweep_scenarios(sizes: Sequence[tuple[int, int]], density: float, seed: int = 1) -> list[Scenario]:
    return [gen_random_instance(t, n, density, seed) for t, n in sizes]


def total_runtime(records: Sequence[BenchRecord], algorithm: str) -> float:
    return math.fsum(r.runtime_s for r in records if r.algorithm == algorithm)
