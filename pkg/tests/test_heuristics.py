import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import small_instance
from wfsched.derive import Instance, Mapping, Weights, check_mapping, derive_schedule, objective, validate_schedule
from wfsched.errors import ConfigError, InfeasibleError
from wfsched.exact import enumerate_optimal
from wfsched.heuristics import (
    HeuristicConfig,
    aco_map,
    ga_map,
    heft_map,
    heft_rank,
    olb_map,
    pso_map,
    sa_map,
)
from wfsched.heuristics.heft import _earliest_slot
from wfsched.model import ClusterSpec, DependencyEdge, NodeSpec, Task, Workflow, load_fixture
from wfsched.twin import CarbonTrace

STOCHASTIC = {"sa": sa_map, "ga": ga_map, "pso": pso_map, "aco": aco_map}
SMALL_BUDGET = HeuristicConfig(iterations=15, population=6)


def makespan(wf, cl, mapping):
    return derive_schedule(wf, cl, mapping).makespan


def naive_rank(wf, cl, tid):
    """Upward rank straight from its recursive definition, no memoisation."""
    mean_inv = sum(1 / n.speed for n in cl.nodes) / len(cl.nodes)
    succ = [e for e in wf.edges if e.src == tid]
    tail = max((e.data / cl.bandwidth + naive_rank(wf, cl, e.dst) for e in succ), default=0.0)
    return wf.task_by_id[tid].work * mean_inv + tail


def identical_nodes(k):
    return ClusterSpec(tuple(NodeSpec(f"N{i}", 1, 16, "hpc", 100, 10) for i in range(1, k + 1)), 1)


# -- HEFT ----------------------------------------------------------------------


def test_rank_chain3():
    wf, cl = load_fixture("chain3")
    ranks = heft_rank(wf, cl).ranks
    assert ranks == {"A": 13.0, "B": 8.0, "C": 4.5}
    assert ranks == {t: naive_rank(wf, cl, t) for t in "ABC"}


def test_rank_single():
    wf, cl = load_fixture("single")
    assert heft_rank(wf, cl)["T"] == 5.0


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**40))
def test_rank_strictly_decreases_along_edges(seed):
    wf, cl = small_instance(seed, max_tasks=9, max_nodes=4)
    ranks = heft_rank(wf, cl).ranks
    for t in wf.tasks:
        assert ranks[t.id] == pytest.approx(naive_rank(wf, cl, t.id), rel=1e-12)
    assert all(ranks[e.src] > ranks[e.dst] for e in wf.edges)
    sinks = {t.id for t in wf.tasks} - {e.src for e in wf.edges}
    mean_inv = sum(1 / n.speed for n in cl.nodes) / len(cl.nodes)
    for s in sinks:
        assert ranks[s] == pytest.approx(wf.task_by_id[s].work * mean_inv, rel=1e-12)


def test_heft_chain3():
    wf, cl = load_fixture("chain3")
    m = heft_map(wf, cl)
    assert m.assignment == dict.fromkeys("ABC", "N2")
    assert makespan(wf, cl, m) == 6.0


def test_heft_independent_tasks_spread():
    wf = Workflow((Task("A", 3.0), Task("B", 3.0)))
    m = heft_map(wf, identical_nodes(2))
    assert m["A"] != m["B"]


def test_insertion_slot_search():
    starts, finishes = [0.0, 5.0], [2.0, 8.0]
    assert _earliest_slot(starts, finishes, 1.0, 3.0) == 2.0  # gap [2, 5)
    assert _earliest_slot(starts, finishes, 1.0, 3.5) == 8.0  # too long for the gap
    assert _earliest_slot(starts, finishes, 9.0, 1.0) == 9.0
    assert _earliest_slot([], [], 0.5, 1.0) == 0.5


def test_heft_inserts_into_gap():
    # A -> N1 [0,2), B -> N2 [0,2); C waits for B's data until 6 and ties onto
    # N1 [6,9), leaving N1 idle on [2,6).  D finishes at 3 either in that gap
    # or on N2; the tie goes to N1, which is only reachable by insertion.
    wf = Workflow(
        (Task("A", 2.0), Task("B", 2.0), Task("C", 3.0), Task("D", 1.0)),
        (DependencyEdge("A", "C", 4.0), DependencyEdge("B", "C", 4.0)),
    )
    assert heft_rank(wf, identical_nodes(2)).ranks == {"A": 9.0, "B": 9.0, "C": 3.0, "D": 1.0}
    m = heft_map(wf, identical_nodes(2))
    assert m.assignment == {"A": "N1", "B": "N2", "C": "N1", "D": "N1"}


def test_heft_single():
    wf, cl = load_fixture("single")
    assert heft_map(wf, cl).assignment == {"T": "N1"}


# -- OLB -----------------------------------------------------------------------


def test_olb_chain3():
    wf, cl = load_fixture("chain3")
    m = olb_map(wf, cl)
    assert m.assignment == {"A": "N1", "B": "N2", "C": "N1"}
    s = derive_schedule(wf, cl, m)
    assert (s.entries["B"].start, s.entries["C"].start) == (6.0, 9.0)
    assert s.makespan == 15.0


@pytest.mark.parametrize("k", [1, 2, 5])
def test_olb_rotates_over_identical_nodes(k):
    wf = Workflow(tuple(Task(f"T{i}", 2.0) for i in range(k)))
    m = olb_map(wf, identical_nodes(k))
    assert sorted(m.assignment.values()) == sorted(f"N{i}" for i in range(1, k + 1))


def test_olb_single():
    wf, cl = load_fixture("single")
    assert olb_map(wf, cl).assignment == {"T": "N1"}


# -- stochastic mappers --------------------------------------------------------


@pytest.mark.parametrize("name", STOCHASTIC)
def test_single_fixture(name):
    wf, cl = load_fixture("single")
    for seed in (0, 1, 99):
        assert STOCHASTIC[name](wf, cl, config=HeuristicConfig(seed=seed)).assignment == {"T": "N1"}


@pytest.mark.parametrize(
    "name, config",
    [
        ("sa", HeuristicConfig(seed=42, iterations=500)),
        ("ga", HeuristicConfig(seed=7, population=20, iterations=50)),
        ("pso", HeuristicConfig(seed=3, population=15, iterations=60)),
        ("aco", HeuristicConfig(seed=11, population=10, iterations=40)),
    ],
)
def test_chain3_bounded_by_optimum(name, config):
    wf, cl = load_fixture("chain3")
    m = STOCHASTIC[name](wf, cl, config=config)
    s = derive_schedule(wf, cl, m)
    assert validate_schedule(wf, cl, s) == []
    assert s.makespan >= 6.0


@pytest.mark.parametrize("name", STOCHASTIC)
def test_same_seed_same_mapping(name):
    wf, cl = small_instance(1234, max_tasks=6, max_nodes=3)
    cfg = HeuristicConfig(seed=2024)
    assert STOCHASTIC[name](wf, cl, config=cfg) == STOCHASTIC[name](wf, cl, config=cfg)


def test_ga_elitism_keeps_cloned_optimum():
    wf, cl = load_fixture("diamond4")
    opt, _, _ = enumerate_optimal(wf, cl)
    m = ga_map(wf, cl, config=HeuristicConfig(seed=5, iterations=30), initial_population=[opt] * 10)
    assert m == opt


def test_pso_frozen_dynamics_returns_start_point():
    wf, cl = load_fixture("chain3")
    cfg = HeuristicConfig(seed=1, iterations=25, inertia=0, cognitive=0, social=0)
    point = [0.3, 1.7, 0.9]  # decodes to N1, N2, N1 in topological order A, B, C
    m = pso_map(wf, cl, config=cfg, initial_positions=[point] * 8)
    assert m.assignment == {"A": "N1", "B": "N2", "C": "N1"}


def test_pso_snaps_to_feasible_node():
    cl = ClusterSpec(
        (
            NodeSpec("N1", 1, 16, "edge", 100, 10),
            NodeSpec("N2", 1, 16, "hpc", 100, 10),
            NodeSpec("N3", 1, 16, "hpc", 100, 10),
        ),
        1,
    )
    wf = Workflow((Task("A", 1.0, required_class="edge"),))
    cfg = HeuristicConfig(iterations=1, inertia=0, cognitive=0, social=0)
    m = pso_map(wf, cl, config=cfg, initial_positions=[[2.5]])
    assert m.assignment == {"A": "N1"}


def test_aco_concentrated_pheromone_is_followed():
    wf, cl = load_fixture("diamond4")
    # topological order A, B, C, D; cluster order N1, N2
    target = [1, 0, 0, 1]
    tau = [[1.0 if j == target[i] else 0.0 for j in range(2)] for i in range(4)]
    m = aco_map(wf, cl, config=HeuristicConfig(seed=3, iterations=5), initial_pheromone=tau)
    assert m.assignment == {"A": "N2", "B": "N1", "C": "N1", "D": "N2"}


@pytest.mark.parametrize(
    "field, value",
    [
        ("seed", -1),
        ("seed", 2**64),
        ("iterations", 0),
        ("population", 0),
        ("mutation_rate", 1.5),
        ("crossover_rate", -0.1),
        ("inertia", 1.2),
        ("cognitive", 5.0),
        ("social", -1.0),
        ("pheromone_weight", 11.0),
        ("desirability_weight", -2.0),
        ("evaporation", 1.01),
        ("initial_temperature", 0.0),
        ("cooling", 0.0),
        ("cooling", 1.5),
    ],
)
def test_config_ranges(field, value):
    with pytest.raises(ConfigError):
        HeuristicConfig(**{field: value})


@pytest.mark.parametrize("fn", [heft_map, olb_map])
def test_no_feasible_node(fn):
    wf = Workflow((Task("A", 1.0, required_class="gpu"),))
    with pytest.raises(InfeasibleError):
        fn(wf, identical_nodes(2))


@pytest.mark.parametrize("name", STOCHASTIC)
def test_no_feasible_node_stochastic(name):
    wf = Workflow((Task("A", 1.0, mem_demand=100.0),))
    with pytest.raises(InfeasibleError):
        STOCHASTIC[name](wf, identical_nodes(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**40), st.integers(0, 2**63))
def test_every_mapper_is_feasible_and_above_optimum(inst_seed, seed):
    wf, cl = small_instance(inst_seed)
    _, _, best = enumerate_optimal(wf, cl)
    mappings = [heft_map(wf, cl), olb_map(wf, cl)]
    cfg = HeuristicConfig(seed=seed, iterations=15, population=6)
    mappings += [fn(wf, cl, config=cfg) for fn in STOCHASTIC.values()]
    for m in mappings:
        check_mapping(wf, cl, m)
        s = derive_schedule(wf, cl, m)
        assert validate_schedule(wf, cl, s) == []
        assert s.makespan >= best.makespan


def test_energy_weight_changes_what_is_optimised():
    # N2 is twice as fast but burns ten times the power: pure-energy optimum is all-N1
    wf, cl = load_fixture("chain3")
    cl = ClusterSpec((cl.nodes[0], NodeSpec("N2", 2, 16, "hpc", 1000, 500)), cl.bandwidth)
    trace = CarbonTrace.constant(300)
    weights = Weights(0, 1, 0)
    opt, _, best = enumerate_optimal(wf, cl, weights, trace)
    assert opt.assignment == dict.fromkeys("ABC", "N1") and best.weighted == 1200.0
    for name, fn in STOCHASTIC.items():
        m = fn(wf, cl, weights, trace, HeuristicConfig(seed=9))
        r = objective(derive_schedule(wf, cl, m), cl, trace, weights)
        assert r.weighted >= best.weighted, name
        if name in ("sa", "ga"):
            assert m == opt, name


def test_mapping_indices_follow_topological_order():
    wf, cl = load_fixture("diamond4")
    inst = Instance(wf, cl)
    m = Mapping({"A": "N2", "B": "N1", "C": "N2", "D": "N1"})
    assert inst.to_assignment(m) == [1, 0, 1, 0]
    assert inst.to_mapping([1, 0, 1, 0]) == m
