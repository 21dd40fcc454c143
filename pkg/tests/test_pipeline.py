import random

import numpy as np
import pytest

from obsnet import (
    DesignSolution,
    GraphFormatError,
    InfeasibleError,
    PhysicalGraph,
    StructuralPair,
    backbone_shortest_paths,
    brute_force_min_structure,
    build_dynamic_graph,
    design,
    evaluate_cost,
    robust_structural_observability,
    shift_weights,
)
from obsnet.graph import Role

from _instances import dense_feasible, random_feasible, t1, t2, t3


def test_backbone_routes():
    g = PhysicalGraph.build(["x1"], ["q1", "q2", "q3"], "z", [("q1", "q2", 1), ("q2", "z", 1), ("q1", "z", 3)])
    r = backbone_shortest_paths(g)
    assert r.dist[g.node("q1")] == 2_000_000
    assert [g.name(e.head) for e in r.route(g.node("q1"))] == ["q2", "z"]
    assert g.node("q3") not in r.dist
    assert backbone_shortest_paths(t1()).dist[t1().node("q1")] == 1_000_000


def test_dynamic_graph_t1():
    g = t1()
    gd = build_dynamic_graph(g, backbone_shortest_paths(g))
    assert [o.name for o in gd.outputs] == ["y_(x1,q1)"]
    assert [(gd.name(e.tail), gd.name(e.head), e.cost) for e in gd.edges] == [
        ("x1", "y_(x1,q1)", 2_000_000),
        ("y_(x1,q1)", "z", 1_000_000),
    ]
    sh = shift_weights(gd)
    assert [e.cost for e in sh.edges] == [3_000_000, 0]
    assert sum(e.cost for e in sh.edges) == sum(e.cost for e in gd.edges)


def test_one_output_per_sensor_backbone_link():
    g = t2()
    gd = build_dynamic_graph(g, backbone_shortest_paths(g))
    assert len(gd.outputs) == 2 and {o.source_sensor for o in gd.outputs} == {g.node("x1")}


def test_unreachable_backbone_named():
    g = PhysicalGraph.build(["x1"], ["q1", "q2"], "z", [("x1", "q2", 1), ("q1", "z", 1)])
    with pytest.raises(InfeasibleError, match="q2"):
        build_dynamic_graph(g, backbone_shortest_paths(g))


def test_zero_cost_route_leaves_weight():
    g = PhysicalGraph.build(["x1"], ["q1"], "z", [("x1", "q1", 4), ("q1", "z", 0)])
    sh = shift_weights(build_dynamic_graph(g, backbone_shortest_paths(g)))
    assert sh.edges[0].cost == 4_000_000


def test_design_t1():
    sol = design(t1(), 0)
    assert sol.structure.a_pattern.tolist() == [[1]]
    assert sol.structure.c_pattern.tolist() == [[1]]
    assert sol.cost_per_output_sum == 3_000_000


def test_design_t2():
    sol = design(t2(), 1)
    assert sol.used_rows == [0, 1]
    assert sol.cost_per_output_sum == 9_000_000


def test_design_t3():
    g = t3()
    sol = design(g, 0)
    assert sol.structure.a_pattern.tolist() == [[1, 1], [0, 1]]
    assert sol.structure.c_pattern.tolist() == [[1, 0]]
    assert sol.cost_per_output_sum == 4_000_000


def test_design_infeasible_k():
    with pytest.raises(InfeasibleError) as err:
        design(t1(), 1)
    assert err.value.sensor == "x1"


def test_no_outputs_at_all():
    g = PhysicalGraph.build(["x1"], ["q1"], "z", [("q1", "z", 1)])
    with pytest.raises(InfeasibleError):
        design(g, 0)


def test_evaluate_cost_examples():
    g = t1()
    rep = evaluate_cost(g, design(g, 0).structure)
    assert (rep.per_output_sum, rep.deduplicated) == (3_000_000, 3_000_000)
    assert rep.used_edges == {0, 1}


def test_shared_backbone_edge_counted_once():
    g = PhysicalGraph.build(
        ["x1", "x2"], ["q1", "q2"], "z",
        [("x1", "q1", 2), ("x2", "q2", 2), ("q1", "q2", 1), ("q2", "z", 1)],
    )
    s = StructuralPair(np.eye(2, dtype=np.uint8), np.array([[1, 0], [0, 1]], dtype=np.uint8))
    rep = evaluate_cost(g, s)
    # x1 pays q1->q2->z, x2 pays q2->z; q2->z appears in both routes
    assert rep.per_output_sum == 7_000_000
    assert rep.deduplicated == rep.per_output_sum - 1_000_000


def test_single_output_with_loops():
    g = t2()
    s = StructuralPair(np.eye(1, dtype=np.uint8), np.array([[0], [1]], dtype=np.uint8))
    assert evaluate_cost(g, s).per_output_sum == 6_000_000


def test_json_round_trip_and_corruption():
    sol = design(t3(), 0)
    back = DesignSolution.from_json(sol.to_json())
    assert back == sol
    bad = sol.to_dict()
    bad["c_pattern"] = [[1, 1]]
    with pytest.raises(GraphFormatError):
        DesignSolution.from_dict(bad)


def test_both_cost_readings_reported():
    sol = design(t1(), 0)
    assert "cost_per_output_sum 3.0" in sol.summary() and "cost_deduplicated 3.0" in sol.summary()


@pytest.mark.parametrize("method", ["matroid", "lp"])
def test_design_matches_brute_force(method):
    rng = random.Random(31)
    for i in range(40):
        k = i % 2
        g = random_feasible(rng, k)
        want = brute_force_min_structure(g, k)
        assert design(g, k, method).cost_per_output_sum == want.cost


def test_design_invariants():
    rng = random.Random(12)
    for i in range(30):
        k = i % 3
        g = dense_feasible(rng, rng.randint(1, 7), 3, k)
        sol = design(g, k)
        s = sol.structure
        assert all(s.a_pattern[j, j] == 1 for j in range(s.n_states))
        assert sol.cost_per_output_sum >= sol.cost_deduplicated
        for j in range(k + 1):
            assert robust_structural_observability(s, j) is True
        xx = {(e.tail.index, e.head.index) for e in g.sensor_edges}
        for a in range(s.n_states):
            for b in range(s.n_states):
                if a != b and s.a_pattern[a, b]:
                    assert (b, a) in xx
        ids = {e.edge_id: e for e in g.edges}
        assert {ids[i].tail.role for i in sol.used_physical_edges} <= {Role.SENSOR, Role.BACKBONE}
