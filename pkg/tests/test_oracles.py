from fractions import Fraction

import numpy as np
import pytest

from bplp.factor_graph import build_graph, degree_eq
from bplp.generators import GenOptions, gen
from bplp.oracles import (
    CapExceeded,
    InfeasibleDemand,
    MapStatus,
    NoPerfectMatching,
    PolytopeDescription,
    PolytopeRow,
    Relation,
    Unreachable,
    box_rows,
    brute_force_map,
    dijkstra,
    enumerate_vertices,
    flow_oracle,
    lemma1_constant,
    matching_oracle,
    polytope_from_graph,
)
from bplp.problems import ProblemKind, build_gm, lp_polytope

from conftest import diamond_flow, edge, four_cycle, instance, k4_with_blossom, three_node_path, triangle

HALF = Fraction(1, 2)


def test_brute_force_map_unique(two_var_graph):
    found = brute_force_map(two_var_graph)
    assert found.status is MapStatus.UNIQUE
    assert found.assignment == (1, 0)
    assert found.value == 1


def test_brute_force_map_reports_ties():
    graph = build_graph(2, [2.0, 2.0], "minimize", [degree_eq([0, 1], 1)])
    found = brute_force_map(graph)
    assert found.status is MapStatus.TIED
    assert found.assignments == ((0, 1), (1, 0))
    assert found.assignment is None


def test_brute_force_map_uses_exact_weights():
    graph = build_graph(2, [1.0, 1.0], "minimize", [degree_eq([0, 1], 1)])
    found = brute_force_map(graph, [Fraction(1), Fraction(1) + Fraction(1, 10**12)])
    assert found.assignment == (1, 0)


def test_brute_force_map_infeasible_and_cap():
    factors = [degree_eq([0, 1], 1), degree_eq([1, 2], 1), degree_eq([0, 2], 1)]
    graph = build_graph(3, [1.0] * 3, "minimize", factors)
    assert brute_force_map(graph).status is MapStatus.INFEASIBLE
    with pytest.raises(CapExceeded):
        brute_force_map(graph, max_vars=2)


def test_polytope_from_graph_rows(two_var_graph):
    poly = polytope_from_graph(two_var_graph)
    assert poly.dim == 2
    assert [row.relation for row in poly.rows] == [Relation.EQ] + [Relation.GE] * 4
    assert poly.objective == (1, 3)


def test_enumerate_vertices_of_triangle_matching():
    found = enumerate_vertices(lp_polytope(triangle()))
    assert found.vertices == ((HALF, HALF, HALF),)
    assert found.optimum == Fraction(3, 2)


def test_enumerate_vertices_of_shortest_path():
    found = enumerate_vertices(lp_polytope(three_node_path()))
    assert set(found.vertices) == {(0, 0, 1), (1, 1, 0)}
    assert found.optimal_vertices == [(1, 1, 0)]


def test_enumerate_vertices_cap():
    with pytest.raises(CapExceeded):
        enumerate_vertices(lp_polytope(four_cycle()), max_dim=3)


@pytest.mark.parametrize("kind", ["perfect_matching", "edge_cover"])
def test_four_node_polytopes_are_half_integral(kind):
    pairs = [(0, 1), (1, 2), (2, 0), (2, 3)]
    inst = instance(kind, 4, [edge(u, v, w) for (u, v), w in zip(pairs, (1, 2, 3, 4))])
    found = enumerate_vertices(lp_polytope(inst))
    assert found.vertices
    for vertex in found.vertices:
        assert all(value in (0, HALF, 1) for value in vertex)


def test_midpoint_of_tied_optima_stays_feasible():
    poly = lp_polytope(four_cycle(weights=(1, 1, 1, 1)))
    found = enumerate_vertices(poly)
    optima = found.optimal_vertices
    assert sorted(optima) == [(0, 1, 0, 1), (1, 0, 1, 0)]
    midpoint = tuple((a + b) / 2 for a, b in zip(*optima))
    assert poly.contains(midpoint)
    assert poly.value(midpoint) == found.optimum


@pytest.mark.slow
@pytest.mark.parametrize("kind", [ProblemKind.PERFECT_MATCHING, ProblemKind.EDGE_COVER])
def test_random_degree_polytopes_are_half_integral(kind):
    checked = 0
    seed = 0
    while checked < 50:
        inst = gen(kind, GenOptions(nodes=4 + 2 * (seed % 2), density=0.4), seed=seed)
        seed += 1
        poly = lp_polytope(inst)
        if poly.dim > 10 or len(poly.rows) > 24:
            continue
        checked += 1
        for vertex in enumerate_vertices(poly).vertices:
            assert all(value in (0, HALF, 1) for value in vertex), (seed - 1, vertex)


def _random_polytope(rng):
    dim = int(rng.integers(2, 5))
    rows = box_rows(dim)
    for _ in range(int(rng.integers(1, 5))):
        coeffs = tuple(int(c) for c in rng.integers(-2, 3, size=dim))
        # (½, …, ½) 始终可行
        rows.append(PolytopeRow(coeffs, Relation.GE, sum(coeffs) // 2))
    return PolytopeDescription(dim=dim, rows=tuple(rows), objective=(Fraction(1),) * dim)


def test_vertices_are_not_midpoints():
    rng = np.random.default_rng(8)
    for _ in range(50):
        poly = _random_polytope(rng)
        vertices = enumerate_vertices(poly).vertices
        assert vertices
        vertex_set = set(vertices)
        for i, a in enumerate(vertices):
            for b in vertices[i + 1 :]:
                assert tuple((x + y) / 2 for x, y in zip(a, b)) not in vertex_set
            for other in vertices:
                if other != a:
                    assert not poly.contains(tuple(2 * x - y for x, y in zip(a, other)))


def _box(dim):
    return PolytopeDescription(dim=dim, rows=tuple(box_rows(dim)), objective=(Fraction(1),) * dim)


def test_lemma1_constant_on_boxes():
    assert lemma1_constant(_box(1)) == 1
    assert lemma1_constant(_box(2)) == 2


def test_lemma1_constant_ignores_row_order_and_duplicates():
    poly = lp_polytope(triangle())
    reference = lemma1_constant(poly, max_rows=24)
    reversed_rows = PolytopeDescription(poly.dim, tuple(reversed(poly.rows)), poly.objective, poly.sense)
    duplicated = PolytopeDescription(poly.dim, poly.rows + poly.rows[-2:], poly.objective, poly.sense)
    assert lemma1_constant(reversed_rows, max_rows=24) == reference
    assert lemma1_constant(duplicated, max_rows=24) == reference
    assert reference >= 1


def test_dijkstra_shortest_path():
    found = dijkstra(three_node_path())
    assert found.edges == (0, 1)
    assert found.cost == 2
    assert not found.tie


def test_dijkstra_reports_ties_and_unreachable():
    tied = instance("shortest_path", 2, [edge(0, 1, 1, True), edge(0, 1, 1, True)], source=0, sink=1)
    found = dijkstra(tied)
    assert found.edges == (0,)
    assert found.tie
    cut = instance("shortest_path", 3, [edge(0, 1, 1, True), edge(2, 1, 1, True)], source=0, sink=2)
    with pytest.raises(Unreachable):
        dijkstra(cut)


def test_matching_oracle():
    found = matching_oracle(k4_with_blossom())
    assert found.matchings == ((2, 4),)
    assert found.value == 8
    assert not found.tie
    tied = matching_oracle(four_cycle(weights=(1, 1, 1, 1)))
    assert tied.tie
    with pytest.raises(NoPerfectMatching):
        matching_oracle(triangle())
    with pytest.raises(CapExceeded):
        matching_oracle(four_cycle(), max_nodes=2)


def test_flow_oracle():
    found = flow_oracle(diamond_flow())
    assert found.flows == (1, 1, 0, 0)
    assert found.cost == Fraction(11, 10)


def test_flow_oracle_two_units_use_both_routes():
    inst = diamond_flow()
    found = flow_oracle(instance("network_flow", 4, inst.edges, demands=(2, 0, 0, -2), capacities=(1, 1, 1, 1)))
    assert found.flows == (1, 1, 1, 1)
    assert found.cost == Fraction(41, 10)


def test_flow_oracle_rejects_excess_demand():
    inst = diamond_flow()
    with pytest.raises(InfeasibleDemand):
        flow_oracle(instance("network_flow", 4, inst.edges, demands=(3, 0, 0, -3), capacities=(1, 1, 1, 1)))


def test_map_agrees_with_lp_when_integral(path_bundle):
    found = brute_force_map(path_bundle.graph, path_bundle.weights)
    vertices = enumerate_vertices(polytope_from_graph(path_bundle.graph, path_bundle.weights))
    assert vertices.optimal_vertices == [found.assignment]


def test_vertex_cover_dual_polytope_uses_budget_box():
    inst = instance("vertex_cover_dual", 2, [edge(0, 1, 1)], budgets=(2, 1))
    poly = lp_polytope(inst)
    found = enumerate_vertices(poly)
    assert found.optimum == 1
    graph = build_gm(inst).graph
    assert brute_force_map(graph).value == 2
