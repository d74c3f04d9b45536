"""Links, curvature conditions, walls and actions on polygonal complexes."""
from fractions import Fraction

import pytest

from app.core.exceptions import InvalidAction, InvalidComplex, TrianglePresent
from app.domain.factories import GroupFactory, PolygonalFactory
from app.domain.polygonal import CurvatureCondition, Verdict, WallKind
from app.services.polygonal.polygonal_service import polygonal_service as ps


def corner(ks):
    """Three polygons around a vertex o, pairwise sharing one edge out of o."""
    vertices = {"o", "x", "y", "z"}
    edges = [("ox", "o", "x"), ("oy", "o", "y"), ("oz", "o", "z")]
    polygons = []
    for (name, a, b), k in zip((("A", "x", "y"), ("B", "y", "z"), ("C", "x", "z")), ks):
        path = [a] + [f"{name}{t}" for t in range(1, k - 2)] + [b]
        vertices.update(path)
        cycle = [(f"o{a}", 1)]
        for t in range(k - 2):
            edges.append((f"{name}e{t}", path[t], path[t + 1]))
            cycle.append((f"{name}e{t}", 1))
        cycle.append((f"o{b}", -1))
        polygons.append((name, cycle))
    return PolygonalFactory.build(sorted(vertices), edges, polygons)


def rotation_action(x, k, shift):
    """Z/(k/shift) rotating the single k-gon by shift sides."""
    n = k // shift
    group = GroupFactory.cyclic(n)
    vertex_maps = {g: {f"v{j}": f"v{(j + g * shift) % k}" for j in range(k)} for g in group.elements()}
    edge_maps = {g: {f"e{j}": (f"e{(j + g * shift) % k}", 1) for j in range(k)} for g in group.elements()}
    return ps.action_from_maps(x, group, vertex_maps, edge_maps)


def torus_translations(n):
    """(Z/n)^2 translating the n x n square torus."""
    group = GroupFactory.direct_product([GroupFactory.cyclic(n), GroupFactory.cyclic(n)])
    vertex_maps, edge_maps = {}, {}
    for g in group.elements():
        a, b = GroupFactory.product_coords([n, n], g)
        vertex_maps[g] = {f"v{i}.{j}": f"v{(i + a) % n}.{(j + b) % n}" for i in range(n) for j in range(n)}
        edge_maps[g] = {
            f"{d}{i}.{j}": (f"{d}{(i + a) % n}.{(j + b) % n}", 1)
            for d in "hu" for i in range(n) for j in range(n)
        }
    return ps.action_from_maps(PolygonalFactory.torus(n, n), group, vertex_maps, edge_maps)


# Validation

def test_open_boundary_rejected():
    with pytest.raises(InvalidComplex):
        PolygonalFactory.build(
            ["a", "b", "c"], [("e", "a", "b"), ("f", "b", "c"), ("g", "a", "c")],
            [("p", [("e", 1), ("f", 1), ("g", 1)])],
        )


def test_digon_rejected():
    with pytest.raises(InvalidComplex):
        PolygonalFactory.build(["a", "b"], [("e", "a", "b"), ("f", "b", "a")], [("p", [("e", 1), ("f", 1)])])


def test_unknown_edge_rejected():
    with pytest.raises(InvalidComplex):
        PolygonalFactory.from_config({
            "vertices": ["a"], "edges": [{"id": "e", "from": "a", "to": "a"}],
            "polygons": [{"id": "p", "cycle": [["e", 1], ["e", 1], ["f", 1]]}],
        })


def test_from_config_numbers_polygons():
    x = PolygonalFactory.from_config({
        "vertices": ["v"], "edges": [{"id": "a", "from": "v", "to": "v"}, {"id": "b", "from": "v", "to": "v"}],
        "polygons": [{"cycle": [["a", 1], ["b", 1], ["a", -1], ["b", -1]]}],
    })
    assert x.polygon_ids() == ("p0",)


# Links and curvature

def test_link_of_square_corner():
    link = ps.link_graph(PolygonalFactory.polygon(4), "v0")
    assert set(link.nodes) == {("e0", 1), ("e3", -1)}
    assert len(link.corners) == 1
    assert set(link.corners[0].ends) == {("e0", 1), ("e3", -1)}


def test_link_of_square_torus_is_a_four_cycle(square_torus):
    link = ps.link_graph(square_torus, "v0.0")
    assert len(link.nodes) == 4
    assert sorted(d for _, d in link.graph().degree()) == [2, 2, 2, 2]


@pytest.mark.parametrize("which,weights,holds,total", [
    (CurvatureCondition.C2, (4, 4, 4), False, Fraction(3, 4)),
    (CurvatureCondition.C2, (4, 8, 8), True, Fraction(1)),
    (CurvatureCondition.C4, (8, 8, 8), True, Fraction(9, 8)),
    (CurvatureCondition.C, (5, 5, 5), False, Fraction(9, 10)),
    (CurvatureCondition.C2, (4, 4, 4, 4), True, Fraction(1)),
])
def test_cycle_values(which, weights, holds, total):
    assert ps.cycle_satisfies(which, weights) == (holds, total)


def test_strict_boundary_case_fails():
    assert ps.cycle_satisfies(CurvatureCondition.C2, (4, 8, 8), strict=True) == (False, Fraction(1))


def test_c4_needs_four_sides():
    assert ps.cycle_satisfies(CurvatureCondition.C4, (3, 8, 8)) == (False, None)


def test_q_counts_cycle_length():
    assert ps.cycle_satisfies(CurvatureCondition.Q, (4, 4, 4, 4))[0]
    assert not ps.cycle_satisfies(CurvatureCondition.Q, (4, 4, 4, 4), strict=True)[0]
    assert not ps.cycle_satisfies(CurvatureCondition.Q, (8, 8, 8))[0]


def test_three_squares_at_a_vertex_fail_c2():
    report = ps.check_condition(corner((4, 4, 4)), "C2")
    assert report.verdict == Verdict.FAIL
    assert report.vertex == "o"
    assert report.total == Fraction(3, 4)
    assert len(report.cycle) == 3


def test_square_and_two_octagons_on_the_boundary():
    x = corner((4, 8, 8))
    assert ps.check_condition(x, "C2").verdict == Verdict.PASS
    report = ps.check_condition(x, "C2", strict=True)
    assert report.verdict == Verdict.FAIL
    assert report.total == Fraction(1)


def test_three_octagons_pass_c4():
    assert ps.check_condition(corner((8, 8, 8)), CurvatureCondition.C4).passed


def test_square_torus_conditions(square_torus):
    for which in CurvatureCondition:
        assert ps.check_condition(square_torus, which).passed
    assert not ps.check_condition(square_torus, "Q", strict=True).passed
    assert not ps.check_condition(square_torus, "C2", strict=True).passed


CORPUS = [
    PolygonalFactory.polygon(3), PolygonalFactory.polygon(4), PolygonalFactory.polygon(6),
    PolygonalFactory.torus(1, 1), PolygonalFactory.torus(2, 2), PolygonalFactory.torus(2, 3),
    corner((4, 4, 4)), corner((4, 8, 8)), corner((6, 6, 6)), corner((5, 5, 5)), corner((8, 8, 8)),
]


@pytest.mark.parametrize("x", CORPUS)
def test_condition_chain(x):
    holds = {which: ps.check_condition(x, which).passed for which in CurvatureCondition}
    if holds[CurvatureCondition.Q]:
        assert holds[CurvatureCondition.C4]
    if holds[CurvatureCondition.C4]:
        assert holds[CurvatureCondition.C2]
    if holds[CurvatureCondition.C2]:
        assert holds[CurvatureCondition.C]


# Walls

def test_square_walls():
    walls = ps.compute_walls(PolygonalFactory.polygon(4))
    assert len(walls) == 4
    assert all(len(w) == 2 for w in walls)
    assert {("e0", 1), ("e2", -1)} in [set(w.oriented_edges) for w in walls]


def test_hexagon_walls_and_ewalls():
    hexagon = PolygonalFactory.polygon(6)
    walls = ps.compute_walls(hexagon)
    assert {("e0", 1), ("e3", -1)} in [set(w.oriented_edges) for w in walls]
    ewalls = ps.compute_ewalls(hexagon)
    assert all(w.kind == WallKind.EVEN for w in ewalls)
    assert {("e0", 1), ("e2", -1)} in [set(w.oriented_edges) for w in ewalls]
    assert sum(len(w) for w in ewalls) == 12


def test_pentagon_partner_starts_opposite():
    pentagon = PolygonalFactory.polygon(5)
    partner = ps.parallel_partner(pentagon.polygons["p"], 0)
    assert partner == ("e2", -1)
    assert pentagon.initial(partner) == "v3"


def test_triangles_have_no_walls():
    with pytest.raises(TrianglePresent):
        ps.compute_walls(PolygonalFactory.polygon(3))


def test_square_wall_is_a_tree():
    wall = ps.wall_of(ps.compute_walls(PolygonalFactory.polygon(4)), ("e0", 1))
    report = ps.geometric_wall(PolygonalFactory.polygon(4), wall)
    assert report.is_tree_like
    assert (report.node_count, report.edge_count) == (3, 2)


def test_one_square_torus_wall_closes_up(square_torus):
    walls = ps.compute_walls(square_torus)
    assert len(walls) == 4
    report = ps.geometric_wall(square_torus, ps.wall_of(walls, ("h0.0", 1)))
    assert not report.acyclic
    assert report.opposite_free


def test_two_by_two_torus_wall_is_a_circle():
    x = PolygonalFactory.torus(2, 2)
    walls = ps.compute_walls(x)
    assert len(walls) == 8
    wall = ps.wall_of(walls, ("h0.0", 1))
    assert wall.oriented_edges == {("h0.0", 1), ("h0.1", 1)}
    report = ps.geometric_wall(x, wall)
    assert (report.node_count, report.edge_count) == (4, 4)
    assert not report.acyclic


def test_restricted_wall_is_a_path():
    x = PolygonalFactory.torus(2, 2)
    wall = ps.wall_of(ps.compute_walls(x), ("h0.0", 1))
    report = ps.geometric_wall(x, ps.restrict_wall(wall, ["s0.0"]))
    assert report.acyclic


def test_empty_wall_graph():
    wall = ps.wall_of(ps.compute_walls(PolygonalFactory.polygon(4)), ("e0", 1))
    empty = wall.model_copy(update={"pairs": ()})
    report = ps.geometric_wall(PolygonalFactory.polygon(4), empty)
    assert (report.node_count, report.edge_count) == (0, 0)
    assert report.acyclic


# Subdivision

def test_square_subdivision():
    counts = ps.barycentric_subdivision(PolygonalFactory.polygon(4)).counts()
    assert counts == {"V0": 4, "V1": 4, "V2": 1, "E01": 8, "E02": 4, "E12": 4, "F": 8}


def test_hexagon_subdivision():
    assert ps.barycentric_subdivision(PolygonalFactory.polygon(6)).counts()["F"] == 12


def test_edge_subdivision():
    x = PolygonalFactory.build(["a", "b"], [("e", "a", "b")], [])
    counts = ps.barycentric_subdivision(x).counts()
    assert counts["V2"] == 0 and counts["F"] == 0


# Actions

def test_trivial_action_has_no_self_intersection(square_torus):
    action = ps.trivial_action(square_torus)
    for wall in ps.compute_walls(square_torus):
        assert ps.self_intersection(square_torus, action, wall) == []


def test_torus_translates_are_parallel():
    x = PolygonalFactory.torus(2, 2)
    action = torus_translations(2)
    for wall in ps.compute_walls(x):
        assert ps.self_intersection(x, action, wall) == []


def test_half_turn_crosses_the_wall():
    x = PolygonalFactory.polygon(4)
    action = rotation_action(x, 4, 2)
    wall = ps.wall_of(ps.compute_walls(x), ("e0", 1))
    assert ps.self_intersection(x, action, wall) == [1]
    assert ps.bad_elements(x, action, wall) == [1]


def test_rotation_maps_polygon_to_itself():
    x = PolygonalFactory.polygon(4)
    action = rotation_action(x, 4, 1)
    assert action[1].polygons["p"] == ("p", 1)


def test_incidence_breaking_map_rejected():
    x = PolygonalFactory.polygon(4)
    group = GroupFactory.cyclic(2)
    vertex_maps = {0: {f"v{j}": f"v{j}" for j in range(4)}, 1: {f"v{j}": f"v{j}" for j in range(4)}}
    edge_maps = {0: {f"e{j}": (f"e{j}", 1) for j in range(4)}, 1: {f"e{j}": (f"e{(j + 2) % 4}", 1) for j in range(4)}}
    with pytest.raises(InvalidAction):
        ps.action_from_maps(x, group, vertex_maps, edge_maps)
