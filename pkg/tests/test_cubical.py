"""Flag tests, cubical cones, cone products and links."""
import pytest

from app.core.exceptions import ComplexException
from app.domain.complexes import Cube, TypedCubeComplex
from app.domain.factories import ComplexFactory
from app.services.cubical.cubical_service import cubical_service


def point():
    return ComplexFactory.from_facets(["i"], [("i",)])


def edge(a="i", b="j"):
    return ComplexFactory.from_facets([a, b], [(a, b)])


def octahedron():
    pairs = [("a1", "a2"), ("b1", "b2"), ("c1", "c2")]
    facets = [(a, b, c) for a in pairs[0] for b in pairs[1] for c in pairs[2]]
    return ComplexFactory.from_facets([v for pair in pairs for v in pair], facets)


def test_empty_triangle_is_not_flag():
    result = cubical_service.is_flag(ComplexFactory.cycle(3))
    assert not result.is_flag
    assert result.witness == (0, 1, 2)


def test_four_cycle_is_flag(four_cycle):
    assert cubical_service.is_flag(four_cycle).is_flag


def test_octahedron_is_flag():
    assert cubical_service.is_flag(octahedron()).is_flag


def test_cone_on_edge_is_a_square():
    cone = cubical_service.cubical_cone(edge())
    assert cone.cell_counts() == {0: 4, 1: 4, 2: 1}
    types = set(cone.vertex_types.values())
    assert types == {frozenset(), frozenset("i"), frozenset("j"), frozenset("ij")}


def test_cone_on_point_is_an_edge():
    cone = cubical_service.cubical_cone(point())
    assert cone.cell_counts() == {0: 2, 1: 1}


def test_cone_on_six_cycle():
    cone = cubical_service.cubical_cone(ComplexFactory.cycle(6))
    assert len(cone.vertices) == 13
    assert len(cone.cubes_of_dim(2)) == 6


@pytest.mark.parametrize("n", [point(), edge(), ComplexFactory.cycle(4), ComplexFactory.cycle(6),
                               ComplexFactory.from_facets("ijk", ["ijk"])])
def test_cone_cubes_are_type_intervals(n):
    cone = cubical_service.cubical_cone(n)
    assert len(cone.vertices) == len(n.simplices) + 1
    for q in cone.cubes:
        top, bottom = cone.cube_type(q), cone.cube_lower_type(q)
        types = [cone.type_of(v) for v in q.corners]
        assert len(set(types)) == len(types)
        assert all(bottom <= t <= top for t in types)
        assert len(types) == 2 ** len(top - bottom)


def test_cone_boundary_avoids_center():
    cone = cubical_service.cubical_cone(edge())
    boundary = cone.boundary_cubes()
    assert boundary and all(cone.center not in q.corners for q in boundary)


def test_cone_coordinates_support_is_type():
    cone = cubical_service.cubical_cone(ComplexFactory.cycle(4))
    coordinates = cubical_service.cone_coordinates(cone)
    for v, t in cone.vertex_types.items():
        assert coordinates.support(v) == t


def test_point_join_point_gives_square():
    iso = cubical_service.cone_product_iso(point(), ComplexFactory.from_facets(["k"], [("k",)]))
    assert iso.cell_counts == {0: 4, 1: 4, 2: 1}


def test_edge_join_point_gives_cube():
    iso = cubical_service.cone_product_iso(edge(), ComplexFactory.from_facets(["k"], [("k",)]))
    assert iso.vertex_count == 8
    assert iso.cell_counts[3] == 1
    assert frozenset("ijk") in iso.vertex_map.values()


def test_two_point_sets_join_to_four_cycle_cone():
    left = ComplexFactory.discrete(["a", "b"])
    right = ComplexFactory.discrete(["c", "d"])
    iso = cubical_service.cone_product_iso(left, right)
    assert iso.cell_counts[2] == 4


def test_join_needs_disjoint_vertices():
    with pytest.raises(ComplexException):
        cubical_service.join(edge(), edge())


def test_link_of_cone_center_is_the_base():
    cone = cubical_service.cubical_cone(edge())
    link = cubical_service.link_of_vertex(cone, frozenset())
    assert len(link.vertices) == 2
    assert len([s for s in link.simplices if len(s) == 2]) == 1


def test_link_of_square_corner_is_an_edge():
    cone = cubical_service.cubical_cone(edge())
    link = cubical_service.link_of_vertex(cone, frozenset("ij"))
    assert len(link.vertices) == 2
    assert link.dimension == 1


def test_cone_on_four_cycle_is_locally_cat0(four_cycle):
    assert cubical_service.is_locally_cat0(cubical_service.cubical_cone(four_cycle)).is_locally_cat0


def test_three_squares_around_a_corner_are_not_cat0():
    # the cone on an empty triangle: three squares, no filling cube
    cone = cubical_service.cubical_cone(ComplexFactory.cycle(3))
    result = cubical_service.is_locally_cat0(cone)
    assert not result.is_locally_cat0
    assert result.vertex == frozenset()
    assert len(result.clique) == 3


def test_three_squares_by_hand():
    corner = {v: frozenset() for v in ["o", "x", "y", "z", "xy", "yz", "xz"]}
    squares = [("o", "x", "y", "xy"), ("o", "y", "z", "yz"), ("o", "x", "z", "xz")]
    cubes = [Cube(corners=s) for s in squares]
    cubes += [f for q in list(cubes) for f in q.faces() if f.dim < 2]
    x = TypedCubeComplex(vertex_types=corner, cubes=tuple(set(cubes)))
    assert not cubical_service.is_locally_cat0(x, ["o"]).is_locally_cat0


def test_four_cycle_is_thickened_octahedron(four_cycle):
    result = cubical_service.is_thickened_octahedron(four_cycle)
    assert result.is_thickened_octahedron
    assert sorted(len(f) for f in result.factors) == [2, 2]


def test_six_cycle_is_not_thickened_octahedron():
    assert not cubical_service.is_thickened_octahedron(ComplexFactory.cycle(6)).is_thickened_octahedron


def test_simplex_is_join_of_points():
    result = cubical_service.is_thickened_octahedron(ComplexFactory.from_facets("ijk", ["ijk"]))
    assert result.is_thickened_octahedron
    assert len(result.factors) == 3


def test_octahedron_factors_imply_flag():
    n = octahedron()
    assert cubical_service.is_thickened_octahedron(n).is_thickened_octahedron
    assert cubical_service.is_flag(n).is_flag
