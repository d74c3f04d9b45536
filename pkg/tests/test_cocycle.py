"""Cochain algebra, wall fields and killing cocycles in covers."""
import random

import pytest

from app.core.exceptions import InconsistentWallField, InvalidComplex, SelfIntersecting, WallNotTree
from app.domain.cochains import CoverMethod, ExtensionVerdict
from app.domain.factories import GroupFactory, PolygonalFactory
from app.domain.groups import FiniteAbelian
from app.services.cocycle.cocycle_service import cocycle_service as cs
from app.services.cocycle.cocycle_service import solve_mod
from app.services.polygonal.polygonal_service import polygonal_service as ps

Z2 = FiniteAbelian(torsion=(2,))
Z3 = FiniteAbelian(torsion=(3,))


@pytest.fixture
def strip():
    """Three squares in a row; the vertical edges r0..r3 are dual to one wall."""
    vertices = [f"{row}{i}" for row in "lu" for i in range(4)]
    edges = [(f"r{i}", f"l{i}", f"u{i}") for i in range(4)]
    edges += [(f"b{i}", f"l{i}", f"l{i + 1}") for i in range(3)]
    edges += [(f"t{i}", f"u{i}", f"u{i + 1}") for i in range(3)]
    polygons = [
        (f"s{i}", [(f"b{i}", 1), (f"r{i + 1}", 1), (f"t{i}", -1), (f"r{i}", -1)])
        for i in range(3)
    ]
    return PolygonalFactory.build(vertices, edges, polygons, name="strip")


@pytest.fixture
def vertical_wall(strip):
    return ps.wall_of(ps.compute_walls(strip), ("r0", 1))


@pytest.fixture
def torus_double_cover(square_torus):
    return cs.build_cover(square_torus, GroupFactory.cyclic(2), {"h0.0": 1, "u0.0": 0})


def test_vertical_wall_is_a_path(strip, vertical_wall):
    assert vertical_wall.edges == {"r0", "r1", "r2", "r3"}
    assert ps.geometric_wall(strip, vertical_wall).is_tree_like


@pytest.mark.parametrize("coefficients,expected", [
    (Z2, [0, 1, 1, 0]),
    (Z3, [0, 2, 2, 1]),
])
def test_wall_field_propagation(strip, vertical_wall, coefficients, expected):
    c = cs.cocycle(coefficients, {"s0": 1, "s1": 0, "s2": 1})
    solution = cs.solve_wall_field(strip, c, vertical_wall, "r0", 0)
    assert [solution.cochain.value(f"r{i}")[0] for i in range(4)] == expected
    assert cs.field_holds(strip, c, vertical_wall, solution.cochain)


def test_field_solutions_one_per_seed(strip, vertical_wall):
    c = cs.cocycle(Z2, {"s0": 1, "s2": 1})
    solutions = cs.field_solutions(strip, c, vertical_wall, "r0")
    assert [s.seed_value for s in solutions] == [(0,), (1,)]
    assert [solutions[1].cochain.value(f"r{i}")[0] for i in range(4)] == [1, 0, 0, 1]


def test_seed_must_be_dual(strip, vertical_wall):
    c = cs.cocycle(Z2, {"s0": 1})
    with pytest.raises(InconsistentWallField):
        cs.solve_wall_field(strip, c, vertical_wall, "b0", 0)


def test_cyclic_wall_rejected_unless_tolerant(square_torus):
    c = cs.cocycle(Z2, {"s0.0": 1})
    wall = ps.wall_of(ps.compute_walls(square_torus), ("u0.0", 1))
    with pytest.raises(WallNotTree):
        cs.solve_wall_field(square_torus, c, wall, "u0.0", 0)
    with pytest.raises(InconsistentWallField):
        cs.solve_wall_field(square_torus, c, wall, "u0.0", 0, tolerant=True)


def test_coboundary_of_strip(strip):
    u = cs.cochain(Z3, {"r1": 1, "b0": 2})
    du = cs.coboundary(strip, u)
    assert du.value("s0") == (0,)
    assert du.value("s1") == (2,)
    assert du.value("s2") == (0,)


def test_kill_along_wall(strip, vertical_wall):
    c = cs.cocycle(Z2, {"s0": 1, "s2": 1})
    killed, u = cs.kill_along_wall(strip, c, [vertical_wall])
    assert killed.is_zero()
    assert u.support() <= vertical_wall.edges


def test_kill_along_crossing_walls_rejected(strip, vertical_wall):
    horizontal = ps.wall_of(ps.compute_walls(strip), ("b1", 1))
    c = cs.cocycle(Z2, {"s1": 1})
    with pytest.raises(SelfIntersecting):
        cs.kill_along_wall(strip, c, [vertical_wall, horizontal])


def test_action_commutes_with_coboundary(square_torus):
    group = GroupFactory.direct_product([GroupFactory.cyclic(2), GroupFactory.cyclic(2)])
    cover = cs.build_cover(square_torus, group, {"h0.0": 2, "u0.0": 1})
    x, action = cover.cover, cover.action
    rng = random.Random(7)
    for _ in range(5):
        u = cs.cochain(Z3, {e: rng.randrange(3) for e in x.edges})
        for g in action.elements():
            assert cs.equal_cocycles(x, cs.coboundary(x, cs.act(x, action, g, u)), cs.act(x, action, g, cs.coboundary(x, u)))


def test_cover_shape(torus_double_cover):
    x = torus_double_cover.cover
    assert torus_double_cover.degree == 2
    assert (len(x.vertices), len(x.edges), len(x.polygons)) == (2, 4, 2)


def test_cover_needs_closed_voltages(strip):
    voltages = {e: 0 for e in strip.edges} | {"r1": 1}
    with pytest.raises(InvalidComplex):
        cs.build_cover(strip, GroupFactory.cyclic(2), voltages)


def test_lift_copies_values(torus_double_cover):
    lifted = cs.lift(torus_double_cover, cs.cocycle(Z2, {"s0.0": 1}))
    assert lifted.value(("s0.0", 0)) == lifted.value(("s0.0", 1)) == (1,)


def test_base_kill_fails(square_torus):
    report = cs.kill_in_cover(cs.trivial_cover(square_torus), cs.cocycle(Z2, {"s0.0": 1}))
    assert not report.success
    assert report.method == CoverMethod.NONE
    assert not report.surviving.is_zero()
    assert report.obstructions
    extension = cs.extension_report(report)
    assert extension.verdict == ExtensionVerdict.UNRESOLVED


def test_double_cover_kills(torus_double_cover):
    c = cs.cocycle(Z2, {"s0.0": 1})
    report = cs.kill_in_cover(torus_double_cover, c)
    assert report.success
    assert report.method == CoverMethod.WALLS
    assert report.degree == 2
    x = torus_double_cover.cover
    check = cs.add_cocycles(cs.coboundary(x, report.certificate), cs.lift(torus_double_cover, c))
    assert check.is_zero()
    extension = cs.extension_report(report)
    assert extension.verdict == ExtensionVerdict.SPLITS
    assert extension.index == 2


def test_zero_cocycle_is_trivially_killed(torus_double_cover):
    report = cs.kill_in_cover(torus_double_cover, cs.cocycle(Z2, {}))
    assert report.success
    assert report.method == CoverMethod.TRIVIAL


def test_linear_fallback_on_strip(strip):
    c = cs.cocycle(Z3, {"s0": 1, "s1": 2, "s2": 1})
    u = cs.solve_coboundary(strip, c)
    assert u is not None
    assert cs.equal_cocycles(strip, cs.coboundary(strip, u), c)


@pytest.mark.parametrize("matrix,rhs,n", [
    ([[2]], [2], 4),
    ([[1, 1], [0, 3]], [5, 3], 6),
    ([[4, 6], [2, 0]], [2, 4], 8),
])
def test_solve_mod_solutions(matrix, rhs, n):
    x = solve_mod(matrix, rhs, n)
    assert x is not None
    for row, b in zip(matrix, rhs):
        assert sum(a * v for a, v in zip(row, x)) % n == b % n


def test_solve_mod_detects_no_solution():
    assert solve_mod([[2]], [1], 4) is None
    assert solve_mod([[0, 0]], [1], 6) is None
