"""Systems of local reflections on the K_{2,3} Davis complex and its (Z/2)^5 quotient."""
import random

import pytest

from app.core.exceptions import EWallNotTree, HolonomyPresent, NotSymmetric, ReflectionException
from app.domain.factories import GroupFactory
from app.domain.reflections import LRSystem
from app.services.davis.davis_service import davis_service
from app.services.polygonal.polygonal_service import polygonal_service
from app.services.reflections.reflection_service import reflection_service as rs

SWAP_B2_B3 = (0, 1, 2, 4, 3)
IDENTITY = (0, 1, 2, 3, 4)


@pytest.fixture
def quotient(k23):
    target = GroupFactory.direct_product([GroupFactory.cyclic(2)] * 5)
    hom = davis_service.coxeter_hom(k23, target, {0: 16, 1: 8, 2: 4, 3: 2, 4: 1})
    return davis_service.build_quotient_blocks(k23, hom)


@pytest.fixture
def ball(k23):
    return davis_service.build_davis_ball(k23, 2)


@pytest.fixture
def b1_edge(quotient):
    return next(e for e, i in sorted(quotient.edge_types.items()) if i == 2)


@pytest.fixture
def one_swap(quotient, b1_edge):
    """The standard system twisted at a single rank-1 vertex of type b1."""
    sigma = rs.sigma_w(quotient)
    return rs.apply_field(quotient, sigma, rs.symmetric_field(quotient, sigma, {b1_edge: SWAP_B2_B3}))


def polygons_on(block_complex, e):
    return [pid for pid, p in block_complex.x.polygons.items() if any(oe[0] == e for oe in p.cycle)]


def test_quotient_shape(quotient):
    assert len(quotient.blocks) == 32
    assert len(quotient.x.polygons) == 48
    assert {p.k for p in quotient.x.polygons.values()} == {4}


def test_fixers(k23):
    assert rs.fixers(k23, 2) == [IDENTITY, SWAP_B2_B3]
    assert rs.fixers(k23, 0) == [IDENTITY]


def test_standard_system_has_no_holonomy(quotient):
    assert rs.nontrivial_holonomy(quotient, rs.sigma_w(quotient)) == []


def test_ewall_shapes(quotient):
    walls = rs.ewalls(quotient)
    assert len(walls) == 16
    for wall in walls:
        types = {quotient.edge_types[e] for e in wall.edges}
        assert len(types) == 1
        report = polygonal_service.geometric_wall(quotient.x, wall)
        assert not report.acyclic
        if types <= {0, 1}:
            assert (len(wall.edges), report.node_count, report.edge_count) == (8, 20, 24)
        else:
            assert (len(wall.edges), report.node_count, report.edge_count) == (4, 8, 8)


def test_single_swap_has_holonomy(quotient, one_swap, b1_edge):
    around = polygons_on(quotient, b1_edge)
    assert len(around) == 2
    assert {tau[0] for tau in rs.nontrivial_holonomy(quotient, one_swap)} == set(around)


def test_holonomy_by_cells_agrees(quotient, one_swap):
    for tau, h in rs.holonomies(quotient, one_swap).items():
        assert rs.holonomy_by_cells(quotient, one_swap, tau) == h


def test_g_sequence_formula(quotient, b1_edge):
    sigma = rs.sigma_w(quotient)
    f = rs.random_symmetric_field(quotient, sigma, random.Random(5))
    for pid in polygons_on(quotient, b1_edge):
        for direction in (1, -1):
            report = rs.g_sequence(quotient, sigma, f, (pid, direction))
            assert report.formula_holds
            assert report.parity_ok
            assert len(report.gs) == 4


def test_field_round_trip(quotient):
    sigma = rs.sigma_w(quotient)
    f = rs.random_symmetric_field(quotient, sigma, random.Random(11))
    recovered = rs.field_from_systems(quotient, sigma, rs.apply_field(quotient, sigma, f))
    assert recovered.values == {s: a for s, a in f.values.items() if a != IDENTITY}


def test_asymmetric_field_rejected(quotient, b1_edge):
    sigma = rs.sigma_w(quotient)
    low, _ = rs.semi_edges(quotient, b1_edge)
    f = rs.symmetric_field(quotient, sigma, {}).model_copy(update={"values": {low: SWAP_B2_B3}})
    with pytest.raises(NotSymmetric):
        rs.apply_field(quotient, sigma, f)


def test_system_entries_must_fix_the_star(quotient):
    a1_edge = next(e for e, i in sorted(quotient.edge_types.items()) if i == 0)
    with pytest.raises(ReflectionException):
        rs.validate_system(quotient, LRSystem(size=5, values={a1_edge: SWAP_B2_B3}))


def test_system_from_config(quotient):
    sigma = rs.system_from_config(quotient, {"values": [{"block": 0, "type": 2, "map": list(SWAP_B2_B3)}]})
    assert sigma.support() == {quotient.edge_id(0, 2)}


def test_decomposition(quotient, one_swap):
    phi = rs.decompose_holonomy(quotient, one_swap)
    assert rs.decomposes(quotient, one_swap, phi)
    assert all(tau[1] == -1 for tau in phi.support())


def test_cyclic_ewall_needs_tolerance(k23, quotient, one_swap, b1_edge):
    phi = rs.decompose_holonomy(quotient, one_swap)
    wall = next(w for w in rs.ewalls(quotient) if b1_edge in w.edges)
    with pytest.raises(EWallNotTree):
        rs.solve_ewall_field(quotient, one_swap, phi, wall)
    solutions = rs.ewall_field_solutions(quotient, one_swap, phi, wall, tolerant=True)
    assert solutions
    assert len({s.seed for s in solutions}) == 1
    assert len({s.seed_value for s in solutions}) == len(solutions)
    for first, second in zip(solutions, solutions[1:]):
        assert first.field != second.field
    seed = solutions[0].seed
    for value in rs.fixers(k23, quotient.edge_types[seed[0]]):
        solution = rs.solve_ewall_field(quotient, one_swap, phi, wall, seed, value, tolerant=True)
        listed = [s for s in solutions if s.seed_value == value]
        assert listed == ([solution] if solution is not None else [])


def test_kill_single_swap(quotient, one_swap):
    report = rs.kill_holonomy_iteration(quotient, one_swap)
    assert report.holonomy_free
    assert len(report.steps) == 1
    assert rs.nontrivial_holonomy(quotient, report.system) == []


def test_kill_random_field(quotient):
    sigma = rs.sigma_w(quotient)
    twisted = rs.apply_field(quotient, sigma, rs.random_symmetric_field(quotient, sigma, random.Random(2)))
    report = rs.kill_holonomy_iteration(quotient, twisted)
    assert report.holonomy_free
    assert report.obstructions == ()


def test_chamber_system_graph(quotient, one_swap, b1_edge):
    g = rs.chamber_system_graph(quotient, one_swap)
    assert (g.number_of_nodes(), g.number_of_edges()) == (32, 80)
    lower, upper = quotient.lower_block(b1_edge), quotient.upper_block(b1_edge)
    assert g.edges[lower, upper, b1_edge]["reflection"] == SWAP_B2_B3


# Germ extension on the ball

def test_ball_shape(ball):
    assert len(ball.blocks) == 20
    assert len(ball.x.polygons) == 6


def test_graph_automorphism_germ(k23, ball):
    sigma = rs.sigma_w(ball)
    extension = rs.extend_system_germ(ball, sigma, sigma, SWAP_B2_B3)
    assert len(extension.images) == 20
    assert extension.closed_loops > 0
    form = rs.identify_automorphism(k23, extension)
    assert form.translation.letters == ()
    assert form.graph_automorphism == SWAP_B2_B3


def test_translated_germ(k23, ball):
    sigma = rs.sigma_w(ball)
    extension = rs.extend_system_germ(ball, sigma, sigma, IDENTITY, image=(0,))
    assert extension.images[(2,)] == (0, 2)
    form = rs.identify_automorphism(k23, extension)
    assert form.translation.letters == (0,)


def test_germ_needs_holonomy_free_systems(ball):
    sigma = rs.sigma_w(ball)
    twisted = LRSystem(size=5, values={ball.edge_id((), 2): SWAP_B2_B3})
    with pytest.raises(HolonomyPresent):
        rs.extend_system_germ(ball, twisted, sigma, IDENTITY)


def test_germ_must_be_an_automorphism(ball):
    sigma = rs.sigma_w(ball)
    with pytest.raises(ReflectionException):
        rs.extend_system_germ(ball, sigma, sigma, (2, 1, 0, 3, 4))
