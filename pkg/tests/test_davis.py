"""Coxeter word problem, Davis balls, quotients and reflection walls."""
import networkx as nx
import pytest

from app.core.config import settings
from app.core.exceptions import (
    ConfigurationException,
    NotAReflection,
    NotTwoDimensional,
    RelationViolated,
    WordTooLong,
)
from app.domain.coxeter import CoxWord
from app.domain.factories import GroupFactory
from app.services.davis.davis_service import davis_service as ds
from app.services.polygonal.polygonal_service import polygonal_service


def triangle(weight):
    return ds.data_from_config({
        "vertices": ["a", "b", "c"],
        "edges": [["a", "b"], ["b", "c"], ["a", "c"]],
        "default_weight": weight,
    })


@pytest.fixture
def ball_m2(cycle_m2):
    return ds.build_davis_ball(cycle_m2, 2)


@pytest.fixture
def z2_4():
    return GroupFactory.direct_product([GroupFactory.cyclic(2)] * 4)


# Word problem

def test_square_cancels(cycle_m2):
    assert ds.cox_normalize(cycle_m2, (1, 1)).letters == ()
    assert ds.is_identity(cycle_m2, (0, 2, 2, 0))


def test_commuting_letters_sort(cycle_m2):
    assert ds.cox_normalize(cycle_m2, (1, 0)).letters == (0, 1)
    assert ds.cox_normalize(cycle_m2, (0, 1, 0)).letters == (1,)


def test_free_letters_do_not_reduce(cycle_m2):
    assert ds.cox_normalize(cycle_m2, (0, 2, 0, 2)).letters == (0, 2, 0, 2)


def test_braid_move_picks_least(cycle_m4):
    assert ds.cox_normalize(cycle_m4, (1, 0, 1, 0)).letters == (0, 1, 0, 1)
    assert ds.is_identity(cycle_m4, (0, 1) * 4)
    assert len(ds.cox_normalize(cycle_m4, (0, 1) * 3)) == 2


def test_braid_of_order_three():
    d = triangle(3)
    assert ds.cox_normalize(d, (1, 0, 1)) == ds.cox_normalize(d, (0, 1, 0))
    assert ds.cox_normalize(d, (1, 0, 1)).letters == (0, 1, 0)


def test_multiply_and_inverse(cycle_m2):
    a = ds.cox_normalize(cycle_m2, (0, 2))
    assert ds.multiply(cycle_m2, a, (0,)).letters == (0, 2, 0)
    assert ds.inverse(cycle_m2, a).letters == (2, 0)
    assert ds.is_identity(cycle_m2, a.letters + ds.inverse(cycle_m2, a).letters)


def test_word_cap(cycle_m2):
    with pytest.raises(WordTooLong):
        ds.cox_normalize(cycle_m2, (0, 2) * settings.cox_word_cap)


def test_config_weights_override_default():
    d = ds.data_from_config({
        "vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]],
        "default_weight": 2, "weights": {"[\"a\", \"b\"]": 3},
    })
    assert d.m(0, 1) == 3
    assert d.m(1, 2) == 2
    assert d.m(0, 2) is None


def test_config_errors():
    with pytest.raises(ConfigurationException):
        ds.data_from_config({"vertices": ["a", "b"], "edges": [["a", "z"]], "default_weight": 2})
    with pytest.raises(ConfigurationException):
        ds.data_from_config({"vertices": ["a", "b"], "edges": [["a", "b"]]})


# Dimension and curvature criteria

def test_right_angled_triangle_is_finite():
    report = ds.is_two_dimensional(triangle(2))
    assert not report.is_two_dimensional
    assert report.witness == (0, 1, 2)


def test_triangle_of_fours_is_two_dimensional():
    assert ds.is_two_dimensional(triangle(4)).is_two_dimensional


def test_large_girth_is_two_dimensional(cycle_m2, k23):
    assert cycle_m2.girth() == 4
    assert ds.is_two_dimensional(cycle_m2).is_two_dimensional
    assert ds.is_two_dimensional(k23).is_two_dimensional


def test_c4_triple(cycle_m4):
    assert ds.c4_triple_witness(triangle(3)) is not None
    assert ds.c4_triple_witness(cycle_m4) is None


# Automorphisms

def test_automorphisms_of_weighted_square(cycle_m4):
    auts = ds.automorphisms(cycle_m4)
    assert len(auts) == 8
    assert auts[0] == (0, 1, 2, 3)
    assert ds.star_fixers(cycle_m4, 0, auts) == [(0, 1, 2, 3)]


def test_automorphisms_of_k23(k23):
    auts = ds.automorphisms(k23)
    assert len(auts) == 12
    assert len(ds.star_fixers(k23, 2, auts)) == 2
    assert len(ds.star_fixers(k23, 0, auts)) == 1


# Balls

def test_block_count(ball_m2):
    assert len(ball_m2.blocks) == 13
    x = ds.extract_x(ball_m2)
    assert (len(x.vertices), len(x.edges), len(x.polygons)) == (13, 16, 4)
    assert ball_m2.interior_blocks == {()}


def test_chamber_graph(ball_m2):
    g = ds.chamber_graph(ball_m2)
    assert (g.number_of_nodes(), g.number_of_edges()) == (13, 16)
    assert {data["type"] for _, _, data in g.edges(data=True)} == {0, 1, 2, 3}


def test_not_two_dimensional_ball():
    with pytest.raises(NotTwoDimensional):
        ds.build_davis_ball(triangle(2), 1)


@pytest.fixture(scope="module")
def ball_m4():
    d = ds.data_from_config({
        "vertices": ["s0", "s1", "s2", "s3"],
        "edges": [["s0", "s1"], ["s1", "s2"], ["s2", "s3"], ["s3", "s0"]],
        "default_weight": 4,
    })
    return ds.build_davis_ball(d, 4)


def test_polygons_have_2m_sides(ball_m4):
    assert ball_m4.x.polygons
    assert {p.k for p in ball_m4.x.polygons.values()} == {8}


def test_rank2_link_is_a_cycle(ball_m4):
    link = ball_m4.rank2_link(((), (0, 1)))
    assert link.number_of_nodes() == 16
    assert nx.is_isomorphic(link, nx.cycle_graph(16))
    types = [data["type"] for _, data in link.nodes(data=True)]
    assert types.count(frozenset()) == 8
    assert types.count(frozenset([0])) == 4
    assert types.count(frozenset([1])) == 4


def test_interior_links_are_nonpositively_curved(ball_m4):
    interior = sorted(ball_m4.interior_blocks)
    assert () in ball_m4.interior_blocks
    assert polygonal_service.check_condition(ball_m4.x, "C2", vertices=interior).passed
    assert polygonal_service.check_condition(ball_m4.x, "C4", vertices=interior).passed


# Quotients

def test_quotient_of_right_angled_square(cycle_m2, z2_4):
    hom = ds.coxeter_hom(cycle_m2, z2_4, {0: 8, 1: 4, 2: 2, 3: 1})
    quotient = ds.build_quotient_blocks(cycle_m2, hom)
    x = quotient.x
    assert (len(x.vertices), len(x.edges), len(x.polygons)) == (16, 32, 16)
    assert len(quotient.interior_blocks) == 16
    assert ds.block_of(cycle_m2, hom, (0, 1)) == z2_4.mul(8, 4)


def test_quotient_must_keep_dihedral_orders(cycle_m2):
    hom = ds.coxeter_hom(cycle_m2, GroupFactory.cyclic(2), {i: 1 for i in range(4)})
    with pytest.raises(RelationViolated):
        ds.coxeter_hom_check(cycle_m2, hom)


# Reflections

def test_generator_fixes_its_facets(cycle_m2, ball_m2):
    report = ds.reflection_wall(cycle_m2, ball_m2, (0,))
    assert set(report.fixed_edges) == {((), 0), ((1,), 0), ((3,), 0)}
    assert report.generator == 0
    assert report.conjugator == CoxWord()


def test_square_has_one_fixed_diameter(cycle_m2, ball_m2):
    report = ds.reflection_wall(cycle_m2, ball_m2, (0,))
    assert report.diameters_per_polygon[((), (0, 1))] == 1
    assert report.diameters_per_polygon[((), (0, 3))] == 1
    assert report.single_wall


def test_conjugate_reflection_is_translated(cycle_m2, ball_m2):
    base = ds.reflection_wall(cycle_m2, ball_m2, (0,))
    w = CoxWord(letters=(2,))
    blocks = set(ball_m2.blocks)
    moved = {ds.translate_edge(cycle_m2, ball_m2, w, e) for e in base.fixed_edges}
    report = ds.reflection_wall(cycle_m2, ball_m2, (2, 0, 2))
    fixed = {frozenset((ball_m2.lower_block(e), ball_m2.upper_block(e))) for e in report.fixed_edges}
    assert report.conjugator == w
    assert fixed == {pair for pair in moved if pair <= blocks}


def test_even_word_is_not_a_reflection(cycle_m2, ball_m2):
    with pytest.raises(NotAReflection):
        ds.reflection_wall(cycle_m2, ball_m2, (0, 2))
