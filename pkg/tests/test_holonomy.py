"""Holonomy of finite-index subgroups, atlases, germ extension and witnesses."""
import pytest

from app.core.exceptions import HolonomyException, NontrivialHolonomy, WrongResidueType
from app.domain.building import AdjacencyKind, Chamber
from app.domain.graph_product import NormalForm
from app.services.building.building_service import building_service
from app.services.graph_product.graph_product_service import graph_product_service as gp
from app.services.groups.group_service import group_service
from app.services.holonomy.atlas_service import atlas_service, compose, invert
from app.services.holonomy.holonomy_service import holonomy_service


def gamma0(p):
    hom = gp.gamma0_hom(p)
    return group_service.subgroup_data(hom, [hom.target.identity])


@pytest.fixture
def even_words(z2):
    """Index-2 subgroup of Z/2 * Z/2 of words of even length (infinite cyclic)."""
    def build(p):
        hom = gp.make_hom(p, z2, {(0, 1): 1, (1, 1): 1})
        return group_service.subgroup_data(hom, [0])
    return build


def test_compose_and_invert():
    a, b = (1, 2, 0), (0, 2, 1)
    assert compose(a, b) == (1, 0, 2)
    assert compose(a, invert(a)) == (0, 1, 2)


@pytest.mark.parametrize("fixture", ["six_cycle", "edge_z2_z3"])
def test_gamma0_has_no_holonomy(fixture, request):
    p = request.getfixturevalue(fixture)
    sub = gamma0(p)
    reports = holonomy_service.holonomy_reports(p, sub)
    assert reports
    assert all(r.trivial for r in reports)
    assert holonomy_service.has_trivial_holonomy(p, sub)


def test_gamma0_residue_orbits_on_six_cycle(six_cycle):
    # (Z/2)^6 modulo the image of the 3-vertex i-perp-eq subgroup
    reps = holonomy_service.residue_representatives(six_cycle, gamma0(six_cycle), 0)
    assert len(reps) == 8
    assert all(r.type == six_cycle.perp_eq(0) for _, r in reps)


@pytest.mark.parametrize("fixture", ["six_cycle", "edge_z2_z3"])
def test_full_group_has_full_holonomy(fixture, request):
    p = request.getfixturevalue(fixture)
    reports = holonomy_service.holonomy_reports(p, holonomy_service.full_subgroup(p))
    assert len(reports) == p.size
    for r in reports:
        assert len(r.image) == p.order(r.vertex)
        assert len(r.permutations) == p.order(r.vertex)


def test_holonomy_needs_perp_eq_residue(six_cycle):
    sub = holonomy_service.full_subgroup(six_cycle)
    residue = holonomy_service.residue_representatives(six_cycle, sub, 1)[0][1]
    with pytest.raises(WrongResidueType):
        holonomy_service.holonomy_at(six_cycle, sub, 0, residue)
    assert residue.type == six_cycle.perp_eq(1)


def test_kill_holonomy_with_gamma0_separator(six_cycle):
    full = holonomy_service.full_subgroup(six_cycle)
    report = holonomy_service.kill_holonomy(six_cycle, full, [gp.gamma0_hom(six_cycle)])
    assert report.success
    assert report.index == 64


def test_kill_holonomy_without_separators_reports_residues(edge_z2_z3):
    report = holonomy_service.kill_holonomy(edge_z2_z3, holonomy_service.full_subgroup(edge_z2_z3), [])
    assert not report.success
    assert len(report.nontrivial()) == 2
    assert report.index == 1


def test_schreier_generators_of_even_words(free_z2_z2, even_words):
    sub = even_words(free_z2_z2)
    assert holonomy_service.index(sub) == 2
    generators = holonomy_service.schreier_generators(free_z2_z2, sub)
    assert generators
    assert all(g.length == 2 for g in generators)
    assert all(gp.evaluate(sub.hom, g) == 0 for g in generators)


def test_even_words_have_no_holonomy(free_z2_z2, even_words):
    assert holonomy_service.has_trivial_holonomy(free_z2_z2, even_words(free_z2_z2))


def test_fiber_product_tabulates_image(six_cycle, z2):
    parity = gp.make_hom(six_cycle, z2, {(i, 1): 1 for i in six_cycle.vertices})
    hom, elements = holonomy_service.fiber_product(six_cycle, [gp.gamma0_hom(six_cycle), parity])
    # parity is a function of the Gamma0 coordinates
    assert hom.target.order == 64
    assert len(elements) == 64


def test_right_translation_seed_is_valid(s3):
    seed = atlas_service.right_translation_seed(s3)
    atlas_service.validate_seed(s3, seed)


def test_twisted_seed_is_valid(z3):
    atlas_service.validate_seed(z3, atlas_service.twisted_seed(z3, (0, 2, 1)))


def test_constant_seed_rejected(z3):
    identity = (0, 1, 2)
    with pytest.raises(HolonomyException):
        atlas_service.validate_seed(z3, (identity, identity, identity))


def test_atlas_needs_holonomy_free_subgroup(six_cycle):
    with pytest.raises(NontrivialHolonomy):
        atlas_service.atlas_from_holonomy_free(six_cycle, holonomy_service.full_subgroup(six_cycle))


def test_invariant_atlas_of_gamma0(edge_z2_z3):
    atlas = atlas_service.atlas_from_holonomy_free(edge_z2_z3, gamma0(edge_z2_z3))
    assert [len(atlas.charts_at(i)) for i in edge_z2_z3.vertices] == [1, 1]
    atlas_service.verify_invariance(edge_z2_z3, atlas, 2)


def test_standard_atlas_is_invariant(six_cycle):
    atlas_service.verify_invariance(six_cycle, atlas_service.standard_atlas(six_cycle), 2)


def test_gallery_word_round_trip(six_cycle):
    atlas = atlas_service.standard_atlas(six_cycle)
    target = gp.normalize(six_cycle, [(0, 1), (2, 1), (4, 1)])
    g = atlas_service.geodesic(six_cycle, NormalForm(), target)
    word = atlas_service.word_of_gallery(six_cycle, atlas, g)
    assert len(word) == 3
    assert atlas_service.gallery_of_word(six_cycle, atlas, Chamber(), word) == g


def test_identity_germ_extends_to_identity(six_cycle):
    atlas = atlas_service.standard_atlas(six_cycle)
    f = atlas_service.extend_germ(six_cycle, (Chamber(), Chamber()), atlas, atlas, 2)
    assert f.certified_radius == 2
    for c in gp.enumerate_ball(six_cycle, 3):
        assert atlas_service.evaluate(six_cycle, f, c) == c


def twisted_gamma0_germ(p, radius=2):
    """Extension of the identity germ from the standard atlas to the inversion-twisted Gamma0 atlas."""
    twisted = atlas_service.atlas_from_holonomy_free(p, gamma0(p), twists={1: (0, 2, 1)})
    return atlas_service.extend_germ(p, (Chamber(), Chamber()), atlas_service.standard_atlas(p), twisted, radius)


def test_twisted_gamma0_atlas_germ_certifies(edge_z2_z3):
    f = twisted_gamma0_germ(edge_z2_z3)
    assert f.certified_radius == 2
    ball = gp.enumerate_ball(edge_z2_z3, 2)
    assert {atlas_service.evaluate(edge_z2_z3, f, c) for c in ball} == set(ball)
    t = gp.generator(edge_z2_z3, 1, 1)
    assert atlas_service.evaluate(edge_z2_z3, f, t) == gp.normalize(edge_z2_z3, [(1, 2)])
    for g in ball:
        assert any(atlas_service.evaluate(edge_z2_z3, f, c) != gp.multiply(edge_z2_z3, g, c) for c in ball)


def test_twisted_germ_carries_closed_galleries_to_closed_galleries(edge_z2_z3):
    f = twisted_gamma0_germ(edge_z2_z3)
    square = building_service.gallery(edge_z2_z3, [[], [(0, 1)], [(0, 1), (1, 1)], [(1, 1)], []])
    image = atlas_service.transport(edge_z2_z3, f, square)
    assert image.is_closed()
    assert image.chambers[2].element == gp.normalize(edge_z2_z3, [(0, 1), (1, 2)])
    certificate = building_service.reduce_closed_gallery(edge_z2_z3, image)
    assert certificate.lassoes
    assert building_service.replay_certificate(edge_z2_z3, certificate) == image


def adjacency_preserved(p, f, radius):
    for c in gp.enumerate_ball(p, radius):
        for key in gp.generator_keys(p):
            d = gp.multiply(p, c, NormalForm(syllables=(key,)))
            image = building_service.adjacency_type(
                p, Chamber(element=atlas_service.evaluate(p, f, c)), Chamber(element=atlas_service.evaluate(p, f, d)),
            )
            assert image.kind == AdjacencyKind.ADJACENT
            assert image.vertex == key[0]


def test_translated_germ_preserves_adjacency_types(six_cycle):
    atlas = atlas_service.standard_atlas(six_cycle)
    s = gp.normalize(six_cycle, [(0, 1), (3, 1)])
    f = atlas_service.extend_germ(six_cycle, (Chamber(), Chamber(element=s)), atlas, atlas, 2)
    adjacency_preserved(six_cycle, f, 2)


def test_twisted_germ_preserves_adjacency_types(edge_z2_z3):
    adjacency_preserved(edge_z2_z3, twisted_gamma0_germ(edge_z2_z3), 2)


def test_inverse_automorphism_undoes_the_twist(edge_z2_z3):
    f = twisted_gamma0_germ(edge_z2_z3)
    f_inverse = atlas_service.inverse_automorphism(edge_z2_z3, f, 2)
    assert f_inverse.source == f.target
    for c in gp.enumerate_ball(edge_z2_z3, 2):
        assert atlas_service.evaluate(edge_z2_z3, f_inverse, atlas_service.evaluate(edge_z2_z3, f, c)) == c


def test_gamma0_atlas_is_equivalent_to_standard(edge_z2_z3):
    invariant = atlas_service.atlas_from_holonomy_free(edge_z2_z3, gamma0(edge_z2_z3))
    assert atlas_service.atlases_equivalent(edge_z2_z3, atlas_service.standard_atlas(edge_z2_z3), invariant, 2)


def test_inversion_twist_is_not_equivalent(edge_z2_z3):
    # equivalence is trivial for abelian vertex groups
    twisted = atlas_service.atlas_from_holonomy_free(edge_z2_z3, gamma0(edge_z2_z3), twists={1: (0, 2, 1)})
    assert not atlas_service.atlases_equivalent(edge_z2_z3, atlas_service.standard_atlas(edge_z2_z3), twisted, 2)


def test_conjugation_twist_is_equivalent(vertex_s3, s3):
    conjugation = tuple(s3.mul(s3.mul(1, x), s3.inv(1)) for x in s3.elements())
    twisted = atlas_service.atlas_from_holonomy_free(vertex_s3, gamma0(vertex_s3), twists={0: conjugation})
    standard = atlas_service.standard_atlas(vertex_s3)
    assert twisted.charts_at(0)[0].seed != standard.charts_at(0)[0].seed
    assert atlas_service.atlases_equivalent(vertex_s3, standard, twisted, 1)



def test_translated_germ(six_cycle):
    atlas = atlas_service.standard_atlas(six_cycle)
    s = gp.generator(six_cycle, 0, 1)
    f = atlas_service.extend_germ(six_cycle, (Chamber(), Chamber(element=s)), atlas, atlas, 1)
    c = gp.normalize(six_cycle, [(2, 1), (3, 1)])
    assert atlas_service.evaluate(six_cycle, f, c) == gp.multiply(six_cycle, s, c)


def test_witness_for_gamma0_in_finite_building(edge_z2_z2):
    sub = gamma0(edge_z2_z2)
    report = atlas_service.commensuration_witness(edge_z2_z2, sub, 2)
    assert report.checked_chambers == 4
    assert set(report.chambers) == {
        NormalForm(),
        gp.generator(edge_z2_z2, 0, 1),
        gp.generator(edge_z2_z2, 1, 1),
        gp.normalize(edge_z2_z2, [(0, 1), (1, 1)]),
    }
    f = atlas_service.extend_germ(
        edge_z2_z2, (Chamber(), Chamber()),
        atlas_service.atlas_from_holonomy_free(edge_z2_z2, sub), atlas_service.standard_atlas(edge_z2_z2), 2,
    )
    f_inverse = atlas_service.inverse_automorphism(edge_z2_z2, f, 2)
    members = [c for c in report.chambers if gp.evaluate(sub.hom, c) in sub.image_subgroup]
    assert members == [NormalForm()]
    for lam in members:
        g = atlas_service.evaluate(edge_z2_z2, f, gp.multiply(edge_z2_z2, lam, atlas_service.evaluate(edge_z2_z2, f_inverse, NormalForm())))
        for c in report.chambers:
            conjugate = atlas_service.evaluate(
                edge_z2_z2, f, gp.multiply(edge_z2_z2, lam, atlas_service.evaluate(edge_z2_z2, f_inverse, c)),
            )
            assert conjugate == gp.multiply(edge_z2_z2, g, c)



def test_witness_for_even_words_in_tree(free_z2_z2, even_words):
    report = atlas_service.commensuration_witness(free_z2_z2, even_words(free_z2_z2), 3)
    assert len(report.entries) == 2
    assert report.checked_chambers == 7
    for entry in report.entries:
        assert entry.translation.length == 2


def test_witness_rejects_holonomy(edge_z2_z2):
    with pytest.raises(NontrivialHolonomy):
        atlas_service.commensuration_witness(edge_z2_z2, holonomy_service.full_subgroup(edge_z2_z2), 1)
