"""Finite group tables, subgroups, double cosets and homomorphisms."""
import pytest

from app.core.exceptions import NonAssociative, NotASubgroup, NotLatinSquare, RelationViolated
from app.domain.factories import GroupFactory
from app.domain.groups import FiniteAbelian, GroupHom, Relator, SourceKind
from app.services.graph_product.graph_product_service import graph_product_service
from app.services.groups.group_service import group_service
from tests.conftest import presentation


def test_validate_z2():
    g = group_service.validate_group([[0, 1], [1, 0]])
    assert g.order == 2
    assert g.identity == 0
    assert g.inv(1) == 1


def test_validate_z3_inverse():
    g = group_service.validate_group([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert g.order == 3
    assert g.inv(1) == 2


def test_validate_identity_not_at_zero():
    # Z/2 with the identity listed second
    g = group_service.validate_group([[1, 0], [0, 1]])
    assert g.identity == 1


def test_quasigroup_is_not_associative():
    # a*b = b - a mod 3 is a Latin square but not a group
    with pytest.raises(NonAssociative):
        group_service.validate_group([[0, 1, 2], [2, 0, 1], [1, 2, 0]])


def test_repeated_row_entry_rejected():
    with pytest.raises(NotLatinSquare):
        group_service.validate_group([[0, 1], [1, 1]])


def test_non_square_table_rejected():
    with pytest.raises(NotLatinSquare):
        group_service.validate_group([[0, 1], [1]])


def test_factory_tables_validate(s3):
    checked = group_service.validate_group([list(row) for row in s3.table])
    assert checked.identity == s3.identity
    assert checked.inverses == s3.inverses


def test_direct_product_order(z2, z3):
    g = GroupFactory.direct_product([z2, z3])
    assert g.order == 6
    assert g.is_abelian()
    assert g.element_order(GroupFactory.product_index([2, 3], [1, 1])) == 6


def test_product_coords_invert_index():
    assert GroupFactory.product_coords([2, 3], GroupFactory.product_index([2, 3], [1, 2])) == (1, 2)


def test_from_config_kinds():
    assert GroupFactory.from_config({"kind": "cyclic", "n": 4}).order == 4
    assert GroupFactory.from_config({"kind": "symmetric", "n": 3}).order == 6
    product = GroupFactory.from_config({"kind": "product", "factors": [{"kind": "cyclic", "n": 2}] * 3})
    assert product.order == 8
    with pytest.raises(ValueError):
        GroupFactory.from_config({"kind": "dihedral", "n": 4})


def test_closure_of_transposition(s3):
    assert len(group_service.subgroup_closure(s3, [1])) == 2


def test_closure_of_even_residues():
    z6 = GroupFactory.cyclic(6)
    assert group_service.subgroup_closure(z6, [2]) == frozenset({0, 2, 4})


def test_two_transpositions_generate_s3(s3):
    assert group_service.subgroup_closure(s3, [1, 2]) == frozenset(range(6))


def test_closure_is_idempotent(s3):
    h = group_service.subgroup_closure(s3, [3])
    assert group_service.subgroup_closure(s3, h) == h
    assert group_service.is_subgroup(s3, h)


def test_double_cosets_of_trivial_subgroups(z2):
    assert group_service.double_coset_reps(z2, [0], [0]) == [0, 1]


def test_double_cosets_cover_z6():
    z6 = GroupFactory.cyclic(6)
    assert group_service.double_coset_reps(z6, [0, 3], [0, 2, 4]) == [0]


def test_double_cosets_of_transposition_in_s3(s3):
    h = group_service.subgroup_closure(s3, [1])
    reps = group_service.double_coset_reps(s3, h, h)
    assert len(reps) == 2
    sizes = sum(len(group_service.double_coset(s3, h, x, h)) for x in reps)
    assert sizes == s3.order


def test_double_coset_reps_require_subgroups(s3):
    with pytest.raises(NotASubgroup):
        group_service.double_coset_reps(s3, [0, 1, 2], [0])


def test_free_product_of_involutions_maps_to_z2(z2):
    p = presentation(["a", "b"], [], [z2, z2])
    hom = graph_product_service.make_hom(p, z2, {(0, 1): 1, (1, 1): 1})
    assert hom.image((1, 1)) == 1


def test_commuting_vertices_into_s3_violate_commutator(z2, s3):
    p = presentation(["a", "b"], [("a", "b")], [z2, z2])
    with pytest.raises(RelationViolated) as e:
        graph_product_service.make_hom(p, s3, {(0, 1): 1, (1, 1): 2})
    assert e.value.details["relation"].startswith("[")


def test_coxeter_hom_with_m3_into_s3(s3):
    hom = GroupHom(
        source_kind=SourceKind.COXETER,
        generators=("s", "t"),
        relators=(
            Relator(name="s^2", word=("s", "s")),
            Relator(name="t^2", word=("t", "t")),
            Relator(name="(st)^3", word=("s", "t") * 3),
        ),
        target=s3,
        images={"s": 1, "t": 2},
    )
    assert group_service.hom_check(hom) is hom


def test_missing_image_is_a_violation(s3):
    hom = GroupHom(source_kind=SourceKind.FINITE, generators=("s",), target=s3, images={})
    with pytest.raises(RelationViolated):
        group_service.hom_check(hom)


def test_index_of_preimage(six_cycle):
    hom = graph_product_service.gamma0_hom(six_cycle)
    sub = group_service.subgroup_data(hom, [hom.target.identity])
    assert group_service.index_of(sub) == 64


def test_finite_abelian_arithmetic():
    a = FiniteAbelian(torsion=(2, 3))
    x = a.element([1, 2])
    assert a.add(x, x) == (0, 1)
    assert a.is_zero(a.add(x, a.neg(x)))
    assert a.order == 6
    assert len(a.elements()) == 6
    with pytest.raises(ValueError):
        a.element([1])
