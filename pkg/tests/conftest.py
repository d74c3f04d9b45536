"""Shared fixtures: small groups, presentations and complexes."""
import pytest

from app.domain.factories import ComplexFactory, GroupFactory, PolygonalFactory
from app.domain.graph_product import ProductPresentation
from app.services.davis.davis_service import davis_service


def presentation(names, edges, groups) -> ProductPresentation:
    index = {name: k for k, name in enumerate(names)}
    return ProductPresentation(
        names=tuple(names),
        edges=frozenset(frozenset((index[a], index[b])) for a, b in edges),
        groups=tuple(groups),
    )


@pytest.fixture
def z2():
    return GroupFactory.cyclic(2)


@pytest.fixture
def z3():
    return GroupFactory.cyclic(3)


@pytest.fixture
def s3():
    # indices follow sorted array forms; 1, 2 and 5 are the transpositions
    return GroupFactory.symmetric(3)


@pytest.fixture
def six_cycle(z2):
    """All-Z/2 graph product over the 6-cycle (right-angled Coxeter group)."""
    names = [f"v{k}" for k in range(6)]
    return presentation(names, [(names[k], names[(k + 1) % 6]) for k in range(6)], [z2] * 6)


@pytest.fixture
def edge_z2_z3(z2, z3):
    """Z/2 x Z/3 as the graph product over one edge."""
    return presentation(["a", "b"], [("a", "b")], [z2, z3])


@pytest.fixture
def free_z2_z3(z2, z3):
    """Z/2 * Z/3: two vertices, no edge."""
    return presentation(["a", "b"], [], [z2, z3])


@pytest.fixture
def edge_z2_z2(z2):
    return presentation(["a", "b"], [("a", "b")], [z2, z2])


@pytest.fixture
def square_torus():
    return PolygonalFactory.torus(1, 1)


@pytest.fixture
def four_cycle():
    return ComplexFactory.cycle(4)


@pytest.fixture
def cycle_m2():
    """Right-angled Coxeter system on the 4-cycle."""
    return davis_service.data_from_config({
        "vertices": ["s0", "s1", "s2", "s3"],
        "edges": [["s0", "s1"], ["s1", "s2"], ["s2", "s3"], ["s3", "s0"]],
        "default_weight": 2,
    })


@pytest.fixture
def cycle_m4():
    """4-cycle with every edge labelled 4 (octagons in the Davis complex)."""
    return davis_service.data_from_config({
        "vertices": ["s0", "s1", "s2", "s3"],
        "edges": [["s0", "s1"], ["s1", "s2"], ["s2", "s3"], ["s3", "s0"]],
        "default_weight": 4,
    })


@pytest.fixture
def k23():
    """Right-angled Coxeter system on K_{2,3}: a1=0, a2=1, b1=2, b2=3, b3=4."""
    return davis_service.data_from_config({
        "vertices": ["a1", "a2", "b1", "b2", "b3"],
        "edges": [[a, b] for a in ("a1", "a2") for b in ("b1", "b2", "b3")],
        "default_weight": 2,
    })


@pytest.fixture
def free_z2_z2(z2):
    """Z/2 * Z/2, the infinite dihedral group; its building is a tree."""
    return presentation(["a", "b"], [], [z2, z2])


@pytest.fixture
def vertex_s3(s3):
    """S_3 as the graph product over a single vertex."""
    return presentation(["a"], [], [s3])
