"""Domain models: groups, complexes, buildings, atlases and reflection systems."""
from app.domain.atlas import Atlas, AtlasChart, HolonomyReport
from app.domain.building import BuildingBall, Chamber, Residue
from app.domain.cochains import Cochain1, Cocycle2, CoverData
from app.domain.complexes import SimplicialComplex, TypedCubeComplex
from app.domain.coxeter import BlockComplex, CoxeterData, CoxWord
from app.domain.factories import ComplexFactory, GroupFactory, PolygonalFactory
from app.domain.graph_product import NormalForm, ProductPresentation
from app.domain.groups import FiniteAbelian, FiniteGroup, GroupHom, SubgroupData
from app.domain.polygonal import PolygonalComplex, Wall
from app.domain.reflections import LRSystem

__all__ = [
    "Atlas",
    "AtlasChart",
    "HolonomyReport",
    "BuildingBall",
    "Chamber",
    "Residue",
    "Cochain1",
    "Cocycle2",
    "CoverData",
    "SimplicialComplex",
    "TypedCubeComplex",
    "BlockComplex",
    "CoxeterData",
    "CoxWord",
    "ComplexFactory",
    "GroupFactory",
    "PolygonalFactory",
    "NormalForm",
    "ProductPresentation",
    "FiniteAbelian",
    "FiniteGroup",
    "GroupHom",
    "SubgroupData",
    "PolygonalComplex",
    "Wall",
    "LRSystem",
]
