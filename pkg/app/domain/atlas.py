"""
Holonomy and atlas value objects.

Components of the i-boundary of an i-perp-eq residue with canonical base b
are labelled by G_i: the chamber b z has label rho_i(z). Permutations of
G_i labels are tuples perm[g] = image label.
"""
from typing import Optional

from pydantic import BaseModel, Field

from app.domain.building import Chamber, Residue
from app.domain.graph_product import NormalForm, Syllable
from app.domain.groups import SubgroupData

Permutation = tuple[int, ...]
Letter = Optional[Syllable]


class HolonomyReport(BaseModel):
    """i-holonomy of a subgroup at one i-perp-eq residue."""
    vertex: int
    residue: Residue
    quotient_rep: Optional[int] = Field(None, description="Double coset representative in the quotient")
    image: tuple[int, ...] = Field(..., description="Elements g of G_i acting by left translation")
    permutations: tuple[Permutation, ...]

    class Config:
        frozen = True

    @property
    def trivial(self) -> bool:
        return len(self.image) <= 1


class AtlasChart(BaseModel):
    """Simply transitive action of G_i at one residue orbit representative."""
    vertex: int
    quotient_rep: int
    base: NormalForm
    seed: tuple[Permutation, ...] = Field(..., description="seed[h] = permutation of G_i labels")

    class Config:
        frozen = True


class Atlas(BaseModel):
    """Equivariant atlas of a subgroup: charts per vertex and residue orbit."""
    subgroup: SubgroupData
    charts: dict[int, tuple[AtlasChart, ...]]
    name: str = ""

    class Config:
        frozen = True

    def charts_at(self, i: int) -> tuple[AtlasChart, ...]:
        return self.charts[i]


class GalleryWord(BaseModel):
    """Letters None (repeat) or (i, g) with g nontrivial in G_i."""
    letters: tuple[Letter, ...] = ()

    class Config:
        frozen = True

    def __len__(self) -> int:
        return len(self.letters)


class LazyAutomorphism(BaseModel):
    """Type-preserving automorphism extending a germ, evaluated on demand."""
    source: Atlas
    target: Atlas
    germ: tuple[Chamber, Chamber]
    certified_radius: Optional[int] = None
    cache: dict[NormalForm, NormalForm] = Field(default_factory=dict)

    class Config:
        frozen = True


class KillHolonomyReport(BaseModel):
    """Subgroup cut out by separating quotients, with its residual holonomy."""
    subgroup: SubgroupData
    reports: tuple[HolonomyReport, ...]
    index: int

    class Config:
        frozen = True

    @property
    def success(self) -> bool:
        return all(r.trivial for r in self.reports)

    def nontrivial(self) -> list[HolonomyReport]:
        return [r for r in self.reports if not r.trivial]


class WitnessEntry(BaseModel):
    """Generator lambda of the subgroup and the element g with f lambda f^-1 = g."""
    generator: NormalForm
    translation: NormalForm

    class Config:
        frozen = True


class CommensurationReport(BaseModel):
    radius: int
    entries: tuple[WitnessEntry, ...]
    checked_chambers: int
    chambers: tuple[NormalForm, ...] = ()

    class Config:
        frozen = True
