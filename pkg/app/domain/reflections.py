"""
Systems of local reflections on a block complex, read in block charts.

Every block is identified with the model block through its chart, so a
rank-preserving germ between two blocks is a weight-preserving permutation
of the vertices of L. A local reflection at the rank-1 vertex of type i
between blocks b < b' is stored as the chart map b -> b'; the way back is its
inverse. The standard system of W stores the identity everywhere.

A triangle of a polygon is (polygon id, direction). Direction +1 leaves the
least block of the polygon across side 0 and walks the stored cycle;
direction -1 leaves it across the last side and walks backwards. The two
form the (0, 2)-adjacency class of the transversal.
"""
from typing import Any

from pydantic import BaseModel, Field

from app.domain.coxeter import CoxWord

Permutation = tuple[int, ...]
Triangle = tuple[Any, int]
SemiEdge = tuple[Any, Any]


def partner(tau: Triangle) -> Triangle:
    """The other triangle of the (0, 2)-adjacency class."""
    return (tau[0], -tau[1])


class LRSystem(BaseModel):
    """Local reflection per rank-1 vertex; missing entries are the identity."""
    size: int = Field(..., ge=1, description="Number of vertices of L")
    values: dict[Any, Permutation] = Field(default_factory=dict, description="edge id -> chart map lower -> upper")
    name: str = ""

    class Config:
        frozen = True

    @property
    def identity(self) -> Permutation:
        return tuple(range(self.size))

    def value(self, e: Any) -> Permutation:
        return self.values.get(e, self.identity)

    def support(self) -> frozenset[Any]:
        return frozenset(e for e, a in self.values.items() if a != self.identity)


class Rank1Field(BaseModel):
    """Germ per semi-edge (edge id, block on its side), fixing the star of the edge type."""
    size: int = Field(..., ge=1)
    values: dict[SemiEdge, Permutation] = Field(default_factory=dict)

    class Config:
        frozen = True

    @property
    def identity(self) -> Permutation:
        return tuple(range(self.size))

    def value(self, semi_edge: SemiEdge) -> Permutation:
        return self.values.get(semi_edge, self.identity)

    def support(self) -> frozenset[SemiEdge]:
        return frozenset(s for s, a in self.values.items() if a != self.identity)


class Rank2Field(BaseModel):
    """Germ per triangle; on a transversal it decomposes the holonomy."""
    size: int = Field(..., ge=1)
    values: dict[Triangle, Permutation] = Field(default_factory=dict)

    class Config:
        frozen = True

    @property
    def identity(self) -> Permutation:
        return tuple(range(self.size))

    def value(self, tau: Triangle) -> Permutation:
        return self.values.get(tau, self.identity)

    def support(self) -> frozenset[Triangle]:
        return frozenset(t for t, a in self.values.items() if a != self.identity)


class Step(BaseModel):
    """One crossing of a polygon side during a traversal."""
    side: int
    source: Any
    target: Any
    edge: Any

    class Config:
        frozen = True


class GSequenceReport(BaseModel):
    """Holonomy of a modified system split into per-step contributions."""
    triangle: Triangle
    gs: tuple[Permutation, ...]
    parity_ok: bool = Field(..., description="Odd steps fix the first facet, even steps the second")
    formula_holds: bool

    class Config:
        frozen = True


class EWallCrossing(BaseModel):
    """How an e-wall passes through one polygon."""
    polygon: Any
    sides: tuple[int, int]
    triangle: Triangle = Field(..., description="Transversal triangle selected by the label of the dual sides")
    steps: tuple[int, int] = Field(..., description="1-based traversal steps crossing the dual sides, in order")

    class Config:
        frozen = True


class EWallFieldSolution(BaseModel):
    """A member of F(sigma, phi, M) fixed by its value at a seed semi-edge."""
    edges: frozenset[Any]
    field: Rank1Field
    seed: SemiEdge
    seed_value: Permutation
    crossings: tuple[EWallCrossing, ...]

    class Config:
        frozen = True


class KillStep(BaseModel):
    edges: frozenset[Any]
    killed: tuple[Triangle, ...]

    class Config:
        frozen = True


class KillIterationReport(BaseModel):
    """Outcome of killing half holonomy across every e-wall in turn."""
    system: LRSystem
    decomposition: Rank2Field
    steps: tuple[KillStep, ...]
    obstructions: tuple[tuple[Any, ...], ...] = Field(default=(), description="Edge sets whose field could not be solved")
    residual: tuple[Triangle, ...] = Field(default=(), description="Triangles with nontrivial holonomy at the end")

    class Config:
        frozen = True

    @property
    def holonomy_free(self) -> bool:
        return not self.residual


class GermExtension(BaseModel):
    """
    Automorphism of the Davis ball preserving two systems, from one germ.

    images maps a block to the canonical word of its image block; charts
    maps it to the chart map from the block to its image.
    """
    base: Any
    images: dict[Any, tuple[int, ...]]
    charts: dict[Any, Permutation]
    closed_loops: int = Field(0, description="Extra arrivals checked for agreement")

    class Config:
        frozen = True


class AutomorphismForm(BaseModel):
    """w composed with a graph automorphism: x -> w . alpha(x)."""
    translation: CoxWord
    graph_automorphism: Permutation

    class Config:
        frozen = True

