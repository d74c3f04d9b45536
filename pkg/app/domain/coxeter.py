"""
Coxeter systems from a weighted graph and the block structure of their
Davis complexes.

Generators are the vertex indices 0..n-1 of L; m_ij is the weight of the
edge {i, j}, and is infinite (None) off the edges.
"""
from enum import Enum
from functools import cached_property
from typing import Any, Optional

import networkx as nx
from pydantic import BaseModel, Field, field_validator, model_validator

from app.domain.groups import GroupHom
from app.domain.polygonal import PolygonalComplex


class CoxeterData(BaseModel):
    """Weighted graph (L, m) with m >= 2 on edges."""
    names: tuple[str, ...]
    weights: dict[tuple[int, int], int] = Field(default_factory=dict, description="(i, j) with i < j -> m_ij")

    class Config:
        frozen = True

    @field_validator('weights')
    @classmethod
    def weights_must_be_at_least_two(cls, v):
        for (i, j), m in v.items():
            if i >= j:
                raise ValueError(f"Edge ({i}, {j}) must be listed with i < j")
            if m < 2:
                raise ValueError(f"Weight of ({i}, {j}) is {m}, must be at least 2")
        return v

    @model_validator(mode='after')
    def edges_must_use_known_vertices(self):
        n = len(self.names)
        for i, j in self.weights:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"Edge ({i}, {j}) uses an unknown vertex")
        return self

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def vertices(self) -> range:
        return range(len(self.names))

    @cached_property
    def signature(self) -> tuple:
        return (self.names, tuple(sorted(self.weights.items())))

    def m(self, i: int, j: int) -> Optional[int]:
        """Order of s_i s_j; None when infinite."""
        if i == j:
            return 1
        return self.weights.get((min(i, j), max(i, j)))

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.weights)

    def neighbours(self, i: int) -> list[int]:
        return [j for j in self.vertices if j != i and self.m(i, j) is not None]

    def star(self, i: int) -> frozenset[int]:
        return frozenset([i, *self.neighbours(i)])

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for (i, j), m in self.weights.items():
            g.add_edge(i, j, m=m)
        return g

    def girth(self) -> Optional[int]:
        """Length of a shortest cycle of L; None for a forest."""
        cycles = nx.minimum_cycle_basis(self.graph())
        return min((len(c) for c in cycles), default=None)

    def name_of(self, word: tuple[int, ...]) -> str:
        return " ".join(self.names[i] for i in word) or "1"


class CoxWord(BaseModel):
    """Canonical (shortlex-least reduced) word of a Coxeter group element."""
    letters: tuple[int, ...] = ()

    class Config:
        frozen = True

    def __len__(self) -> int:
        return len(self.letters)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.letters), self.letters)


class TwoDimensionalReport(BaseModel):
    is_two_dimensional: bool
    witness: Optional[tuple[int, int, int]] = None

    class Config:
        frozen = True


class BlockComplexKind(str, Enum):
    BALL = "ball"
    QUOTIENT = "quotient"


class BlockComplex(BaseModel):
    """
    Blocks of a Davis complex, in a ball or in a finite quotient.

    Blocks are canonical words (ball) or quotient elements. The polygonal
    complex x has the blocks as vertices, an edge per rank-1 vertex
    {b, b s_i} with id (lower block, i), and a 2m-gon per complete rank-2
    coset b W_ij with id (base block, (i, j)). The boundary cycle of a
    polygon starts at its least block and crosses type i < j first;
    polygon_blocks lists b_0..b_(2m-1), side j joining b_j and b_(j+1).
    """
    kind: BlockComplexKind
    data: CoxeterData
    radius: Optional[int] = None
    blocks: tuple[Any, ...]
    across: dict[tuple[Any, int], Any] = Field(..., description="(block, i) -> block s_i, when present")
    x: PolygonalComplex
    edge_types: dict[Any, int]
    polygon_types: dict[Any, tuple[int, int]]
    polygon_blocks: dict[Any, tuple[Any, ...]]
    boundary_polygons: frozenset[Any] = Field(default_factory=frozenset)
    interior_blocks: frozenset[Any] = Field(default_factory=frozenset)
    hom: Optional[GroupHom] = None

    class Config:
        frozen = True

    @cached_property
    def order(self) -> dict[Any, int]:
        return {b: k for k, b in enumerate(self.blocks)}

    def edge_id(self, b: Any, i: int) -> Any:
        other = self.across[(b, i)]
        lower = b if self.order[b] < self.order[other] else other
        return (lower, i)

    def lower_block(self, edge_id: Any) -> Any:
        return edge_id[0]

    def upper_block(self, edge_id: Any) -> Any:
        lower, i = edge_id
        return self.across[(lower, i)]

    def typed_vertices(self) -> dict[Any, frozenset[int]]:
        """Vertices of the Davis complex in range: blocks, rank-1 and rank-2 cosets with their types."""
        typed: dict[Any, frozenset[int]] = {("block", b): frozenset() for b in self.blocks}
        for e, i in self.edge_types.items():
            typed[("edge", e)] = frozenset([i])
        for p, (i, j) in self.polygon_types.items():
            typed[("polygon", p)] = frozenset([i, j])
        return typed

    def rank2_link(self, polygon_id: Any) -> nx.Graph:
        """Link of a rank-2 vertex: blocks and rank-1 vertices around the polygon, alternating."""
        g = nx.Graph()
        polygon = self.x.polygons[polygon_id]
        blocks = self.polygon_blocks[polygon_id]
        for j, (e, _) in enumerate(polygon.cycle):
            g.add_node(("block", blocks[j]), type=frozenset())
            g.add_node(("edge", e), type=frozenset([self.edge_types[e]]))
            g.add_edge(("block", blocks[j]), ("edge", e))
            g.add_edge(("edge", e), ("block", blocks[(j + 1) % len(blocks)]))
        return g


class ReflectionWallReport(BaseModel):
    """Fixed cells of a reflection inside a ball, compared with the walls of X."""
    reflection: CoxWord
    conjugator: CoxWord
    generator: int
    fixed_edges: tuple[Any, ...]
    fixed_polygons: tuple[Any, ...]
    diameters_per_polygon: dict[Any, int]
    wall_supports: int = Field(..., description="Distinct wall supports meeting the fixed edges")
    is_union_of_walls: bool

    class Config:
        frozen = True

    @property
    def single_wall(self) -> bool:
        return self.is_union_of_walls and self.wall_supports == 1
