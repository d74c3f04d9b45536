"""
Right-angled building value objects.

A chamber is a graph product element; a building vertex is keyed by its type
J and the canonical representative of the coset gamma Gamma_J.
"""
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

from app.domain.complexes import TypedCubeComplex
from app.domain.graph_product import NormalForm, Syllable

VertexKey = tuple[tuple[int, ...], tuple[Syllable, ...]]


class Chamber(BaseModel):
    """Chamber gamma C_* of the building."""
    element: NormalForm = Field(default_factory=NormalForm)

    class Config:
        frozen = True

    def __str__(self) -> str:
        return f"C[{self.element}]"

    def __hash__(self) -> int:
        return hash(self.element.syllables)


class BuildingVertex(BaseModel):
    """Vertex of type J at the coset rep Gamma_J."""
    type: frozenset[int]
    coset_rep: NormalForm

    class Config:
        frozen = True

    @property
    def rank(self) -> int:
        return len(self.type)

    @property
    def key(self) -> VertexKey:
        return (tuple(sorted(self.type)), self.coset_rep.syllables)

    @classmethod
    def from_key(cls, key: VertexKey) -> "BuildingVertex":
        return cls(type=frozenset(key[0]), coset_rep=NormalForm(syllables=key[1]))


class Residue(BaseModel):
    """Residue R(J, C) with canonical base chamber."""
    type: frozenset[int]
    base: Chamber

    class Config:
        frozen = True

    def __str__(self) -> str:
        return f"R({sorted(self.type)}, {self.base})"


class Gallery(BaseModel):
    """Sequence of chambers, consecutive ones equal or adjacent."""
    chambers: tuple[Chamber, ...] = Field(..., min_length=1)

    class Config:
        frozen = True

    @property
    def length(self) -> int:
        return len(self.chambers) - 1

    def is_closed(self) -> bool:
        return self.chambers[0] == self.chambers[-1]


class AdjacencyKind(str, Enum):
    """How two chambers meet."""
    EQUAL = "equal"
    ADJACENT = "adjacent"
    NOT_ADJACENT = "not_adjacent"


class Adjacency(BaseModel):
    kind: AdjacencyKind
    vertex: Optional[int] = None

    class Config:
        frozen = True


class BuildingBall(BaseModel):
    """Gallery ball of the building, realized as a typed cube complex."""
    radius: int
    chambers: tuple[NormalForm, ...]
    complex: TypedCubeComplex
    interior: frozenset[Any] = Field(default_factory=frozenset, description="Interior vertex keys")

    class Config:
        frozen = True

    def is_interior(self, key: Any) -> bool:
        return key in self.interior


class BoundaryComponents(BaseModel):
    """Chambers of an i-perp-eq residue grouped by their i-boundary component."""
    vertex: int
    residue: Residue
    component_of: dict[NormalForm, int] = Field(..., description="chamber element -> G_i label")
    count: int

    class Config:
        frozen = True

    def components(self) -> dict[int, list[NormalForm]]:
        grouped: dict[int, list[NormalForm]] = {}
        for chamber, label in self.component_of.items():
            grouped.setdefault(label, []).append(chamber)
        return grouped


class ResidueProductReport(BaseModel):
    """Verified product decomposition of an i-perp-eq residue ball."""
    vertex: int
    base: NormalForm
    radius: int
    factor_vertices: tuple[int, int]
    factor_cubes: tuple[int, int]
    vertex_count: int
    cube_count: int
    cell_counts: dict[int, int]

    class Config:
        frozen = True


class MoveKind(str, Enum):
    """Elementary moves reducing a closed gallery word."""
    DROP = "drop"
    SWAP = "swap"
    MERGE = "merge"
    CANCEL = "cancel"


class GalleryMove(BaseModel):
    """One move at position index of the current letter word; letters are the ones removed or swapped."""
    kind: MoveKind
    index: int
    letters: tuple[Optional[Syllable], ...]

    class Config:
        frozen = True


class Lassoe(BaseModel):
    """The 4-cycle P, Pa, Pab, Pb in the rank-2 residue at P."""
    prefix: NormalForm
    first: Syllable
    second: Syllable

    class Config:
        frozen = True


class GalleryCertificate(BaseModel):
    """Moves taking a closed gallery word to the empty word, with its lassoes."""
    word: tuple[Optional[Syllable], ...]
    moves: tuple[GalleryMove, ...]
    lassoes: tuple[Lassoe, ...]

    class Config:
        frozen = True

    @property
    def homotopy_moves(self) -> int:
        return sum(1 for m in self.moves if m.kind != MoveKind.SWAP)
