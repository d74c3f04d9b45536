"""
Cochains over a finite abelian coefficient group.

A 1-cochain assigns to every edge an element, read on the basic
orientation (the reverse carries the negative). A 2-cocycle assigns an
element to every polygon, read on its stored boundary orientation. Missing
entries are zero.
"""
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

from app.domain.groups import FiniteAbelian, FiniteGroup
from app.domain.polygonal import DeckAction, PolygonalComplex, Wall

Element = tuple[int, ...]


class Cochain1(BaseModel):
    coefficients: FiniteAbelian
    values: dict[Any, Element] = Field(default_factory=dict)

    class Config:
        frozen = True

    def value(self, e: Any) -> Element:
        return self.values.get(e, self.coefficients.zero)

    def support(self) -> frozenset[Any]:
        return frozenset(e for e, a in self.values.items() if not self.coefficients.is_zero(a))

    def is_zero(self) -> bool:
        return not self.support()


class Cocycle2(BaseModel):
    coefficients: FiniteAbelian
    values: dict[Any, Element] = Field(default_factory=dict)

    class Config:
        frozen = True

    def value(self, p: Any) -> Element:
        return self.values.get(p, self.coefficients.zero)

    def support(self) -> frozenset[Any]:
        return frozenset(p for p, a in self.values.items() if not self.coefficients.is_zero(a))

    def is_zero(self) -> bool:
        return not self.support()


class WallFieldSolution(BaseModel):
    """A member of F(c, M): supported on the edges dual to M, killing c on crossed polygons."""
    wall: Wall
    cochain: Cochain1
    seed_edge: Any
    seed_value: Element

    class Config:
        frozen = True


class CoverData(BaseModel):
    """
    Finite cover of a base complex from a voltage assignment.

    The cover has vertices (v, q), edges (e, q) from (tail, q) to
    (head, q * voltage(e)) and polygons (pi, q) based at (initial, q).
    The deck group acts by left multiplication on q.
    """
    base: PolygonalComplex
    group: FiniteGroup
    voltages: dict[Any, int]
    cover: PolygonalComplex
    action: DeckAction

    class Config:
        frozen = True

    @property
    def degree(self) -> int:
        return self.group.order


class CoverMethod(str, Enum):
    TRIVIAL = "trivial"
    WALLS = "walls"
    LINEAR = "linear"
    NONE = "none"


class KillInCoverReport(BaseModel):
    """Outcome of killing a lifted cocycle; on success u satisfies du = -p*(c)."""
    success: bool
    method: CoverMethod
    degree: int
    certificate: Optional[Cochain1] = None
    surviving: Cocycle2
    obstructions: tuple[tuple[Any, ...], ...] = Field(
        default=(), description="Wall orbits whose field could not be solved, as member lists"
    )

    class Config:
        frozen = True


class ExtensionVerdict(str, Enum):
    SPLITS = "splits"
    UNRESOLVED = "unresolved"


class ExtensionReport(BaseModel):
    verdict: ExtensionVerdict
    index: int
    obstructions: tuple[tuple[Any, ...], ...] = ()

    class Config:
        frozen = True
