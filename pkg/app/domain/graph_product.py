"""
Graph product value objects.

Vertices of the defining graph are indexed 0..n-1 and carry display names.
An element of the graph product is a canonical tuple of syllables
(vertex index, nontrivial element index of the vertex group).
"""
from functools import cached_property
from typing import Iterable

import networkx as nx
from pydantic import BaseModel, Field, field_validator, model_validator

from app.domain.groups import FiniteGroup

Syllable = tuple[int, int]


class ProductPresentation(BaseModel):
    """Simplicial graph with a finite group at every vertex."""
    names: tuple[str, ...] = Field(..., min_length=1, description="Vertex names, index = position")
    edges: frozenset[frozenset[int]] = Field(default_factory=frozenset)
    groups: tuple[FiniteGroup, ...]

    class Config:
        frozen = True

    @field_validator('edges')
    @classmethod
    def edges_must_be_pairs(cls, v):
        for e in v:
            if len(e) != 2:
                raise ValueError(f"Edge {sorted(e)} must join two distinct vertices")
        return v

    @model_validator(mode='after')
    def groups_match_vertices(self):
        if len(self.groups) != len(self.names):
            raise ValueError("Every vertex needs exactly one group")
        if len(set(self.names)) != len(self.names):
            raise ValueError("Vertex names must be distinct")
        for e in self.edges:
            if any(i < 0 or i >= len(self.names) for i in e):
                raise ValueError(f"Edge {sorted(e)} uses an unknown vertex")
        return self

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def vertices(self) -> range:
        return range(len(self.names))

    @cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        adjacency: list[set[int]] = [set() for _ in self.names]
        for e in self.edges:
            i, j = tuple(e)
            adjacency[i].add(j)
            adjacency[j].add(i)
        return tuple(frozenset(a) for a in adjacency)

    def commute(self, i: int, j: int) -> bool:
        """Syllables at distinct adjacent vertices commute."""
        return j in self.neighbours[i]

    def perp(self, i: int) -> frozenset[int]:
        """i-perp: the neighbours of i."""
        return self.neighbours[i]

    def perp_eq(self, i: int) -> frozenset[int]:
        return self.neighbours[i] | {i}

    def order(self, i: int) -> int:
        return self.groups[i].order

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def is_spherical(self, subset: Iterable[int]) -> bool:
        """J spans a clique of the graph (empty set included)."""
        subset = list(subset)
        return all(
            self.commute(a, b) for k, a in enumerate(subset) for b in subset[k + 1:]
        )

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for i, name in enumerate(self.names):
            g.add_node(i, name=name, order=self.order(i))
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    def label(self, syllable: Syllable) -> str:
        i, g = syllable
        return f"{self.names[i]}^{self.groups[i].label(g)}"

    def __str__(self) -> str:
        return f"GraphProduct({', '.join(f'{n}:{g}' for n, g in zip(self.names, self.groups))})"


class NormalForm(BaseModel):
    """Canonical syllable word of a graph product element."""
    syllables: tuple[Syllable, ...] = ()

    class Config:
        frozen = True

    @property
    def length(self) -> int:
        return len(self.syllables)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def sort_key(self) -> tuple[int, tuple[Syllable, ...]]:
        """Canonical (length, lexicographic) order."""
        return (len(self.syllables), self.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(f"{i}:{g}" for i, g in self.syllables)

    def __hash__(self) -> int:
        return hash(self.syllables)
