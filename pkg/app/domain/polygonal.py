"""
Polygonal complex value objects.

Every edge carries a basic orientation (tail -> head) fixed by the input.
An oriented edge is the pair (edge id, sign); sign +1 follows the basic
orientation. A polygon is stored with one based boundary cycle of oriented
edges, head to tail.
"""
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Optional

import networkx as nx
from pydantic import BaseModel, Field, field_validator

from app.domain.complexes import sort_key, sorted_labels
from app.domain.groups import FiniteGroup

OrientedEdge = tuple[Any, int]


def reverse(oe: OrientedEdge) -> OrientedEdge:
    return (oe[0], -oe[1])


class Edge(BaseModel):
    id: Any
    tail: Any
    head: Any

    class Config:
        frozen = True

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


class Polygon(BaseModel):
    """Polygon with its based boundary cycle."""
    id: Any
    cycle: tuple[OrientedEdge, ...] = Field(..., min_length=1)

    class Config:
        frozen = True

    @field_validator('cycle')
    @classmethod
    def signs_must_be_units(cls, v):
        if any(s not in (1, -1) for _, s in v):
            raise ValueError("Cycle signs must be +1 or -1")
        return v

    @property
    def k(self) -> int:
        return len(self.cycle)

    def side(self, j: int) -> OrientedEdge:
        return self.cycle[j % self.k]

    def rotated(self, start: int) -> tuple[OrientedEdge, ...]:
        return self.cycle[start:] + self.cycle[:start]

    def reversed_cycle(self) -> tuple[OrientedEdge, ...]:
        return tuple(reverse(oe) for oe in reversed(self.cycle))


class PolygonalComplex(BaseModel):
    """
    Finite polygonal complex.

    Construct through PolygonalService.validate (or the factories, which
    call it) to get the cycle invariants checked.
    """
    vertices: tuple[Any, ...]
    edges: dict[Any, Edge]
    polygons: dict[Any, Polygon] = Field(default_factory=dict)
    name: str = ""

    class Config:
        frozen = True

    def initial(self, oe: OrientedEdge) -> Any:
        edge = self.edges[oe[0]]
        return edge.tail if oe[1] == 1 else edge.head

    def terminal(self, oe: OrientedEdge) -> Any:
        edge = self.edges[oe[0]]
        return edge.head if oe[1] == 1 else edge.tail

    @cached_property
    def oriented_edges(self) -> tuple[OrientedEdge, ...]:
        return tuple((e, s) for e in sorted_labels(self.edges) for s in (1, -1))

    def polygon_ids(self) -> tuple[Any, ...]:
        return sorted_labels(self.polygons)

    @property
    def max_sides(self) -> int:
        return max((p.k for p in self.polygons.values()), default=0)

    def based_cycle(self, polygon_id: Any, v: Any) -> tuple[OrientedEdge, ...]:
        """delta_v of the polygon: the boundary cycle rotated to start at v."""
        polygon = self.polygons[polygon_id]
        for j, oe in enumerate(polygon.cycle):
            if self.initial(oe) == v:
                return polygon.rotated(j)
        raise KeyError(f"Vertex {v!r} is not on polygon {polygon_id!r}")

    def one_skeleton(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in sorted_labels(self.edges):
            g.add_edge(self.edges[e].tail, self.edges[e].head, key=e)
        return g


# Links and curvature

class Corner(BaseModel):
    """Corner of a polygon at a vertex: an edge of the link graph."""
    polygon: Any
    position: int
    ends: tuple[OrientedEdge, OrientedEdge]
    k: int

    class Config:
        frozen = True


class LinkGraph(BaseModel):
    """Link of a vertex: oriented edges out of v joined by polygon corners."""
    vertex: Any
    nodes: tuple[OrientedEdge, ...]
    corners: tuple[Corner, ...]

    class Config:
        frozen = True

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.nodes)
        for c in self.corners:
            g.add_edge(*c.ends, key=(c.polygon, c.position), k=c.k, polygon=c.polygon)
        return g


class CurvatureCondition(str, Enum):
    Q = "Q"
    C = "C"
    C2 = "C2"
    C4 = "C4"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNVERIFIED = "unverified"


class CurvatureReport(BaseModel):
    """Outcome of a link-cycle condition; the witness is the first failing cycle."""
    condition: CurvatureCondition
    strict: bool = False
    verdict: Verdict
    vertex: Optional[Any] = None
    cycle: tuple[OrientedEdge, ...] = ()
    weights: tuple[int, ...] = ()
    total: Optional[Fraction] = None
    checked_vertices: int = 0
    reason: str = ""

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS


# Walls

class WallKind(str, Enum):
    PARALLEL = "parallel"
    EVEN = "even"


class Pairing(BaseModel):
    """Forward side j of a polygon paired with the backward side j'."""
    polygon: Any
    first: int
    second: int

    class Config:
        frozen = True

    @property
    def diameter(self) -> tuple[Any, frozenset[int]]:
        return (self.polygon, frozenset((self.first, self.second)))


class Wall(BaseModel):
    """
    Equivalence class of oriented edges under (even-)parallelism.

    pairs is the witness chain: the in-polygon pairings joining members.
    vertex_set is V(M), the endpoints of the dual edges.
    """
    kind: WallKind = WallKind.PARALLEL
    oriented_edges: frozenset[OrientedEdge]
    pairs: tuple[Pairing, ...] = ()
    vertex_set: frozenset[Any] = Field(default_factory=frozenset)

    class Config:
        frozen = True

    def __contains__(self, oe: OrientedEdge) -> bool:
        return oe in self.oriented_edges

    def __len__(self) -> int:
        return len(self.oriented_edges)

    @property
    def edges(self) -> frozenset[Any]:
        return frozenset(e for e, _ in self.oriented_edges)

    @property
    def polygons(self) -> frozenset[Any]:
        return frozenset(p.polygon for p in self.pairs)

    @property
    def diameters(self) -> frozenset[tuple[Any, frozenset[int]]]:
        return frozenset(p.diameter for p in self.pairs)

    def reversed_edges(self) -> frozenset[OrientedEdge]:
        return frozenset(reverse(oe) for oe in self.oriented_edges)

    def members(self) -> list[OrientedEdge]:
        return sorted(self.oriented_edges, key=lambda oe: (sort_key(oe[0]), -oe[1]))


class GeometricWallReport(BaseModel):
    """Shape of the union of diameters dual to a wall."""
    wall: Wall
    node_count: int
    edge_count: int
    acyclic: bool
    diameters_per_polygon: dict[Any, int]
    opposite_free: bool

    class Config:
        frozen = True

    @property
    def at_most_one_diameter(self) -> bool:
        return all(n <= 1 for n in self.diameters_per_polygon.values())

    @property
    def is_tree_like(self) -> bool:
        return self.acyclic and self.at_most_one_diameter and self.opposite_free


class BarycentricSubdivision(BaseModel):
    """
    Multisimplicial barycentric subdivision.

    Nodes are ("v", vertex), ("e", edge) and ("p", polygon) with ranks 0, 1, 2.
    Edges and triangles are listed with multiplicity.
    """
    rank: dict[tuple[str, Any], int]
    edges: tuple[tuple[tuple[str, Any], tuple[str, Any]], ...]
    triangles: tuple[tuple[tuple[str, Any], ...], ...]

    class Config:
        frozen = True

    def nodes_of_rank(self, r: int) -> list[tuple[str, Any]]:
        return [n for n, k in self.rank.items() if k == r]

    def edges_of_ranks(self, a: int, b: int) -> list[tuple[tuple[str, Any], tuple[str, Any]]]:
        return [e for e in self.edges if (self.rank[e[0]], self.rank[e[1]]) == (a, b)]

    def counts(self) -> dict[str, int]:
        return {
            "V0": len(self.nodes_of_rank(0)),
            "V1": len(self.nodes_of_rank(1)),
            "V2": len(self.nodes_of_rank(2)),
            "E01": len(self.edges_of_ranks(0, 1)),
            "E02": len(self.edges_of_ranks(0, 2)),
            "E12": len(self.edges_of_ranks(1, 2)),
            "F": len(self.triangles),
        }


# Group actions

class CellMap(BaseModel):
    """
    One automorphism: vertex permutation, edges to (edge, eta) and polygons
    to (polygon, eta). eta is -1 when orientation is reversed.
    """
    vertices: dict[Any, Any]
    edges: dict[Any, tuple[Any, int]]
    polygons: dict[Any, tuple[Any, int]] = Field(default_factory=dict)

    class Config:
        frozen = True

    def edge_image(self, oe: OrientedEdge) -> OrientedEdge:
        target, eta = self.edges[oe[0]]
        return (target, eta * oe[1])

    def eta_edge(self, e: Any) -> int:
        return self.edges[e][1]

    def eta_polygon(self, p: Any) -> int:
        return self.polygons[p][1]


class DeckAction(BaseModel):
    """A finite group acting on a polygonal complex by cell permutations."""
    group: FiniteGroup
    maps: dict[int, CellMap]

    class Config:
        frozen = True

    def __getitem__(self, g: int) -> CellMap:
        return self.maps[g]

    def elements(self) -> list[int]:
        return self.group.elements()
