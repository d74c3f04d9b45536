"""
Simplicial and cubical complex value objects.

Cubes are stored combinatorially: a d-cube is the tuple of its 2^d corner
vertices indexed by a bitmask over its d directions. Two cubes are equal
when they have the same vertex set.
"""
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Optional

import networkx as nx
from pydantic import BaseModel, Field


def sort_key(value: Any) -> tuple[str, str]:
    """Total order on heterogeneous vertex labels."""
    return (type(value).__name__, repr(value))


def sorted_labels(values: Iterable[Any]) -> tuple[Any, ...]:
    values = list(values)
    try:
        return tuple(sorted(values))
    except TypeError:
        return tuple(sorted(values, key=sort_key))


class SimplicialComplex(BaseModel):
    """
    Finite abstract simplicial complex.

    simplices is downward closed and contains every vertex singleton;
    build through ComplexFactory.from_facets to get the closure computed.
    """
    vertices: tuple[Any, ...]
    simplices: frozenset[frozenset[Any]] = Field(default_factory=frozenset)

    class Config:
        frozen = True

    def __contains__(self, simplex: Iterable[Any]) -> bool:
        return frozenset(simplex) in self.simplices

    @cached_property
    def facets(self) -> tuple[frozenset[Any], ...]:
        maximal = [s for s in self.simplices if not any(s < t for t in self.simplices)]
        return tuple(sorted(maximal, key=lambda s: (len(s), sorted_labels(s))))

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def graph(self) -> nx.Graph:
        """1-skeleton as a networkx graph."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(s) for s in self.simplices if len(s) == 2)
        return g

    def star_of(self, simplex: Iterable[Any]) -> list[frozenset[Any]]:
        """Simplices containing the given one."""
        simplex = frozenset(simplex)
        return [s for s in self.simplices if simplex <= s]

    def full_subcomplex(self, vertices: Iterable[Any]) -> "SimplicialComplex":
        keep = frozenset(vertices)
        return SimplicialComplex(
            vertices=sorted_labels(v for v in self.vertices if v in keep),
            simplices=frozenset(s for s in self.simplices if s <= keep),
        )

    def is_empty(self) -> bool:
        return not self.vertices

    def __str__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, {len(self.simplices)} simplices)"


class Cube(BaseModel):
    """d-cube given by its 2^d corners; corners[mask] flips direction k for bit k."""
    corners: tuple[Any, ...] = Field(..., min_length=1)

    class Config:
        frozen = True

    @property
    def dim(self) -> int:
        return len(self.corners).bit_length() - 1

    @property
    def key(self) -> frozenset[Any]:
        return frozenset(self.corners)

    def position(self, vertex: Any) -> int:
        return self.corners.index(vertex)

    def neighbours(self, vertex: Any) -> tuple[Any, ...]:
        """Corners joined to vertex by an edge of this cube, one per direction."""
        m0 = self.position(vertex)
        return tuple(self.corners[m0 ^ (1 << k)] for k in range(self.dim))

    def faces(self) -> list["Cube"]:
        """All faces, including the cube itself and its corners."""
        d = self.dim
        result = []
        for free in range(1 << d):
            free_bits = [k for k in range(d) if free >> k & 1]
            for base in range(1 << d):
                if base & free:
                    continue
                corners = []
                for m in range(1 << len(free_bits)):
                    mask = base
                    for pos, k in enumerate(free_bits):
                        if m >> pos & 1:
                            mask |= 1 << k
                    corners.append(self.corners[mask])
                result.append(Cube(corners=tuple(corners)))
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Cube) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


class TypedCubeComplex(BaseModel):
    """
    Finite cube complex whose vertices carry a type (subset of I).

    Cubes are closed under faces. center is the cone point when the complex
    is a cubical cone.
    """
    vertex_types: dict[Any, frozenset[Any]]
    cubes: tuple[Cube, ...]
    center: Optional[Any] = None
    name: str = ""

    class Config:
        frozen = True

    @cached_property
    def cube_index(self) -> dict[frozenset[Any], Cube]:
        return {q.key: q for q in self.cubes}

    @cached_property
    def cubes_at(self) -> dict[Any, tuple[Cube, ...]]:
        incidence: dict[Any, list[Cube]] = {v: [] for v in self.vertex_types}
        for q in self.cubes:
            for v in q.corners:
                incidence[v].append(q)
        return {v: tuple(qs) for v, qs in incidence.items()}

    @property
    def vertices(self) -> list[Any]:
        return list(self.vertex_types)

    def type_of(self, v: Any) -> frozenset[Any]:
        return self.vertex_types[v]

    def cube_type(self, q: Cube) -> frozenset[Any]:
        """t(Q): the largest vertex type in the cube."""
        return frozenset().union(*(self.vertex_types[v] for v in q.corners))

    def cube_lower_type(self, q: Cube) -> frozenset[Any]:
        """The smallest vertex type in the cube."""
        return frozenset.intersection(*(self.vertex_types[v] for v in q.corners))

    def has_cube(self, corners: Iterable[Any]) -> bool:
        return frozenset(corners) in self.cube_index

    def cubes_of_dim(self, d: int) -> list[Cube]:
        return [q for q in self.cubes if q.dim == d]

    def cell_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for q in self.cubes:
            counts[q.dim] = counts.get(q.dim, 0) + 1
        return dict(sorted(counts.items()))

    def boundary_cubes(self) -> list[Cube]:
        """Cubes of a cone not containing the center."""
        if self.center is None:
            return []
        return [q for q in self.cubes if self.center not in q.corners]

    def skeleton_graph(self) -> nx.Graph:
        g = nx.Graph()
        for v, t in self.vertex_types.items():
            g.add_node(v, type=t)
        g.add_edges_from(q.corners for q in self.cubes if q.dim == 1)
        return g

    def __str__(self) -> str:
        return f"TypedCubeComplex({self.name or 'unnamed'}, cells={self.cell_counts()})"


class ConeCoordinates(BaseModel):
    """0/1 coordinate vectors of cone vertices, indexed by the vertices of N."""
    axes: tuple[Any, ...]
    coordinates: dict[Any, tuple[int, ...]]

    class Config:
        frozen = True

    def support(self, v: Any) -> frozenset[Any]:
        return frozenset(a for a, x in zip(self.axes, self.coordinates[v]) if x)


# Check results

class FlagResult(BaseModel):
    """Outcome of a flag test; witness is a minimal clique spanning no simplex."""
    is_flag: bool
    witness: Optional[tuple[Any, ...]] = None

    class Config:
        frozen = True


class Cat0Result(BaseModel):
    """Outcome of the local CAT(0) test over the checked vertices."""
    is_locally_cat0: bool
    checked_vertices: int = 0
    vertex: Optional[Any] = None
    clique: Optional[tuple[Any, ...]] = None

    class Config:
        frozen = True


class OctahedronResult(BaseModel):
    """Join factorization into discrete sets, when one exists."""
    is_thickened_octahedron: bool
    factors: tuple[tuple[Any, ...], ...] = ()

    class Config:
        frozen = True


class ConeProductIso(BaseModel):
    """Verified type-preserving isomorphism C(N1) x C(N2) -> C(N1 * N2)."""
    vertex_map: dict[tuple[Any, Any], Any]
    vertex_count: int
    cube_count: int
    cell_counts: dict[int, int]

    class Config:
        frozen = True


def all_faces(simplices: Iterable[Iterable[Any]]) -> frozenset[frozenset[Any]]:
    """Downward closure of a family of vertex sets (nonempty faces only)."""
    closure: set[frozenset[Any]] = set()
    for s in simplices:
        s = tuple(s)
        for k in range(1, len(s) + 1):
            closure.update(frozenset(c) for c in combinations(s, k))
    return frozenset(closure)
