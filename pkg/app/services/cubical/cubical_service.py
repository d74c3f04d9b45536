"""
Cubical Service.
Flag tests, cubical cones, joins, products and vertex links.
"""
from itertools import combinations
from typing import Any, Callable, Iterable, Optional

import networkx as nx

from app.core.exceptions import ComplexException, IsomorphismFailure, NotSimple
from app.core.logging import LoggerMixin
from app.domain.complexes import (
    Cat0Result, ConeCoordinates, ConeProductIso, Cube, FlagResult, OctahedronResult,
    SimplicialComplex, TypedCubeComplex, sorted_labels,
)


def interval_cubes(
    simplices: Iterable[frozenset[Any]],
    key_of: Callable[[frozenset[Any]], Any],
) -> list[Cube]:
    """
    Cubes of a cubical cone: one per interval [A, B] of the simplex poset.

    simplices must include the empty set. key_of maps a type to the vertex
    key carrying it.
    """
    cubes = []
    for top in simplices:
        for k in range(len(top) + 1):
            for bottom in combinations(sorted_labels(top), k):
                bottom = frozenset(bottom)
                directions = sorted_labels(top - bottom)
                corners = []
                for mask in range(1 << len(directions)):
                    t = bottom | {d for b, d in enumerate(directions) if mask >> b & 1}
                    corners.append(key_of(frozenset(t)))
                cubes.append(Cube(corners=tuple(corners)))
    return cubes


class CubicalService(LoggerMixin):
    """
    Service for simplicial complexes and typed cube complexes.

    Cone vertices are keyed by their type (a frozenset, empty for the center).
    """

    def is_flag(self, n: SimplicialComplex) -> FlagResult:
        """
        Test whether every clique of the 1-skeleton spans a simplex.

        Cliques are enumerated by increasing size, so the first failure is a
        minimal non-spanned clique.

        Args:
            n: Simplicial complex

        Returns:
            FlagResult with the witness clique on failure
        """
        for clique in nx.enumerate_all_cliques(n.graph()):
            if len(clique) >= 3 and frozenset(clique) not in n.simplices:
                return FlagResult(is_flag=False, witness=sorted_labels(clique))
        return FlagResult(is_flag=True)

    def join(self, n1: SimplicialComplex, n2: SimplicialComplex) -> SimplicialComplex:
        """Join N1 * N2 on disjoint vertex sets."""
        if set(n1.vertices) & set(n2.vertices):
            raise ComplexException(
                "Join requires disjoint vertex sets",
                {"shared": [str(v) for v in set(n1.vertices) & set(n2.vertices)]},
            )
        bar1 = list(n1.simplices) + [frozenset()]
        bar2 = list(n2.simplices) + [frozenset()]
        simplices = frozenset(s | t for s in bar1 for t in bar2 if s | t)
        return SimplicialComplex(
            vertices=sorted_labels(n1.vertices + n2.vertices), simplices=simplices
        )

    def cubical_cone(self, n: SimplicialComplex) -> TypedCubeComplex:
        """
        Cubical cone C(N).

        Vertices are the simplices of N plus the empty center, typed by
        themselves; cubes are the poset intervals.

        Args:
            n: Finite simplicial complex

        Returns:
            TypedCubeComplex with center frozenset()
        """
        bar = [frozenset()] + list(n.simplices)
        cubes = interval_cubes(bar, lambda t: t)
        cone = TypedCubeComplex(
            vertex_types={t: t for t in bar},
            cubes=tuple(cubes),
            center=frozenset(),
            name="cone",
        )
        self.logger.debug(f"Built cubical cone with {len(bar)} vertices, cells {cone.cell_counts()}")
        return cone

    def cone_coordinates(self, cone: TypedCubeComplex) -> ConeCoordinates:
        """0/1 coordinates of the cone vertices (support = type)."""
        axes = sorted_labels(frozenset().union(*cone.vertex_types.values()))
        coordinates = {
            v: tuple(1 if a in t else 0 for a in axes) for v, t in cone.vertex_types.items()
        }
        return ConeCoordinates(axes=axes, coordinates=coordinates)

    def cube_product(self, x1: TypedCubeComplex, x2: TypedCubeComplex) -> TypedCubeComplex:
        """
        Product cube complex with types t(p, q) = t1(p) | t2(q).

        The product of a d1-cube and a d2-cube has corner (a, b) at mask
        m1 | (m2 << d1).
        """
        vertex_types = {
            (v1, v2): t1 | t2
            for v1, t1 in x1.vertex_types.items()
            for v2, t2 in x2.vertex_types.items()
        }
        cubes = []
        for q1 in x1.cubes:
            for q2 in x2.cubes:
                corners = [None] * (len(q1.corners) * len(q2.corners))
                for m1, a in enumerate(q1.corners):
                    for m2, b in enumerate(q2.corners):
                        corners[m1 | (m2 << q1.dim)] = (a, b)
                cubes.append(Cube(corners=tuple(corners)))
        center = None
        if x1.center is not None and x2.center is not None:
            center = (x1.center, x2.center)
        return TypedCubeComplex(
            vertex_types=vertex_types, cubes=tuple(cubes), center=center,
            name=f"{x1.name}x{x2.name}",
        )

    def cone_product_iso(self, n1: SimplicialComplex, n2: SimplicialComplex) -> ConeProductIso:
        """
        Verify C(N1) x C(N2) is isomorphic to C(N1 * N2) by (s, t) -> s | t.

        Args:
            n1: First complex
            n2: Second complex, vertex set disjoint from n1

        Returns:
            ConeProductIso with the vertex correspondence and cell counts

        Raises:
            ComplexException: If the vertex sets meet
            IsomorphismFailure: If the map is not a type-preserving bijection
        """
        product = self.cube_product(self.cubical_cone(n1), self.cubical_cone(n2))
        target = self.cubical_cone(self.join(n1, n2))

        vertex_map = {(s, t): s | t for (s, t) in product.vertex_types}
        if set(vertex_map.values()) != set(target.vertex_types) or len(vertex_map) != len(target.vertex_types):
            raise IsomorphismFailure("Vertex map is not a bijection")
        for v, w in vertex_map.items():
            if product.vertex_types[v] != target.vertex_types[w]:
                raise IsomorphismFailure(f"Type mismatch at {v}")

        images = {frozenset(vertex_map[c] for c in q.corners) for q in product.cubes}
        if images != set(target.cube_index) or len(product.cubes) != len(target.cubes):
            raise IsomorphismFailure(
                "Cube sets do not correspond",
                {"product": len(product.cubes), "join_cone": len(target.cubes)},
            )

        self.logger.info(f"Cone product isomorphism verified on {len(vertex_map)} vertices")
        return ConeProductIso(
            vertex_map=vertex_map,
            vertex_count=len(vertex_map),
            cube_count=len(target.cubes),
            cell_counts=target.cell_counts(),
        )

    # Links

    def link_of_vertex(self, x: TypedCubeComplex, v: Any) -> SimplicialComplex:
        """
        Link of a vertex: one simplex per cube containing it.

        Link vertices are the neighbours of v along edges.

        Raises:
            NotSimple: If two cubes induce the same simplex
        """
        if v not in x.vertex_types:
            raise ComplexException(f"Unknown vertex {v}")
        simplices: set[frozenset[Any]] = set()
        for q in x.cubes_at[v]:
            if q.dim == 0:
                continue
            simplex = frozenset(q.neighbours(v))
            if len(simplex) != q.dim or simplex in simplices:
                raise NotSimple(
                    f"Cubes at {v} induce the same link simplex",
                    {"vertex": str(v), "simplex": [str(s) for s in simplex]},
                )
            simplices.add(simplex)
        vertices = {w for s in simplices if len(s) == 1 for w in s}
        return SimplicialComplex(vertices=sorted_labels(vertices), simplices=frozenset(simplices))

    def lower_link(self, x: TypedCubeComplex, v: Any) -> SimplicialComplex:
        """Link restricted to cubes Q containing v with t(Q) inside t(v)."""
        t = x.type_of(v)
        simplices = set()
        for q in x.cubes_at[v]:
            if q.dim > 0 and x.cube_type(q) <= t:
                simplices.add(frozenset(q.neighbours(v)))
        vertices = {w for s in simplices if len(s) == 1 for w in s}
        return SimplicialComplex(vertices=sorted_labels(vertices), simplices=frozenset(simplices))

    def is_locally_cat0(
        self,
        x: TypedCubeComplex,
        vertices: Optional[Iterable[Any]] = None,
    ) -> Cat0Result:
        """
        Test that vertex links are flag.

        Args:
            x: Simple cube complex
            vertices: Vertices to check (all by default)

        Returns:
            Cat0Result with (vertex, clique) on failure
        """
        checked = 0
        for v in (x.vertices if vertices is None else vertices):
            result = self.is_flag(self.link_of_vertex(x, v))
            checked += 1
            if not result.is_flag:
                self.logger.info(f"Link at {v} is not flag: {result.witness}")
                return Cat0Result(
                    is_locally_cat0=False, checked_vertices=checked, vertex=v, clique=result.witness
                )
        return Cat0Result(is_locally_cat0=True, checked_vertices=checked)

    def is_thickened_octahedron(self, n: SimplicialComplex) -> OctahedronResult:
        """
        Test whether N is a join of nonempty discrete sets.

        The factors are the components of the complement graph, each of
        which must be complete there; N must also be flag.
        """
        if n.is_empty():
            return OctahedronResult(is_thickened_octahedron=True, factors=())
        complement = nx.complement(n.graph())
        factors = []
        for component in nx.connected_components(complement):
            size = len(component)
            if complement.subgraph(component).number_of_edges() != size * (size - 1) // 2:
                return OctahedronResult(is_thickened_octahedron=False)
            factors.append(sorted_labels(component))
        if not self.is_flag(n).is_flag:
            return OctahedronResult(is_thickened_octahedron=False)
        factors.sort(key=lambda f: (len(f), repr(f)))
        return OctahedronResult(is_thickened_octahedron=True, factors=tuple(factors))


# Singleton instance
cubical_service = CubicalService()
