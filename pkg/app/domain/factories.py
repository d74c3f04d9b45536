"""
Domain factories for creating domain objects from configuration data.

Factories encapsulate trusted constructions (cyclic groups, products,
permutation groups) and the parsing of JSON-style config blocks.
"""
from itertools import product as cartesian
from typing import Any, Dict, Iterable, Optional, Sequence

import networkx as nx
from sympy.combinatorics.named_groups import SymmetricGroup

from app.domain.complexes import SimplicialComplex, all_faces, sorted_labels
from app.domain.groups import FiniteGroup, FiniteAbelian
from app.domain.polygonal import Edge, Polygon, PolygonalComplex


class GroupFactory:
    """Factory for creating FiniteGroup objects."""

    @staticmethod
    def cyclic(n: int, name: Optional[str] = None) -> FiniteGroup:
        """
        Create the cyclic group Z/n with element k at index k.

        Args:
            n: Group order (positive)
            name: Optional display name

        Returns:
            FiniteGroup of order n

        Raises:
            ValueError: If n is not positive
        """
        if n < 1:
            raise ValueError(f"Cyclic group order must be positive, got {n}")
        table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
        inverses = tuple((-a) % n for a in range(n))
        return FiniteGroup(table=table, identity=0, inverses=inverses, name=name or f"Z/{n}")

    @staticmethod
    def permutation_group(
        perms: Iterable[Sequence[int]],
        name: str = "",
        labels: Optional[Sequence[str]] = None,
    ) -> FiniteGroup:
        """
        Create a group from a list of permutations closed under composition.

        Permutations are tuples p with p[x] the image of x; the product a*b
        is the composition a(b(x)). Element indices follow the given order.

        Raises:
            ValueError: If the list is not closed under composition
        """
        elements = [tuple(p) for p in perms]
        index = {p: k for k, p in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("Duplicate permutations")

        table = []
        for a in elements:
            row = []
            for b in elements:
                composed = tuple(a[b[x]] for x in range(len(b)))
                if composed not in index:
                    raise ValueError("Permutations are not closed under composition")
                row.append(index[composed])
            table.append(tuple(row))

        degree = len(elements[0])
        identity = index[tuple(range(degree))]
        inverses = []
        for p in elements:
            inverse = [0] * degree
            for x, y in enumerate(p):
                inverse[y] = x
            inverses.append(index[tuple(inverse)])

        return FiniteGroup(
            table=tuple(table),
            identity=identity,
            inverses=tuple(inverses),
            labels=tuple(labels) if labels else None,
            name=name,
        )

    @staticmethod
    def symmetric(n: int) -> FiniteGroup:
        """Symmetric group on n points, elements ordered by their array form."""
        perms = sorted(tuple(p.array_form) for p in SymmetricGroup(n).generate())
        labels = [str(list(p)) for p in perms]
        return GroupFactory.permutation_group(perms, name=f"S_{n}", labels=labels)

    @staticmethod
    def product_index(orders: Sequence[int], coords: Sequence[int]) -> int:
        """Mixed-radix index of a coordinate tuple (first factor most significant)."""
        index = 0
        for n, x in zip(orders, coords):
            index = index * n + x
        return index

    @staticmethod
    def product_coords(orders: Sequence[int], index: int) -> tuple[int, ...]:
        coords = []
        for n in reversed(orders):
            index, x = divmod(index, n)
            coords.append(x)
        return tuple(reversed(coords))

    @staticmethod
    def direct_product(groups: Sequence[FiniteGroup], name: str = "") -> FiniteGroup:
        """
        Create the direct product of finite groups.

        Elements are coordinate tuples encoded by product_index.

        Args:
            groups: Factor groups (at least one)
            name: Optional display name

        Returns:
            FiniteGroup of order prod |G_k|
        """
        if not groups:
            return GroupFactory.cyclic(1, name=name or "1")

        orders = [g.order for g in groups]
        tuples = list(cartesian(*[range(n) for n in orders]))
        table = []
        for a in tuples:
            row = []
            for b in tuples:
                c = [g.mul(x, y) for g, x, y in zip(groups, a, b)]
                row.append(GroupFactory.product_index(orders, c))
            table.append(tuple(row))

        identity = GroupFactory.product_index(orders, [g.identity for g in groups])
        inverses = tuple(
            GroupFactory.product_index(orders, [g.inv(x) for g, x in zip(groups, a)])
            for a in tuples
        )
        labels = tuple(
            "(" + ",".join(g.label(x) for g, x in zip(groups, a)) + ")" for a in tuples
        )
        return FiniteGroup(
            table=tuple(table),
            identity=identity,
            inverses=inverses,
            labels=labels,
            name=name or " x ".join(str(g) for g in groups),
        )

    @staticmethod
    def abelian_as_group(a: FiniteAbelian) -> FiniteGroup:
        """Multiplication table of a FiniteAbelian (indices in product_index order)."""
        return GroupFactory.direct_product(
            [GroupFactory.cyclic(n) for n in a.torsion], name=str(a)
        )

    @staticmethod
    def from_config(data: Dict[str, Any]) -> FiniteGroup:
        """
        Create a group from a config block.

        Supported kinds: {"kind": "cyclic", "n": 3},
        {"kind": "symmetric", "n": 3},
        {"kind": "product", "factors": [<group>, ...]} and
        {"kind": "table", "table": [[...]], "labels": [...]}.
        Tables are validated by GroupService.validate_group.

        Raises:
            ValueError: If the kind is unknown
        """
        # Local import: the service layer depends on this module
        from app.services.groups.group_service import group_service

        kind = data.get("kind", "table")
        if kind == "cyclic":
            return GroupFactory.cyclic(int(data["n"]))
        if kind == "symmetric":
            return GroupFactory.symmetric(int(data["n"]))
        if kind == "product":
            return GroupFactory.direct_product(
                [GroupFactory.from_config(f) for f in data["factors"]]
            )
        if kind == "table":
            return group_service.validate_group(
                data["table"], labels=data.get("labels"), name=data.get("name", "")
            )
        raise ValueError(f"Unknown group kind: {kind}")


class ComplexFactory:
    """Factory for creating SimplicialComplex objects."""

    @staticmethod
    def from_facets(vertices: Iterable[Any], facets: Iterable[Iterable[Any]]) -> SimplicialComplex:
        """
        Create a simplicial complex as the downward closure of its facets.

        Args:
            vertices: Vertex labels (isolated vertices included)
            facets: Maximal simplices (any family of vertex sets)

        Returns:
            SimplicialComplex with every vertex singleton present

        Raises:
            ValueError: If a facet uses an unknown vertex
        """
        vertices = sorted_labels(set(vertices))
        known = set(vertices)
        facets = [tuple(f) for f in facets]
        for f in facets:
            unknown = set(f) - known
            if unknown:
                raise ValueError(f"Facet {f} uses unknown vertices {sorted_labels(unknown)}")
        simplices = all_faces(list(facets) + [(v,) for v in vertices])
        return SimplicialComplex(vertices=vertices, simplices=simplices)

    @staticmethod
    def flag_complex(graph: nx.Graph) -> SimplicialComplex:
        """Flag complex of a graph: every clique spans a simplex."""
        cliques = list(nx.find_cliques(graph)) if graph.number_of_nodes() else []
        return ComplexFactory.from_facets(graph.nodes, cliques)

    @staticmethod
    def cycle(n: int) -> SimplicialComplex:
        """n-cycle graph on vertices 0..n-1 (no 2-simplices)."""
        return ComplexFactory.from_facets(range(n), [(k, (k + 1) % n) for k in range(n)])

    @staticmethod
    def discrete(vertices: Iterable[Any]) -> SimplicialComplex:
        vertices = list(vertices)
        return ComplexFactory.from_facets(vertices, [(v,) for v in vertices])

    @staticmethod
    def from_config(data: Dict[str, Any]) -> SimplicialComplex:
        """Create a complex from {"vertices": [...], "facets": [[...], ...]}."""
        return ComplexFactory.from_facets(data.get("vertices", []), data.get("facets", []))


class PolygonalFactory:
    """Factory for creating PolygonalComplex objects."""

    @staticmethod
    def build(
        vertices: Iterable[Any],
        edges: Iterable[tuple[Any, Any, Any]],
        polygons: Iterable[tuple[Any, Sequence[tuple[Any, int]]]],
        name: str = "",
    ) -> PolygonalComplex:
        """
        Create and validate a polygonal complex.

        Args:
            vertices: Vertex labels
            edges: (id, tail, head) triples; tail -> head is the basic orientation
            polygons: (id, cycle) pairs, cycle a list of (edge id, sign)
            name: Optional display name

        Raises:
            InvalidComplex: If a boundary cycle does not close up
        """
        from app.services.polygonal.polygonal_service import polygonal_service

        x = PolygonalComplex(
            vertices=tuple(vertices),
            edges={e: Edge(id=e, tail=a, head=b) for e, a, b in edges},
            polygons={p: Polygon(id=p, cycle=tuple((e, int(s)) for e, s in cycle)) for p, cycle in polygons},
            name=name,
        )
        return polygonal_service.validate(x)

    @staticmethod
    def polygon(k: int) -> PolygonalComplex:
        """A single k-gon with vertices v0..v(k-1) and edges e_j: v_j -> v_(j+1)."""
        return PolygonalFactory.build(
            [f"v{j}" for j in range(k)],
            [(f"e{j}", f"v{j}", f"v{(j + 1) % k}") for j in range(k)],
            [("p", [(f"e{j}", 1) for j in range(k)])],
            name=f"{k}-gon",
        )

    @staticmethod
    def torus(n: int, m: int) -> PolygonalComplex:
        """
        Square grid on the n x m torus.

        Vertex "v{i}.{j}"; horizontal edge "h{i}.{j}": (i, j) -> (i+1, j);
        vertical edge "u{i}.{j}": (i, j) -> (i, j+1); square "s{i}.{j}" with
        boundary h(i,j), u(i+1,j), h(i,j+1)^-1, u(i,j)^-1. n = m = 1 is the
        one-square torus.
        """
        def v(i: int, j: int) -> str:
            return f"v{i % n}.{j % m}"

        vertices = [v(i, j) for i in range(n) for j in range(m)]
        edges = []
        polygons = []
        for i in range(n):
            for j in range(m):
                edges.append((f"h{i}.{j}", v(i, j), v(i + 1, j)))
                edges.append((f"u{i}.{j}", v(i, j), v(i, j + 1)))
                polygons.append((f"s{i}.{j}", [
                    (f"h{i}.{j}", 1), (f"u{(i + 1) % n}.{j}", 1),
                    (f"h{i}.{(j + 1) % m}", -1), (f"u{i}.{j}", -1),
                ]))
        return PolygonalFactory.build(vertices, edges, polygons, name=f"torus {n}x{m}")

    @staticmethod
    def from_config(data: Dict[str, Any]) -> PolygonalComplex:
        """
        Create a complex from {"vertices": [...], "edges": [{"id", "from", "to"}],
        "polygons": [{"id", "cycle": [[edge, sign], ...]}]}.

        Polygons without an id are numbered "p0", "p1", ... in file order.
        """
        edges = [(e["id"], e["from"], e["to"]) for e in data.get("edges", [])]
        polygons = [
            (p.get("id", f"p{n}"), [(e, s) for e, s in p["cycle"]])
            for n, p in enumerate(data.get("polygons", []))
        ]
        return PolygonalFactory.build(data.get("vertices", []), edges, polygons, name=data.get("name", ""))
