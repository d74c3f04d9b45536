"""
Building Service.
Finite balls of the right-angled building as typed cube complexes, residues,
i-boundaries, galleries and their reduction into lassoes.
"""
from typing import Any, Iterable, Optional, Sequence

import networkx as nx

from app.core.config import settings
from app.core.exceptions import (
    InvalidGallery, IsomorphismFailure, NotClosed, ResidueInfinite,
    VertexOnBoundary, WrongResidueType,
)
from app.core.logging import LoggerMixin
from app.domain.building import (
    Adjacency, AdjacencyKind, BoundaryComponents, BuildingBall, BuildingVertex, Chamber,
    Gallery, GalleryCertificate, GalleryMove, Lassoe, MoveKind, ResidueProductReport,
    Residue, VertexKey,
)
from app.domain.complexes import Cube, OctahedronResult, TypedCubeComplex
from app.domain.graph_product import NormalForm, ProductPresentation, Syllable
from app.services.cubical.cubical_service import cubical_service, interval_cubes
from app.services.graph_product.graph_product_service import graph_product_service

Letter = Optional[Syllable]


class BuildingService(LoggerMixin):
    """
    Service for the building of a graph product of finite groups.

    Balls are gallery balls around C_*; vertices are glued by key equality.
    """

    def __init__(self):
        """Initialize building service."""
        self.gp = graph_product_service
        self.cubical = cubical_service

    # Vertices and chambers

    def spherical_types(self, p: ProductPresentation, within: Optional[Iterable[int]] = None) -> list[frozenset[int]]:
        """Empty set and the cliques of the graph, optionally inside a vertex subset."""
        graph = p.graph()
        if within is not None:
            graph = graph.subgraph(set(within))
        types = {frozenset()}
        for clique in nx.enumerate_all_cliques(graph):
            types.add(frozenset(clique))
        return sorted(types, key=lambda t: (len(t), sorted(t)))

    def vertex_key(self, p: ProductPresentation, element: NormalForm, vertex_type: Iterable[int]) -> VertexKey:
        vertex_type = frozenset(vertex_type)
        rep = self.gp.coset_rep(p, element, vertex_type)
        return (tuple(sorted(vertex_type)), rep.syllables)

    def vertex_of(self, p: ProductPresentation, element: NormalForm, vertex_type: Iterable[int]) -> BuildingVertex:
        return BuildingVertex.from_key(self.vertex_key(p, element, vertex_type))

    def chamber_cubes(
        self,
        p: ProductPresentation,
        element: NormalForm,
        types: Sequence[frozenset[int]],
    ) -> list[Cube]:
        """Cubes of the chamber element C_*, restricted to the given types."""
        keys: dict[frozenset[int], VertexKey] = {}

        def key_of(t: frozenset[int]) -> VertexKey:
            if t not in keys:
                keys[t] = self.vertex_key(p, element, t)
            return keys[t]

        return interval_cubes(types, key_of)

    def assemble(
        self,
        p: ProductPresentation,
        chambers: Iterable[NormalForm],
        types: Sequence[frozenset[int]],
        name: str = "",
    ) -> TypedCubeComplex:
        """Union of chamber cones glued along equal vertex keys."""
        cubes: dict[frozenset[Any], Cube] = {}
        vertex_types: dict[VertexKey, frozenset[int]] = {}
        for element in chambers:
            for q in self.chamber_cubes(p, element, types):
                cubes.setdefault(q.key, q)
                for key in q.corners:
                    vertex_types[key] = frozenset(key[0])
        return TypedCubeComplex(
            vertex_types=vertex_types,
            cubes=tuple(cubes.values()),
            center=((), ()) if ((), ()) in vertex_types else None,
            name=name,
        )

    def adjacency_type(self, p: ProductPresentation, c1: Chamber, c2: Chamber) -> Adjacency:
        """Equal, i-adjacent (with i), or not adjacent."""
        delta = self.gp.multiply(p, self.gp.inverse(p, c1.element), c2.element)
        if delta.is_identity():
            return Adjacency(kind=AdjacencyKind.EQUAL)
        if delta.length == 1:
            return Adjacency(kind=AdjacencyKind.ADJACENT, vertex=delta.syllables[0][0])
        return Adjacency(kind=AdjacencyKind.NOT_ADJACENT)

    # Residues

    def residue(self, p: ProductPresentation, vertex_type: Iterable[int], chamber: Chamber) -> Residue:
        """Residue R(J, C) with its canonical base chamber."""
        vertex_type = frozenset(vertex_type)
        base = self.gp.coset_rep(p, chamber.element, vertex_type)
        return Residue(type=vertex_type, base=Chamber(element=base))

    def residue_chambers(
        self,
        p: ProductPresentation,
        r: Residue,
        cap: Optional[int] = None,
    ) -> list[Chamber]:
        """
        Chambers of a residue in canonical order.

        Args:
            p: Graph product presentation
            r: Residue
            cap: Required for infinite residues; truncates in canonical order

        Returns:
            Chambers base * x for x in Gamma_J

        Raises:
            ResidueInfinite: If Gamma_J is infinite and no cap is given
        """
        base = r.base.element
        if self.gp.is_finite_subgroup(p, r.type):
            elements = self.gp.subgroup_elements(p, r.type)
        else:
            if cap is None:
                raise ResidueInfinite(f"Residue {r} is infinite", {"type": sorted(r.type)})
            elements = self._first_elements(p, r.type, cap)
        chambers = sorted(
            (self.gp.multiply(p, base, x) for x in elements), key=NormalForm.sort_key
        )
        if cap is not None:
            chambers = chambers[:cap]
        return [Chamber(element=c) for c in chambers]

    def _first_elements(self, p: ProductPresentation, subset: frozenset[int], cap: int) -> list[NormalForm]:
        radius = 0
        while True:
            ball = self.gp.enumerate_ball(p, radius, subset=subset, cap=max(cap * 64, settings.residue_cap))
            if len(ball) >= cap:
                return ball[:cap]
            radius += 1

    def perp_eq_ball(self, p: ProductPresentation, i: int, base: NormalForm, radius: int) -> list[NormalForm]:
        """
        Chambers base * x of R(i-perp-eq, C) with the i-perp part of x of length at most radius.
        """
        perp = p.perp(i)
        xs = self.gp.enumerate_ball(p, radius + 1, subset=p.perp_eq(i))
        return [
            self.gp.multiply(p, base, x) for x in xs
            if self.gp.retract(p, perp, x).length <= radius
        ]

    def i_boundary_components(
        self,
        p: ProductPresentation,
        i: int,
        r: Residue,
        radius: Optional[int] = None,
    ) -> BoundaryComponents:
        """
        i-boundary components of an i-perp-eq residue, labelled by G_i.

        Two chambers lie in the same component iff they differ by Gamma_i-perp,
        so the label of base * x is the {i}-retraction of x.

        Raises:
            WrongResidueType: If the residue type is not i-perp-eq
        """
        if r.type != p.perp_eq(i):
            raise WrongResidueType(
                f"Residue type {sorted(r.type)} is not the i-perp-eq of {p.names[i]}",
                {"vertex": i, "type": sorted(r.type)},
            )
        radius = settings.default_radius if radius is None else radius
        base = r.base.element
        base_inverse = self.gp.inverse(p, base)
        component_of = {}
        for chamber in self.perp_eq_ball(p, i, base, radius):
            x = self.gp.multiply(p, base_inverse, chamber)
            coordinate = self.gp.retract(p, [i], x)
            component_of[chamber] = coordinate.syllables[0][1] if coordinate.syllables else p.groups[i].identity
        return BoundaryComponents(
            vertex=i, residue=r, component_of=component_of, count=len(set(component_of.values()))
        )

    # Balls

    def build_ball(self, p: ProductPresentation, radius: int) -> BuildingBall:
        """
        Gallery ball of radius r around C_* as a typed cube complex.

        Args:
            p: Graph product presentation
            radius: Gallery radius

        Returns:
            BuildingBall with its interior vertices

        Raises:
            BallTooLarge: If the chamber count exceeds settings.ball_cap
        """
        self.logger.info(f"Building ball of radius {radius} for {p}")
        chambers = self.gp.enumerate_ball(p, radius)
        types = self.spherical_types(p)
        complex_ = self.assemble(p, chambers, types, name=f"ball(r={radius})")
        interior = frozenset(
            key for key in complex_.vertex_types if self._is_interior(p, key, radius)
        )
        self.logger.info(
            f"Ball has {len(chambers)} chambers, {len(complex_.vertex_types)} vertices, "
            f"cells {complex_.cell_counts()}"
        )
        return BuildingBall(radius=radius, chambers=tuple(chambers), complex=complex_, interior=interior)

    def _is_interior(self, p: ProductPresentation, key: VertexKey, radius: int) -> bool:
        # rep is minimal in its coset, so |rep x| = |rep| + |x| for x in Gamma_J
        vertex_type, rep = key
        return len(rep) + sum(1 for j in vertex_type if p.order(j) > 1) <= radius

    def interior_vertices(self, ball: BuildingBall) -> list[BuildingVertex]:
        return [BuildingVertex.from_key(k) for k in sorted(ball.interior)]

    def chambers_at(self, p: ProductPresentation, ball: BuildingBall, key: VertexKey) -> list[NormalForm]:
        """Chambers of the ball containing a vertex."""
        vertex_type, rep = key
        rep_form = NormalForm(syllables=rep)
        present = set(ball.chambers)
        return [
            c for c in (self.gp.multiply(p, rep_form, x) for x in self.gp.subgroup_elements(p, vertex_type))
            if c in present
        ]

    def chamber_graph(self, p: ProductPresentation, radius: int) -> nx.Graph:
        """Chamber adjacency graph of the ball, edges labelled by vertex index."""
        chambers = self.gp.enumerate_ball(p, radius)
        present = set(chambers)
        graph = nx.Graph()
        for c in chambers:
            graph.add_node(c, label=str(c))
        for c in chambers:
            for s in self.gp.generator_keys(p):
                d = self.gp.multiply(p, c, NormalForm(syllables=(s,)))
                if d in present:
                    graph.add_edge(c, d, vertex=s[0], label=p.names[s[0]])
        return graph

    def gallery_distance_bfs(self, p: ProductPresentation, radius: int) -> dict[NormalForm, int]:
        """Gallery distance from C_* by breadth-first search on the chamber graph."""
        return dict(nx.single_source_shortest_path_length(self.chamber_graph(p, radius), NormalForm()))

    def lower_link_check(self, p: ProductPresentation, ball: BuildingBall, v: BuildingVertex) -> OctahedronResult:
        """
        Lower link of an interior vertex is a thickened octahedron.

        Raises:
            VertexOnBoundary: If v is not interior to the ball
        """
        if not ball.is_interior(v.key):
            raise VertexOnBoundary(f"Vertex {v.key} is not interior", {"type": sorted(v.type)})
        lower = self.cubical.lower_link(ball.complex, v.key)
        return self.cubical.is_thickened_octahedron(lower)

    # Product structure of i-perp-eq residues

    def residue_product_check(
        self,
        p: ProductPresentation,
        i: int,
        base: Chamber,
        radius: int,
    ) -> ResidueProductReport:
        """
        Verify R(i-perp-eq, C) = R({i}, C) x R(i-perp, C) on a ball.

        The map sends (vertex of type S1 in chamber base g, vertex of type S2
        in chamber base y) to the vertex of type S1 | S2 in chamber base g y.

        Args:
            p: Graph product presentation
            i: Vertex index
            base: Any chamber of the residue
            radius: Radius in the i-perp factor

        Returns:
            ResidueProductReport with cell counts

        Raises:
            IsomorphismFailure: If the map is not a type-preserving isomorphism
        """
        perp = p.perp(i)
        root = self.gp.coset_rep(p, base.element, p.perp_eq(i))
        group_i = [NormalForm(syllables=((i, g),)) if g != p.groups[i].identity else NormalForm()
                   for g in p.groups[i].elements()]
        perp_ball = self.gp.enumerate_ball(p, radius, subset=perp)
        types_i = self.spherical_types(p, within=[i])
        types_perp = self.spherical_types(p, within=perp)

        first = self.assemble(p, [self.gp.multiply(p, root, g) for g in group_i], types_i, name="R(i)")
        second = self.assemble(p, [self.gp.multiply(p, root, y) for y in perp_ball], types_perp, name="R(i-perp)")
        product = self.cubical.cube_product(first, second)

        vertex_map: dict[tuple[VertexKey, VertexKey], VertexKey] = {}
        for g in group_i:
            for s1 in types_i:
                k1 = self.vertex_key(p, self.gp.multiply(p, root, g), s1)
                for y in perp_ball:
                    for s2 in types_perp:
                        k2 = self.vertex_key(p, self.gp.multiply(p, root, y), s2)
                        image = self.vertex_key(p, self.gp.product(p, [root, g, y]), s1 | s2)
                        if vertex_map.setdefault((k1, k2), image) != image:
                            raise IsomorphismFailure(
                                "Product map is not well defined", {"pair": str((k1, k2))}
                            )

        target = self.assemble(
            p, self.perp_eq_ball(p, i, root, radius), self.spherical_types(p, within=p.perp_eq(i)),
            name="R(i-perp-eq)",
        )
        if set(vertex_map) != set(product.vertex_types):
            raise IsomorphismFailure("Product map is not defined on every vertex")
        if len(set(vertex_map.values())) != len(vertex_map) or set(vertex_map.values()) != set(target.vertex_types):
            raise IsomorphismFailure(
                "Product map is not a vertex bijection",
                {"product": len(vertex_map), "residue": len(target.vertex_types)},
            )
        for pair, image in vertex_map.items():
            if product.vertex_types[pair] != target.vertex_types[image]:
                raise IsomorphismFailure(f"Type mismatch at {image}")
        images = {frozenset(vertex_map[c] for c in q.corners) for q in product.cubes}
        if images != set(target.cube_index):
            raise IsomorphismFailure(
                "Product map is not a cube bijection",
                {"product": len(product.cubes), "residue": len(target.cubes)},
            )

        self.logger.info(
            f"Residue product verified at {p.names[i]}: {len(vertex_map)} vertices, {len(target.cubes)} cubes"
        )
        return ResidueProductReport(
            vertex=i,
            base=root,
            radius=radius,
            factor_vertices=(len(first.vertex_types), len(second.vertex_types)),
            factor_cubes=(len(first.cubes), len(second.cubes)),
            vertex_count=len(target.vertex_types),
            cube_count=len(target.cubes),
            cell_counts=target.cell_counts(),
        )

    # Galleries

    def gallery(self, p: ProductPresentation, elements: Iterable[Iterable[Iterable[int]]]) -> Gallery:
        """Gallery from raw syllable words, one per chamber."""
        return Gallery(chambers=tuple(Chamber(element=self.gp.normalize(p, w)) for w in elements))

    def letters_of(self, p: ProductPresentation, g: Gallery) -> list[Letter]:
        """
        Letters c_k^-1 c_(k+1): None for a repeated chamber, else one syllable.

        Raises:
            InvalidGallery: If consecutive chambers are not adjacent
        """
        letters: list[Letter] = []
        for k, (c1, c2) in enumerate(zip(g.chambers, g.chambers[1:])):
            delta = self.gp.multiply(p, self.gp.inverse(p, c1.element), c2.element)
            if delta.length > 1:
                raise InvalidGallery(
                    f"Chambers {k} and {k + 1} are not adjacent", {"position": k}
                )
            letters.append(delta.syllables[0] if delta.syllables else None)
        return letters

    def reduce_closed_gallery(self, p: ProductPresentation, g: Gallery) -> GalleryCertificate:
        """
        Reduce a closed gallery at C_* to the trivial one.

        Rank-1 homotopies drop repeated chambers, merge and cancel letters of
        one vertex; each swap of commuting letters is a lassoe in a rank-2
        residue.

        Args:
            p: Graph product presentation
            g: Gallery starting and ending at C_*

        Returns:
            GalleryCertificate whose moves, replayed backwards, rebuild g

        Raises:
            NotClosed: If g does not start and end at C_*
            InvalidGallery: If g has non-adjacent consecutive chambers
        """
        if not g.chambers[0].element.is_identity() or not g.chambers[-1].element.is_identity():
            raise NotClosed("Gallery must start and end at the base chamber")
        original = self.letters_of(p, g)
        word: list[Letter] = list(original)
        moves: list[GalleryMove] = []
        lassoes: list[Lassoe] = []

        index = 0
        while index < len(word):
            if word[index] is None:
                moves.append(GalleryMove(kind=MoveKind.DROP, index=index, letters=(None,)))
                del word[index]
            else:
                index += 1

        reduced = 0
        while reduced < len(word):
            i, a = word[reduced]
            target = None
            for k in range(reduced - 1, -1, -1):
                j = word[k][0]
                if j == i:
                    target = k
                    break
                if not p.commute(i, j):
                    break
            if target is None:
                reduced += 1
                continue

            for pos in range(reduced - 1, target, -1):
                left, right = word[pos], word[pos + 1]
                prefix = self.gp.normalize(p, word[:pos])
                lassoes.append(Lassoe(prefix=prefix, first=left, second=right))
                moves.append(GalleryMove(kind=MoveKind.SWAP, index=pos, letters=(left, right)))
                word[pos], word[pos + 1] = right, left

            pair = (word[target], word[target + 1])
            merged = p.groups[i].mul(pair[0][1], pair[1][1])
            if merged == p.groups[i].identity:
                moves.append(GalleryMove(kind=MoveKind.CANCEL, index=target, letters=pair))
                del word[target:target + 2]
                reduced -= 1
            else:
                moves.append(GalleryMove(kind=MoveKind.MERGE, index=target, letters=pair))
                word[target:target + 2] = [(i, merged)]

        if word:
            raise NotClosed("Gallery word does not reduce to the identity", {"residual": [list(s) for s in word]})
        self.logger.debug(f"Reduced gallery of length {g.length} with {len(lassoes)} lassoes")
        return GalleryCertificate(word=tuple(original), moves=tuple(moves), lassoes=tuple(lassoes))

    def replay_certificate(self, p: ProductPresentation, certificate: GalleryCertificate) -> Gallery:
        """Undo the moves of a certificate, starting from the empty word."""
        word: list[Letter] = []
        for move in reversed(certificate.moves):
            if move.kind == MoveKind.SWAP:
                word[move.index], word[move.index + 1] = move.letters
            elif move.kind == MoveKind.DROP:
                word.insert(move.index, None)
            elif move.kind == MoveKind.CANCEL:
                word[move.index:move.index] = list(move.letters)
            else:
                word[move.index:move.index + 1] = list(move.letters)
        chambers = [Chamber()]
        for letter in word:
            current = chambers[-1].element
            if letter is not None:
                current = self.gp.multiply(p, current, NormalForm(syllables=(letter,)))
            chambers.append(Chamber(element=current))
        return Gallery(chambers=tuple(chambers))

    def lassoe_gallery(self, p: ProductPresentation, lassoe: Lassoe) -> Gallery:
        """The 4-cycle of a lassoe as a closed gallery at its prefix chamber."""
        a = NormalForm(syllables=(lassoe.first,))
        b = NormalForm(syllables=(lassoe.second,))
        prefix = lassoe.prefix
        ab = self.gp.multiply(p, a, b)
        return Gallery(chambers=tuple(Chamber(element=e) for e in (
            prefix,
            self.gp.multiply(p, prefix, a),
            self.gp.multiply(p, prefix, ab),
            self.gp.multiply(p, prefix, b),
            prefix,
        )))


# Singleton instance
building_service = BuildingService()
