"""
Polygonal Service.
Links, curvature conditions, walls and e-walls, geometric walls, barycentric
subdivision and the self-intersection tests of walls under a group action.
"""
from collections import defaultdict
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Optional

import networkx as nx

from app.core.config import settings
from app.core.exceptions import InvalidAction, InvalidComplex, TrianglePresent
from app.core.logging import LoggerMixin
from app.domain.complexes import sort_key, sorted_labels
from app.domain.groups import FiniteGroup
from app.domain.polygonal import (
    BarycentricSubdivision,
    CellMap,
    Corner,
    CurvatureCondition,
    CurvatureReport,
    DeckAction,
    GeometricWallReport,
    LinkGraph,
    OrientedEdge,
    Pairing,
    Polygon,
    PolygonalComplex,
    Verdict,
    Wall,
    WallKind,
    reverse,
)

ONE = Fraction(1)
HALF = Fraction(1, 2)


def condition_term(which: CurvatureCondition, k: int) -> Optional[Fraction]:
    """Contribution of a corner of a k-gon; None when the corner alone breaks the condition."""
    if which == CurvatureCondition.C:
        return HALF - Fraction(1, k)
    if which == CurvatureCondition.C2:
        return HALF - Fraction(1, 2 * (k // 2))
    if which == CurvatureCondition.C4:
        f = k // 4
        return HALF - Fraction(1, 4 * f) if f else None
    raise ValueError(f"No additive term for condition {which}")


def side_offset(k: int, kind: WallKind) -> int:
    """
    Number l of sides strictly between paired sides on the short side.

    Parallel: l <= l' < l + 2. Even-parallel: l odd and l <= l' < l + 4.
    """
    if kind == WallKind.PARALLEL:
        return (k - 2) // 2 if k % 2 == 0 else (k - 1) // 2 - 1
    return 2 * (k // 4) - 1


class PolygonalService(LoggerMixin):
    """Service for explicit polygonal complexes."""

    def __init__(self):
        """Initialize polygonal service."""
        self.degree_cap = settings.link_degree_cap
        self.cycle_cap = settings.link_cycle_cap

    def validate(self, x: PolygonalComplex) -> PolygonalComplex:
        """
        Check incidence and boundary cycles.

        Raises:
            InvalidComplex: On unknown cells, open cycles or polygons with
                fewer than 3 sides
        """
        known = set(x.vertices)
        for e, edge in x.edges.items():
            if edge.id != e:
                raise InvalidComplex(f"Edge stored under {e!r} has id {edge.id!r}")
            if edge.tail not in known or edge.head not in known:
                raise InvalidComplex(f"Edge {e!r} has an unknown endpoint", {"edge": str(e)})
        for pid, polygon in x.polygons.items():
            if polygon.id != pid:
                raise InvalidComplex(f"Polygon stored under {pid!r} has id {polygon.id!r}")
            if polygon.k < 3:
                raise InvalidComplex(
                    f"Polygon {pid!r} has {polygon.k} sides", {"polygon": str(pid), "k": polygon.k}
                )
            for e, _ in polygon.cycle:
                if e not in x.edges:
                    raise InvalidComplex(
                        f"Polygon {pid!r} uses unknown edge {e!r}", {"polygon": str(pid), "edge": str(e)}
                    )
            for j, oe in enumerate(polygon.cycle):
                following = polygon.side(j + 1)
                if x.terminal(oe) != x.initial(following):
                    raise InvalidComplex(
                        f"Boundary of polygon {pid!r} is not a cycle at side {j}",
                        {"polygon": str(pid), "side": j},
                    )
        return x

    # Links

    def link_graph(self, x: PolygonalComplex, v: Any) -> LinkGraph:
        """
        Link of v.

        The corner of polygon pi before side j joins o_j to the reverse of
        o_{j-1}; both leave the vertex initial(o_j).
        """
        nodes = [oe for oe in x.oriented_edges if x.initial(oe) == v]
        corners = []
        for pid in x.polygon_ids():
            polygon = x.polygons[pid]
            for j, oe in enumerate(polygon.cycle):
                if x.initial(oe) != v:
                    continue
                corners.append(Corner(
                    polygon=pid, position=j, ends=(oe, reverse(polygon.side(j - 1))), k=polygon.k
                ))
        return LinkGraph(vertex=v, nodes=tuple(nodes), corners=tuple(corners))

    def link_graphs(self, x: PolygonalComplex) -> dict[Any, LinkGraph]:
        return {v: self.link_graph(x, v) for v in x.vertices}

    def link_cycles(self, link: LinkGraph) -> Iterable[tuple[tuple[OrientedEdge, ...], tuple[int, ...]]]:
        """
        Simple cycles of the link with the minimal corner weights.

        Loops and 2-cycles come from the multigraph; longer cycles from the
        simple graph keeping the smallest k per node pair. Every condition
        is monotone in k, so minimal weights decide every cycle on the same
        nodes.
        """
        by_pair: dict[frozenset, list[int]] = defaultdict(list)
        for c in link.corners:
            by_pair[frozenset(c.ends)].append(c.k)

        for pair in sorted(by_pair, key=lambda s: sorted(map(sort_key, s))):
            weights = sorted(by_pair[pair])
            nodes = tuple(sorted(pair, key=sort_key))
            if len(nodes) == 1:
                yield nodes, (weights[0],)
            elif len(weights) >= 2:
                yield nodes, (weights[0], weights[1])

        simple = nx.Graph()
        simple.add_nodes_from(link.nodes)
        for pair, weights in by_pair.items():
            if len(pair) == 2:
                simple.add_edge(*pair, k=min(weights))
        for cycle in nx.simple_cycles(simple, length_bound=self.cycle_cap):
            if len(cycle) < 3:
                continue
            weights = tuple(
                simple.edges[cycle[j], cycle[(j + 1) % len(cycle)]]["k"] for j in range(len(cycle))
            )
            yield tuple(cycle), weights

    def cycle_satisfies(
        self, which: CurvatureCondition, weights: tuple[int, ...], strict: bool = False
    ) -> tuple[bool, Optional[Fraction]]:
        """Evaluate one link cycle; returns (holds, term sum)."""
        if which == CurvatureCondition.Q:
            ok = len(weights) >= (5 if strict else 4) and all(k >= 4 for k in weights)
            return ok, None
        terms = [condition_term(which, k) for k in weights]
        if any(t is None for t in terms):
            return False, None
        total = sum(terms, Fraction(0))
        return (total > ONE if strict else total >= ONE), total

    def check_condition(
        self,
        x: PolygonalComplex,
        which: CurvatureCondition | str,
        strict: bool = False,
        vertices: Optional[Iterable[Any]] = None,
    ) -> CurvatureReport:
        """
        Evaluate (Q), (C), (C2) or (C4) on every simple cycle of every link.

        Args:
            x: Polygonal complex
            which: Condition name
            strict: Primed variant (strict inequality, n >= 5 for Q)
            vertices: Restrict to these vertices (e.g. interior ones)

        Returns:
            CurvatureReport; UNVERIFIED when a link exceeds the degree or
            cycle-length caps and no failure was found
        """
        which = CurvatureCondition(which)
        vertices = list(x.vertices if vertices is None else vertices)
        unverified: Optional[tuple[Any, str]] = None

        for v in vertices:
            link = self.link_graph(x, v)
            g = link.graph()
            degree = max((d for _, d in g.degree()), default=0)
            if degree > self.degree_cap:
                unverified = unverified or (v, f"link degree {degree} exceeds {self.degree_cap}")
                continue
            h = nx.Graph(g)
            h.remove_edges_from(list(nx.selfloop_edges(h)))
            blocks = [len(c) for c in nx.biconnected_components(h)]
            if max(blocks, default=0) > self.cycle_cap:
                unverified = unverified or (v, f"link block of size {max(blocks)} exceeds {self.cycle_cap}")
                continue
            for cycle, weights in self.link_cycles(link):
                ok, total = self.cycle_satisfies(which, weights, strict)
                if not ok:
                    self.logger.debug(f"Condition {which.value} fails at {v!r} on {cycle}")
                    return CurvatureReport(
                        condition=which, strict=strict, verdict=Verdict.FAIL, vertex=v,
                        cycle=cycle, weights=weights, total=total, checked_vertices=len(vertices),
                    )

        if unverified:
            self.logger.warning(f"Condition {which.value} unverified at {unverified[0]!r}: {unverified[1]}")
            return CurvatureReport(
                condition=which, strict=strict, verdict=Verdict.UNVERIFIED, vertex=unverified[0],
                checked_vertices=len(vertices), reason=unverified[1],
            )
        label = which.value + ("'" if strict else "")
        self.logger.info(f"Condition {label} holds on {len(vertices)} links")
        return CurvatureReport(
            condition=which, strict=strict, verdict=Verdict.PASS, checked_vertices=len(vertices)
        )

    # Walls

    def parallel_partner(self, polygon: Polygon, j: int, kind: WallKind = WallKind.PARALLEL) -> OrientedEdge:
        """The oriented edge paired inside the polygon with forward side j."""
        if polygon.k == 3:
            raise TrianglePresent(f"Polygon {polygon.id!r} is a triangle", {"polygon": str(polygon.id)})
        offset = side_offset(polygon.k, kind)
        return reverse(polygon.side(j + offset + 1))

    def in_polygon_pairs(self, polygon: Polygon, kind: WallKind) -> list[Pairing]:
        offset = side_offset(polygon.k, kind)
        return [
            Pairing(polygon=polygon.id, first=j, second=(j + offset + 1) % polygon.k)
            for j in range(polygon.k)
        ]

    def _classes(self, x: PolygonalComplex, kind: WallKind) -> list[Wall]:
        triangles = [pid for pid in x.polygon_ids() if x.polygons[pid].k == 3]
        if triangles:
            raise TrianglePresent(
                f"Parallelism needs polygons with at least 4 sides; {len(triangles)} triangles found",
                {"polygons": [str(p) for p in triangles]},
            )
        g = nx.Graph()
        g.add_nodes_from(x.oriented_edges)
        pairing_of: dict[frozenset, list[Pairing]] = defaultdict(list)
        for pid in x.polygon_ids():
            polygon = x.polygons[pid]
            for pairing in self.in_polygon_pairs(polygon, kind):
                a = polygon.side(pairing.first)
                b = reverse(polygon.side(pairing.second))
                g.add_edge(a, b)
                pairing_of[frozenset((a, b))].append(pairing)

        walls = []
        for component in nx.connected_components(g):
            members = frozenset(component)
            pairs = [p for key, ps in pairing_of.items() if key <= members for p in ps]
            pairs.sort(key=lambda p: (sort_key(p.polygon), p.first))
            vertex_set = frozenset(v for e, _ in members for v in (x.edges[e].tail, x.edges[e].head))
            walls.append(Wall(kind=kind, oriented_edges=members, pairs=tuple(pairs), vertex_set=vertex_set))
        walls.sort(key=lambda w: [(sort_key(e), -s) for e, s in w.members()])
        return walls

    def compute_walls(self, x: PolygonalComplex) -> list[Wall]:
        """
        Partition the oriented edges into parallelism classes.

        Raises:
            TrianglePresent: If some polygon has 3 sides
        """
        walls = self._classes(x, WallKind.PARALLEL)
        self.logger.info(f"Computed {len(walls)} walls on {len(x.oriented_edges)} oriented edges")
        return walls

    def compute_ewalls(self, x: PolygonalComplex) -> list[Wall]:
        """Partition the oriented edges into even-parallelism classes."""
        walls = self._classes(x, WallKind.EVEN)
        self.logger.info(f"Computed {len(walls)} e-walls on {len(x.oriented_edges)} oriented edges")
        return walls

    def wall_of(self, walls: Iterable[Wall], oe: OrientedEdge) -> Wall:
        for w in walls:
            if oe in w:
                return w
        raise KeyError(f"No wall contains {oe}")

    def wall_graph(self, x: PolygonalComplex, m: Wall) -> nx.MultiGraph:
        """
        Geometric wall inside the barycentric subdivision.

        Nodes are ("e", edge) midpoints and ("p", polygon) centers; every
        diameter contributes two half-diameters keyed by (polygon, side).
        """
        g = nx.MultiGraph()
        for polygon_id, sides in sorted(m.diameters, key=lambda d: (sort_key(d[0]), sorted(d[1]))):
            polygon = x.polygons[polygon_id]
            center = ("p", polygon_id)
            g.add_node(center, rank=2)
            for j in sorted(sides):
                e = polygon.side(j)[0]
                g.add_node(("e", e), rank=1)
                g.add_edge(("e", e), center, key=(polygon_id, j))
        return g

    def geometric_wall(self, x: PolygonalComplex, m: Wall) -> GeometricWallReport:
        """
        Report on the union of diameters dual to a wall.

        The wall graph is a forest iff #edges = #nodes - #components,
        counting multi-edges.
        """
        g = self.wall_graph(x, m)
        components = nx.number_connected_components(g) if g.number_of_nodes() else 0
        acyclic = g.number_of_edges() == g.number_of_nodes() - components
        per_polygon: dict[Any, int] = defaultdict(int)
        for polygon_id, _ in m.diameters:
            per_polygon[polygon_id] += 1
        return GeometricWallReport(
            wall=m,
            node_count=g.number_of_nodes(),
            edge_count=g.number_of_edges(),
            acyclic=acyclic,
            diameters_per_polygon=dict(per_polygon),
            opposite_free=not (m.oriented_edges & m.reversed_edges()),
        )

    def restrict_wall(self, m: Wall, polygons: Iterable[Any]) -> Wall:
        """The part of a wall whose diameters lie in the given polygons."""
        keep = set(polygons)
        pairs = tuple(p for p in m.pairs if p.polygon in keep)
        return m.model_copy(update={"pairs": pairs})

    # Subdivision

    def barycentric_subdivision(self, x: PolygonalComplex) -> BarycentricSubdivision:
        """Barycentric subdivision with ranks; a k-gon contributes 2k triangles."""
        rank: dict[tuple[str, Any], int] = {}
        for v in x.vertices:
            rank[("v", v)] = 0
        for e in sorted_labels(x.edges):
            rank[("e", e)] = 1
        for pid in x.polygon_ids():
            rank[("p", pid)] = 2

        edges = []
        for e in sorted_labels(x.edges):
            edge = x.edges[e]
            edges.append((("v", edge.tail), ("e", e)))
            edges.append((("v", edge.head), ("e", e)))
        triangles = []
        for pid in x.polygon_ids():
            polygon = x.polygons[pid]
            for oe in polygon.cycle:
                edges.append((("v", x.initial(oe)), ("p", pid)))
            for oe in polygon.cycle:
                edges.append((("e", oe[0]), ("p", pid)))
                triangles.append((("v", x.initial(oe)), ("e", oe[0]), ("p", pid)))
                triangles.append((("v", x.terminal(oe)), ("e", oe[0]), ("p", pid)))
        return BarycentricSubdivision(rank=rank, edges=tuple(edges), triangles=tuple(triangles))

    # Actions

    def trivial_action(self, x: PolygonalComplex) -> DeckAction:
        group = FiniteGroup(table=((0,),), identity=0, inverses=(0,), name="1")
        identity = CellMap(
            vertices={v: v for v in x.vertices},
            edges={e: (e, 1) for e in x.edges},
            polygons={p: (p, 1) for p in x.polygons},
        )
        return DeckAction(group=group, maps={0: identity})

    def polygon_image(self, x: PolygonalComplex, cell_map: CellMap, pid: Any) -> tuple[Any, int]:
        """
        Target polygon and eta of an edge map on a polygon.

        eta is +1 when the image of the based cycle is a rotation of the
        target cycle and -1 when it is a rotation of its reverse.

        Raises:
            InvalidAction: If the image cycle bounds no polygon
        """
        image = tuple(cell_map.edge_image(oe) for oe in x.polygons[pid].cycle)
        for qid in x.polygon_ids():
            target = x.polygons[qid]
            if target.k != len(image):
                continue
            for start in range(target.k):
                if target.rotated(start) == image:
                    return qid, 1
            flipped = Polygon(id=qid, cycle=target.reversed_cycle())
            for start in range(target.k):
                if flipped.rotated(start) == image:
                    return qid, -1
        raise InvalidAction(f"Image of polygon {pid!r} bounds no polygon", {"polygon": str(pid)})

    def action_from_maps(
        self,
        x: PolygonalComplex,
        group: FiniteGroup,
        vertex_maps: dict[int, dict[Any, Any]],
        edge_maps: dict[int, dict[Any, tuple[Any, int]]],
    ) -> DeckAction:
        """Complete vertex and edge maps with polygon images and validate."""
        maps = {}
        for g in group.elements():
            partial = CellMap(vertices=vertex_maps[g], edges=edge_maps[g])
            polygons = {pid: self.polygon_image(x, partial, pid) for pid in x.polygons}
            maps[g] = partial.model_copy(update={"polygons": polygons})
        return self.validate_action(x, DeckAction(group=group, maps=maps))

    def validate_action(self, x: PolygonalComplex, a: DeckAction) -> DeckAction:
        """
        Check incidence, bijectivity and the composition law.

        Raises:
            InvalidAction: On the first violation found
        """
        for g in a.elements():
            m = a[g]
            if sorted(map(sort_key, m.vertices.values())) != sorted(map(sort_key, x.vertices)):
                raise InvalidAction(f"Element {g} does not permute the vertices", {"element": g})
            if len({target for target, _ in m.edges.values()}) != len(x.edges) or set(m.edges) != set(x.edges):
                raise InvalidAction(f"Element {g} does not permute the edges", {"element": g})
            for e, edge in x.edges.items():
                image = m.edge_image((e, 1))
                if (x.initial(image), x.terminal(image)) != (m.vertices[edge.tail], m.vertices[edge.head]):
                    raise InvalidAction(
                        f"Element {g} breaks the incidence of edge {e!r}", {"element": g, "edge": str(e)}
                    )
            for pid in x.polygons:
                if self.polygon_image(x, m, pid) != m.polygons[pid]:
                    raise InvalidAction(
                        f"Element {g} maps polygon {pid!r} inconsistently", {"element": g, "polygon": str(pid)}
                    )
        for g, h in combinations(a.elements(), 2):
            for first, second in ((g, h), (h, g)):
                gh = a.group.mul(first, second)
                for oe in x.oriented_edges:
                    if a[first].edge_image(a[second].edge_image(oe)) != a[gh].edge_image(oe):
                        raise InvalidAction(
                            f"Maps of {first} and {second} do not compose to {gh}",
                            {"elements": [first, second]},
                        )
        return a

    def translate_wall(self, a: DeckAction, g: int, m: Wall) -> frozenset[OrientedEdge]:
        return frozenset(a[g].edge_image(oe) for oe in m.oriented_edges)

    def self_intersection(self, x: PolygonalComplex, a: DeckAction, m: Wall) -> list[int]:
        """
        Elements g with gM != M whose geometric wall meets that of M.

        Geometric walls meet iff they share a dual edge midpoint or pass
        through a common polygon center.
        """
        bad = []
        for g in a.elements():
            moved = self.translate_wall(a, g, m)
            if moved == m.oriented_edges:
                continue
            moved_edges = {e for e, _ in moved}
            moved_polygons = {a[g].polygons[p][0] for p in m.polygons}
            if moved_edges & m.edges or moved_polygons & m.polygons:
                bad.append(g)
        if bad:
            self.logger.debug(f"Wall of size {len(m)} meets {len(bad)} of its translates")
        return bad

    def bad_elements(self, x: PolygonalComplex, a: DeckAction, m: Wall) -> list[int]:
        """
        B(M, G): g with gM != M and d(v', g v) <= n for some v, v' in V(M).

        n is the largest polygon side count; distances in the 1-skeleton.
        """
        n = x.max_sides
        reach = nx.multi_source_dijkstra_path_length(
            nx.Graph(x.one_skeleton()), set(m.vertex_set), cutoff=n
        ) if m.vertex_set else {}
        bad = []
        for g in a.elements():
            if self.translate_wall(a, g, m) == m.oriented_edges:
                continue
            if any(a[g].vertices[v] in reach for v in m.vertex_set):
                bad.append(g)
        return bad


# Singleton instance
polygonal_service = PolygonalService()
