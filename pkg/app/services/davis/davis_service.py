"""
Davis Service.
Word problem of two-dimensional Coxeter groups, balls of the Davis complex
and their block structure, finite quotients, Aut(L, m) and reflection walls.
"""
import json
from collections import deque
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Iterable, Optional, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from app.core.config import settings
from app.core.exceptions import (
    BallTooLarge,
    ConfigurationException,
    CoxeterException,
    NotAReflection,
    NotTwoDimensional,
    RelationViolated,
    WordTooLong,
)
from app.core.logging import LoggerMixin
from app.domain.coxeter import (
    BlockComplex,
    BlockComplexKind,
    CoxeterData,
    CoxWord,
    ReflectionWallReport,
    TwoDimensionalReport,
)
from app.domain.groups import FiniteGroup, GroupHom, Relator, SourceKind
from app.domain.polygonal import Edge, Polygon, PolygonalComplex
from app.services.groups.group_service import group_service
from app.services.polygonal.polygonal_service import polygonal_service

Permutation = tuple[int, ...]


def alternating(s: int, t: int, length: int) -> tuple[int, ...]:
    return tuple(s if k % 2 == 0 else t for k in range(length))


class DavisService(LoggerMixin):
    """Service for Coxeter systems (W, S) built from (L, m)."""

    def __init__(self):
        """Initialize Davis service."""
        # Saturation memo: (signature, word) -> canonical form
        self._canonical: dict[tuple, CoxWord] = {}

    def data_from_config(self, data: dict[str, Any]) -> CoxeterData:
        """
        Parse {"vertices": [...], "edges": [[i, j], ...], "weights": {"[i,j]": m},
        "default_weight": m}.

        Vertices may be named; edges and weight keys use names or indices.

        Raises:
            ConfigurationException: On unknown vertices or bad weights
        """
        try:
            names = [str(v) for v in data.get("vertices", [])]
            index = {name: k for k, name in enumerate(names)}

            def resolve(v: Any) -> int:
                return index[str(v)] if str(v) in index else int(v)

            weights: dict[tuple[int, int], int] = {}
            default = data.get("default_weight")
            for a, b in data.get("edges", []):
                i, j = sorted((resolve(a), resolve(b)))
                if default is None:
                    raise ConfigurationException(f"Edge [{a}, {b}] has no weight and no default_weight")
                weights[(i, j)] = int(default)
            for key, m in data.get("weights", {}).items():
                a, b = json.loads(key) if key.strip().startswith("[") else key.split(",")
                i, j = sorted((resolve(a), resolve(b)))
                weights[(i, j)] = int(m)
            return CoxeterData(names=tuple(names), weights=weights)
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigurationException(f"Invalid Coxeter config: {e}", {"field": "weights"})

    # Word problem

    def _check_letters(self, d: CoxeterData, word: Sequence[int]) -> None:
        for letter in word:
            if not 0 <= letter < d.size:
                raise CoxeterException(f"Letter {letter} is not a generator", {"letter": letter})

    def braid_class(self, d: CoxeterData, word: tuple[int, ...]) -> set[tuple[int, ...]]:
        """All words reachable by braid moves (s t s ... -> t s t ..., m letters)."""
        seen = {word}
        queue = deque([word])
        while queue:
            w = queue.popleft()
            for k in range(len(w) - 1):
                s, t = w[k], w[k + 1]
                if s == t:
                    continue
                m = d.m(s, t)
                if m is None or k + m > len(w) or w[k:k + m] != alternating(s, t, m):
                    continue
                moved = w[:k] + alternating(t, s, m) + w[k + m:]
                if moved not in seen:
                    seen.add(moved)
                    queue.append(moved)
        return seen

    def cox_normalize(self, d: CoxeterData, word: Iterable[int]) -> CoxWord:
        """
        Canonical form of a word in W.

        Cancels a square found anywhere in the braid class until none is
        left; the result is the shortlex-least word of the reduced class.

        Raises:
            WordTooLong: If the word exceeds the configured length cap
        """
        word = tuple(word)
        key = (d.signature, word)
        if key in self._canonical:
            return self._canonical[key]
        if len(word) > settings.cox_word_cap:
            raise WordTooLong(
                f"Word of length {len(word)} exceeds the cap {settings.cox_word_cap}", {"length": len(word)}
            )
        self._check_letters(d, word)

        current = word
        while True:
            members = self.braid_class(d, current)
            square = None
            for w in sorted(members):
                for k in range(len(w) - 1):
                    if w[k] == w[k + 1]:
                        square = w[:k] + w[k + 2:]
                        break
                if square is not None:
                    break
            if square is None:
                break
            current = square

        canonical = CoxWord(letters=min(members))
        for w in members:
            self._canonical[(d.signature, w)] = canonical
        self._canonical[key] = canonical
        return canonical

    def multiply(self, d: CoxeterData, a: CoxWord, b: CoxWord | Iterable[int]) -> CoxWord:
        letters = b.letters if isinstance(b, CoxWord) else tuple(b)
        return self.cox_normalize(d, a.letters + letters)

    def inverse(self, d: CoxeterData, a: CoxWord) -> CoxWord:
        return self.cox_normalize(d, tuple(reversed(a.letters)))

    def is_identity(self, d: CoxeterData, word: Iterable[int]) -> bool:
        return not self.cox_normalize(d, word).letters

    # Dimension and curvature criteria

    def is_two_dimensional(self, d: CoxeterData) -> TwoDimensionalReport:
        """
        Every 3-subset spans an infinite group.

        A triangle with finite weights spans an infinite group iff
        1/m12 + 1/m23 + 1/m31 <= 1.
        """
        for triple in combinations(d.vertices, 3):
            ms = [d.m(a, b) for a, b in combinations(triple, 2)]
            if any(m is None for m in ms):
                continue
            if sum(Fraction(1, m) for m in ms) > 1:
                return TwoDimensionalReport(is_two_dimensional=False, witness=triple)
        return TwoDimensionalReport(is_two_dimensional=True)

    def c4_triple_witness(self, d: CoxeterData) -> Optional[tuple[int, int, int]]:
        """A triple (i, j, l) with m_ij <= 3, m_jl = 3 and m_li finite, if any."""
        for i, j, l in permutations(d.vertices, 3):
            m_ij, m_jl, m_li = d.m(i, j), d.m(j, l), d.m(l, i)
            if m_ij is not None and m_ij <= 3 and m_jl == 3 and m_li is not None:
                return (i, j, l)
        return None

    def automorphisms(self, d: CoxeterData) -> list[Permutation]:
        """Aut(L, m) as permutations perm[i] = image of i, sorted (identity first)."""
        g = d.graph()
        matcher = GraphMatcher(g, g, edge_match=lambda a, b: a["m"] == b["m"])
        perms = {tuple(iso[i] for i in d.vertices) for iso in matcher.isomorphisms_iter()}
        return sorted(perms)

    def star_fixers(self, d: CoxeterData, i: int, auts: Optional[Sequence[Permutation]] = None) -> list[Permutation]:
        """Automorphisms fixing star(i) pointwise."""
        auts = self.automorphisms(d) if auts is None else auts
        star = d.star(i)
        return [a for a in auts if all(a[v] == v for v in star)]

    # Balls and quotients

    def elements_up_to(self, d: CoxeterData, radius: int) -> list[CoxWord]:
        """Elements of length at most radius in shortlex order."""
        layer = [CoxWord()]
        found = {CoxWord()}
        result = [CoxWord()]
        for length in range(1, radius + 1):
            following = set()
            for w in layer:
                for s in d.vertices:
                    ws = self.multiply(d, w, (s,))
                    if len(ws) == length and ws not in found:
                        following.add(ws)
            if len(found) + len(following) > settings.ball_cap:
                raise BallTooLarge(
                    f"Ball of radius {radius} exceeds {settings.ball_cap} elements", {"radius": radius}
                )
            found |= following
            layer = sorted(following, key=CoxWord.sort_key)
            result.extend(layer)
        return result

    def coset_elements(self, d: CoxeterData, w: CoxWord, i: int, j: int) -> list[CoxWord]:
        """The 2 m_ij elements of w W_ij."""
        seen = {w}
        queue = deque([w])
        while queue:
            u = queue.popleft()
            for s in (i, j):
                us = self.multiply(d, u, (s,))
                if us not in seen:
                    seen.add(us)
                    queue.append(us)
        return sorted(seen, key=CoxWord.sort_key)

    def _assemble(
        self,
        kind: BlockComplexKind,
        d: CoxeterData,
        blocks: list[Any],
        across: dict[tuple[Any, int], Any],
        cosets: dict[tuple[Any, tuple[int, int]], tuple[Any, ...]],
        boundary: set[Any],
        name: str,
        radius: Optional[int] = None,
        hom: Optional[GroupHom] = None,
    ) -> BlockComplex:
        order = {b: k for k, b in enumerate(blocks)}

        def edge_id(b: Any, i: int) -> tuple[Any, int]:
            other = across[(b, i)]
            return (b if order[b] < order[other] else other, i)

        edges = {}
        edge_types = {}
        for (b, i), other in across.items():
            e = edge_id(b, i)
            if e not in edges:
                edges[e] = Edge(id=e, tail=e[0], head=across[e])
                edge_types[e] = i

        polygons = {}
        polygon_types = {}
        polygon_blocks = {}
        for pid, members in cosets.items():
            base, (i, j) = pid
            m = d.m(i, j)
            cycle = []
            walk = [base]
            current = base
            for k in range(2 * m):
                s = i if k % 2 == 0 else j
                e = edge_id(current, s)
                cycle.append((e, 1 if e[0] == current else -1))
                current = across[(current, s)]
                walk.append(current)
            if walk[-1] != base or len(set(walk[:-1])) != 2 * m:
                raise CoxeterException(f"Rank-2 coset {pid} does not close up after {2 * m} steps")
            polygons[pid] = Polygon(id=pid, cycle=tuple(cycle))
            polygon_types[pid] = (i, j)
            polygon_blocks[pid] = tuple(walk[:-1])

        x = polygonal_service.validate(PolygonalComplex(
            vertices=tuple(blocks), edges=edges, polygons=polygons, name=name
        ))

        # Each block lies in exactly one coset b W_ij per edge of L
        complete_at: dict[Any, int] = {}
        for walk in polygon_blocks.values():
            for b in walk:
                complete_at[b] = complete_at.get(b, 0) + 1
        interior = frozenset(
            b for b in blocks
            if all((b, s) in across for s in d.vertices) and complete_at.get(b, 0) == len(d.weights)
        )

        return BlockComplex(
            kind=kind, data=d, radius=radius, blocks=tuple(blocks), across=across, x=x,
            edge_types=edge_types, polygon_types=polygon_types, polygon_blocks=polygon_blocks,
            boundary_polygons=frozenset(boundary), interior_blocks=interior, hom=hom,
        )

    def build_davis_ball(self, d: CoxeterData, radius: int) -> BlockComplex:
        """
        Blocks w B_* with l(w) <= radius and the cells among them.

        Args:
            d: Two-dimensional Coxeter data
            radius: Word-length radius

        Returns:
            BlockComplex of kind BALL; polygons are the complete rank-2 cosets

        Raises:
            NotTwoDimensional: With the failing triple
            BallTooLarge: If the ball exceeds the cap
        """
        report = self.is_two_dimensional(d)
        if not report.is_two_dimensional:
            raise NotTwoDimensional(
                f"Triple {report.witness} spans a finite group", {"triple": list(report.witness)}
            )
        self.logger.info(f"Building Davis ball of radius {radius}")
        elements = self.elements_up_to(d, radius)
        in_ball = set(elements)
        blocks = [w.letters for w in elements]

        across = {}
        for w in elements:
            for s in d.vertices:
                ws = self.multiply(d, w, (s,))
                if ws in in_ball:
                    across[(w.letters, s)] = ws.letters

        cosets = {}
        boundary = set()
        for w in elements:
            for i, j in d.edges():
                members = self.coset_elements(d, w, i, j)
                pid = (members[0].letters, (i, j))
                if pid in cosets or pid in boundary:
                    continue
                if all(u in in_ball for u in members):
                    cosets[pid] = tuple(u.letters for u in members)
                else:
                    boundary.add(pid)

        ball = self._assemble(
            BlockComplexKind.BALL, d, blocks, across, cosets, boundary,
            name=f"Davis ball r={radius}", radius=radius,
        )
        self.logger.info(
            f"Davis ball: {len(blocks)} blocks, {len(ball.edge_types)} rank-1 and "
            f"{len(cosets)} complete rank-2 vertices"
        )
        return ball

    def extract_x(self, ball: BlockComplex) -> PolygonalComplex:
        return ball.x

    def coxeter_hom(self, d: CoxeterData, target: FiniteGroup, images: dict[int, int], name: str = "") -> GroupHom:
        """Homomorphism W -> Q from generator images, checked on the Coxeter relations."""
        relators = [Relator(name=f"{d.names[i]}^2", word=(i, i)) for i in d.vertices]
        relators += [
            Relator(name=f"({d.names[i]} {d.names[j]})^{m}", word=alternating(i, j, 2 * m))
            for (i, j), m in sorted(d.weights.items())
        ]
        hom = GroupHom(
            source_kind=SourceKind.COXETER, source_name=name or "W",
            generators=tuple(d.vertices), relators=tuple(relators), target=target, images=dict(images),
        )
        return group_service.hom_check(hom)

    def coxeter_hom_check(self, d: CoxeterData, hom: GroupHom) -> GroupHom:
        """
        Relations hold and every finite W_J embeds, so the kernel is torsion free.

        Raises:
            RelationViolated: If a relation fails or some s_i or s_i s_j
                has the wrong order in the quotient
        """
        group_service.hom_check(hom)
        q = hom.target
        for i in d.vertices:
            if hom.images[i] == q.identity:
                raise RelationViolated(f"Generator {d.names[i]} maps to the identity", {"relation": d.names[i]})
        for (i, j), m in d.weights.items():
            order = q.element_order(q.mul(hom.images[i], hom.images[j]))
            if order != m:
                raise RelationViolated(
                    f"{d.names[i]} {d.names[j]} has order {order} in the quotient, expected {m}",
                    {"relation": f"({d.names[i]} {d.names[j]})", "value": order},
                )
        return hom

    def build_quotient_blocks(self, d: CoxeterData, hom: GroupHom) -> BlockComplex:
        """
        Block complex of ker(hom) acting on the Davis complex.

        Blocks are the elements of the image, b and b q_i share a rank-1
        vertex of type i, and the cosets of <q_i, q_j> are the polygons.
        """
        self.coxeter_hom_check(d, hom)
        q = hom.target
        image = sorted(group_service.image_subgroup(hom))
        across = {(b, i): q.mul(b, hom.images[i]) for b in image for i in d.vertices}
        dihedral = {
            (i, j): group_service.subgroup_closure(q, [hom.images[i], hom.images[j]]) for i, j in d.edges()
        }
        cosets = {}
        seen: set[tuple[int, tuple[int, int]]] = set()
        for b in image:
            for i, j in d.edges():
                members = sorted(group_service.left_coset(q, b, dihedral[(i, j)]))
                pid = (members[0], (i, j))
                if pid not in seen:
                    seen.add(pid)
                    cosets[pid] = tuple(members)
        complex_ = self._assemble(
            BlockComplexKind.QUOTIENT, d, image, across, cosets, set(), name=f"quotient by {q}", hom=hom,
        )
        self.logger.info(f"Quotient block complex: {len(image)} blocks, {len(cosets)} polygons")
        return complex_

    def block_of(self, d: CoxeterData, hom: GroupHom, w: CoxWord | tuple[int, ...]) -> int:
        letters = w.letters if isinstance(w, CoxWord) else w
        return hom.evaluate(letters)

    # Reflections

    def _conjugate_form(self, d: CoxeterData, refl: CoxWord) -> Optional[tuple[CoxWord, int]]:
        if len(refl) % 2 == 0:
            return None
        for w in self.elements_up_to(d, (len(refl) - 1) // 2):
            if len(w) != (len(refl) - 1) // 2:
                continue
            for i in d.vertices:
                if self.cox_normalize(d, w.letters + (i,) + tuple(reversed(w.letters))) == refl:
                    return w, i
        return None

    def reflection_wall(self, d: CoxeterData, ball: BlockComplex, refl: CoxWord | Iterable[int]) -> ReflectionWallReport:
        """
        Fixed rank-1 and rank-2 vertices of a reflection inside a ball.

        r fixes the rank-1 vertex {w, w s_i} iff r w = w s_i, and a polygon
        iff it swaps the blocks of one of its sides.

        Raises:
            NotAReflection: If refl is not conjugate to a generator
        """
        refl = refl if isinstance(refl, CoxWord) else self.cox_normalize(d, refl)
        form = self._conjugate_form(d, refl)
        if form is None:
            raise NotAReflection(f"{d.name_of(refl.letters)} is not a reflection", {"word": list(refl.letters)})
        conjugator, generator = form

        fixed_edges = []
        for e, i in ball.edge_types.items():
            lower, upper = ball.lower_block(e), ball.upper_block(e)
            if self.cox_normalize(d, refl.letters + lower) == CoxWord(letters=upper):
                fixed_edges.append(e)
        fixed_set = set(fixed_edges)

        per_polygon: dict[Any, int] = {}
        for pid, polygon in ball.x.polygons.items():
            sides = [j for j, (e, _) in enumerate(polygon.cycle) if e in fixed_set]
            if sides:
                per_polygon[pid] = len(sides) // 2

        walls = polygonal_service.compute_walls(ball.x)
        touching = [w for w in walls if w.edges & fixed_set]
        supports = {w.edges for w in touching}
        report = ReflectionWallReport(
            reflection=refl,
            conjugator=conjugator,
            generator=generator,
            fixed_edges=tuple(fixed_edges),
            fixed_polygons=tuple(sorted(per_polygon, key=lambda p: (len(p[0]), p))),
            diameters_per_polygon=per_polygon,
            wall_supports=len(supports),
            is_union_of_walls=all(w.edges <= fixed_set for w in touching),
        )
        self.logger.debug(
            f"Reflection {d.name_of(refl.letters)} fixes {len(fixed_edges)} rank-1 vertices in the ball"
        )
        return report

    def translate_edge(self, d: CoxeterData, ball: BlockComplex, w: CoxWord, e: Any) -> frozenset[tuple[int, ...]]:
        """Blocks of w.e, as a pair of canonical words (possibly outside the ball)."""
        return frozenset(
            self.cox_normalize(d, w.letters + b).letters for b in (ball.lower_block(e), ball.upper_block(e))
        )

    def chamber_graph(self, ball: BlockComplex) -> nx.Graph:
        """Block adjacency graph with the generator type on each edge."""
        g = nx.Graph()
        g.add_nodes_from(ball.blocks)
        for e, i in ball.edge_types.items():
            g.add_edge(ball.lower_block(e), ball.upper_block(e), type=i)
        return g


# Singleton instance
davis_service = DavisService()
