"""
Graph Product Service.
Canonical forms, multiplication, retractions and balls in graph products of
finite groups, plus homomorphisms into finite quotients.
"""
from collections import deque
from typing import Any, Iterable, Mapping, Optional

from app.core.config import settings
from app.core.exceptions import (
    BallTooLarge, ConfigurationException, ElementOutOfRange, UnknownVertex
)
from app.core.logging import LoggerMixin
from app.domain.factories import GroupFactory
from app.domain.graph_product import NormalForm, ProductPresentation, Syllable
from app.domain.groups import FiniteGroup, GroupHom, Relator, SourceKind
from app.services.groups.group_service import group_service


class GraphProductService(LoggerMixin):
    """
    Service for elements of a graph product of finite groups.

    Elements are handled as NormalForm values; the canonical form is the
    lexicographically least reduced word of the shuffle class.
    """

    def __init__(self):
        """Initialize graph product service."""
        self.group_service = group_service

    # Canonical forms

    def _append(self, p: ProductPresentation, word: list[Syllable], syllable: Syllable) -> None:
        """Right-multiply a reduced word by one syllable, keeping it reduced."""
        i, g = syllable
        group = p.groups[i]
        if g == group.identity:
            return
        for k in range(len(word) - 1, -1, -1):
            j, h = word[k]
            if j == i:
                merged = group.mul(h, g)
                if merged == group.identity:
                    del word[k]
                else:
                    word[k] = (i, merged)
                return
            if not p.commute(i, j):
                break
        word.append(syllable)

    def _canonical(self, p: ProductPresentation, word: list[Syllable]) -> NormalForm:
        """Order a reduced word by repeatedly extracting the least front-movable vertex."""
        remaining = list(word)
        result = []
        while remaining:
            best = None
            for k, (i, _) in enumerate(remaining):
                if all(p.commute(i, j) for j, _ in remaining[:k]):
                    if best is None or i < remaining[best][0]:
                        best = k
            result.append(remaining.pop(best))
        return NormalForm(syllables=tuple(result))

    def _check_syllable(self, p: ProductPresentation, syllable: Iterable[int]) -> Syllable:
        i, g = (int(x) for x in syllable)
        if i < 0 or i >= p.size:
            raise UnknownVertex(f"Unknown vertex {i}", {"vertex": i})
        if g < 0 or g >= p.order(i):
            raise ElementOutOfRange(
                f"Element {g} is not in the group at vertex {p.names[i]}",
                {"vertex": i, "element": g},
            )
        return (i, g)

    def normalize(self, p: ProductPresentation, word: Iterable[Iterable[int]]) -> NormalForm:
        """
        Canonical form of a raw syllable word.

        Args:
            p: Graph product presentation
            word: Sequence of (vertex index, element index); identities allowed

        Returns:
            NormalForm of the product

        Raises:
            UnknownVertex: If a vertex index is out of range
            ElementOutOfRange: If an element index is out of range
        """
        reduced: list[Syllable] = []
        for syllable in word:
            self._append(p, reduced, self._check_syllable(p, syllable))
        return self._canonical(p, reduced)

    def multiply(self, p: ProductPresentation, a: NormalForm, b: NormalForm) -> NormalForm:
        if not b.syllables:
            return a
        word = list(a.syllables)
        for syllable in b.syllables:
            self._append(p, word, syllable)
        return self._canonical(p, word)

    def product(self, p: ProductPresentation, elements: Iterable[NormalForm]) -> NormalForm:
        word: list[Syllable] = []
        for a in elements:
            for syllable in a.syllables:
                self._append(p, word, syllable)
        return self._canonical(p, word)

    def inverse(self, p: ProductPresentation, a: NormalForm) -> NormalForm:
        word = [(i, p.groups[i].inv(g)) for i, g in reversed(a.syllables)]
        return self._canonical(p, word)

    def generator(self, p: ProductPresentation, i: int, g: int) -> NormalForm:
        return self.normalize(p, [(i, g)])

    def retract(self, p: ProductPresentation, subset: Iterable[int], a: NormalForm) -> NormalForm:
        """Retraction onto Gamma_J: delete syllables outside J."""
        keep = frozenset(subset)
        return self.normalize(p, [s for s in a.syllables if s[0] in keep])

    def syllable_length(self, a: NormalForm) -> int:
        return a.length

    def coset_rep(self, p: ProductPresentation, a: NormalForm, subset: Iterable[int]) -> NormalForm:
        """
        Unique minimal element of the coset a Gamma_J.

        Strips every J-syllable that can be moved to the right end.
        """
        keep = frozenset(subset)
        word = list(a.syllables)
        stripped = True
        while stripped:
            stripped = False
            for k in range(len(word) - 1, -1, -1):
                i = word[k][0]
                if i in keep and all(p.commute(i, j) for j, _ in word[k + 1:]):
                    del word[k]
                    stripped = True
                    break
        return self._canonical(p, word)

    def is_finite_subgroup(self, p: ProductPresentation, subset: Iterable[int]) -> bool:
        """Gamma_J is finite iff its nontrivial vertex groups span a clique."""
        return p.is_spherical(i for i in subset if p.order(i) > 1)

    def subgroup_elements(self, p: ProductPresentation, subset: Iterable[int]) -> list[NormalForm]:
        """
        All elements of a finite Gamma_J, in canonical order.

        Raises:
            BallTooLarge: If Gamma_J is infinite
        """
        subset = sorted(set(subset))
        if not self.is_finite_subgroup(p, subset):
            raise BallTooLarge(f"Subgroup on {subset} is infinite", {"subset": subset})
        elements = [NormalForm()]
        for i in subset:
            elements = [
                self.multiply(p, a, self.generator(p, i, g))
                for a in elements for g in p.groups[i].elements()
            ]
        return sorted(set(elements), key=NormalForm.sort_key)

    def enumerate_ball(
        self,
        p: ProductPresentation,
        radius: int,
        cap: Optional[int] = None,
        subset: Optional[Iterable[int]] = None,
    ) -> list[NormalForm]:
        """
        All elements of syllable length at most radius.

        Args:
            p: Graph product presentation
            radius: Nonnegative radius
            cap: Maximal element count (settings.ball_cap by default)
            subset: Restrict to the subgroup Gamma_J generated by these vertices

        Returns:
            Elements sorted by (length, syllables)

        Raises:
            BallTooLarge: If the ball exceeds the cap
        """
        cap = settings.ball_cap if cap is None else cap
        vertices = p.vertices if subset is None else sorted(set(subset))
        generators = [
            NormalForm(syllables=((i, g),))
            for i in vertices for g in p.groups[i].elements() if g != p.groups[i].identity
        ]
        ball = {NormalForm()}
        frontier = [NormalForm()]
        for step in range(radius):
            next_frontier = []
            for a in frontier:
                for s in generators:
                    b = self.multiply(p, a, s)
                    if b.length == step + 1 and b not in ball:
                        ball.add(b)
                        next_frontier.append(b)
                        if len(ball) > cap:
                            raise BallTooLarge(
                                f"Ball of radius {radius} exceeds {cap} elements",
                                {"radius": radius, "cap": cap},
                            )
            frontier = next_frontier
        self.logger.debug(f"Ball of radius {radius} has {len(ball)} elements")
        return sorted(ball, key=NormalForm.sort_key)

    # Homomorphisms

    def generator_keys(self, p: ProductPresentation) -> tuple[Syllable, ...]:
        return tuple(
            (i, g) for i in p.vertices for g in p.groups[i].elements()
            if g != p.groups[i].identity
        )

    def relators(self, p: ProductPresentation) -> tuple[Relator, ...]:
        """Vertex group multiplication relations and edge commutators."""
        relators = []
        for i in p.vertices:
            group = p.groups[i]
            nontrivial = [g for g in group.elements() if g != group.identity]
            for g in nontrivial:
                for h in nontrivial:
                    gh = group.mul(g, h)
                    word = ((i, g), (i, h)) if gh == group.identity else ((i, g), (i, h), (i, group.inv(gh)))
                    relators.append(Relator(name=f"{p.names[i]}:{g}*{p.names[i]}:{h}", word=word))
        for e in sorted(tuple(sorted(e)) for e in p.edges):
            i, j = e
            gi, gj = p.groups[i], p.groups[j]
            for g in gi.elements():
                for h in gj.elements():
                    if g == gi.identity or h == gj.identity:
                        continue
                    relators.append(Relator(
                        name=f"[{p.names[i]}:{g},{p.names[j]}:{h}]",
                        word=((i, g), (j, h), (i, gi.inv(g)), (j, gj.inv(h))),
                    ))
        return tuple(relators)

    def make_hom(
        self,
        p: ProductPresentation,
        target: FiniteGroup,
        images: Mapping[Syllable, int],
        name: str = "",
        check: bool = True,
    ) -> GroupHom:
        """
        Homomorphism from the graph product, given on some vertex-group elements.

        Images of the remaining elements are derived by multiplying within each
        vertex group; the result is verified against all defining relations.

        Raises:
            ConfigurationException: If some element image cannot be derived
            RelationViolated: If a defining relation fails
        """
        full: dict[Syllable, int] = {}
        for i in p.vertices:
            group = p.groups[i]
            known = {group.identity: target.identity}
            known.update({g: q for (j, g), q in images.items() if j == i})
            queue = deque(known)
            while queue:
                g = queue.popleft()
                for h in list(known):
                    for gh, value in ((group.mul(g, h), target.mul(known[g], known[h])),
                                      (group.mul(h, g), target.mul(known[h], known[g]))):
                        if gh not in known:
                            known[gh] = value
                            queue.append(gh)
            if len(known) != group.order:
                raise ConfigurationException(
                    f"Images at vertex {p.names[i]} do not generate its group",
                    {"vertex": p.names[i]},
                )
            full.update({(i, g): q for g, q in known.items() if g != group.identity})

        hom = GroupHom(
            source_kind=SourceKind.GRAPH_PRODUCT,
            source_name=name or str(p),
            generators=self.generator_keys(p),
            relators=self.relators(p),
            target=target,
            images=full,
        )
        return self.group_service.hom_check(hom) if check else hom

    def hom_from_config(self, p: ProductPresentation, target: FiniteGroup, images: Mapping[str, Any]) -> GroupHom:
        """
        Parse image keys "name" (shorthand for "name:1") or "name:g".

        Raises:
            ConfigurationException: If a key names an unknown vertex
        """
        parsed: dict[Syllable, int] = {}
        for key, value in images.items():
            name, _, element = str(key).partition(":")
            if name not in p.names:
                raise ConfigurationException(f"Unknown vertex in image key {key}", {"key": key})
            parsed[(p.index_of(name), int(element) if element else 1)] = int(value)
        return self.make_hom(p, target, parsed)

    def evaluate(self, hom: GroupHom, a: NormalForm) -> int:
        return hom.evaluate(a.syllables)

    def gamma0_hom(self, p: ProductPresentation) -> GroupHom:
        """
        The natural map onto the product of the vertex groups.

        Returns:
            GroupHom with target prod G_i, injective on every G_i
        """
        target = GroupFactory.direct_product(list(p.groups), name=" x ".join(str(g) for g in p.groups))
        orders = [p.order(i) for i in p.vertices]
        identity = [p.groups[i].identity for i in p.vertices]
        images = {}
        for i, g in self.generator_keys(p):
            coords = list(identity)
            coords[i] = g
            images[(i, g)] = GroupFactory.product_index(orders, coords)
        self.logger.info(f"Built Gamma0 quotient of order {target.order}")
        return self.make_hom(p, target, images, name="gamma0", check=True)

    def presentation_from_config(self, data: Mapping[str, Any]) -> ProductPresentation:
        """
        Create a presentation from {"vertices": [...], "edges": [[a, b], ...],
        "groups": {"a": <group config>}}.

        Raises:
            ConfigurationException: If vertices, edges or groups are inconsistent
        """
        names = [str(v) for v in data.get("vertices", [])]
        groups_config = data.get("groups", {})
        default = data.get("default_group")
        try:
            groups = []
            for name in names:
                config = groups_config.get(name, default)
                if config is None:
                    raise ConfigurationException(f"No group for vertex {name}", {"vertex": name})
                groups.append(GroupFactory.from_config(config))
            edges = frozenset(
                frozenset(names.index(str(v)) for v in e) for e in data.get("edges", [])
            )
            return ProductPresentation(names=tuple(names), edges=edges, groups=tuple(groups))
        except (ValueError, KeyError) as e:
            raise ConfigurationException(f"Invalid presentation: {e}")


# Singleton instance
graph_product_service = GraphProductService()
