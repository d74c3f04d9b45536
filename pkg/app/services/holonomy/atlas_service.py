"""
Atlas Service.
Atlases of i-boundary actions, gallery words, germ extension and the
commensuration witness.
"""
from typing import Iterable, Optional, Sequence

from app.core.config import settings
from app.core.exceptions import (
    ConsistencyFailure, HolonomyException, NontrivialHolonomy, WitnessMismatch
)
from app.core.logging import LoggerMixin
from app.domain.atlas import (
    Atlas, AtlasChart, CommensurationReport, GalleryWord, LazyAutomorphism,
    Permutation, WitnessEntry,
)
from app.domain.building import Chamber, Gallery, Residue
from app.domain.graph_product import NormalForm, ProductPresentation
from app.domain.groups import FiniteGroup, SubgroupData
from app.services.graph_product.graph_product_service import graph_product_service
from app.services.holonomy.holonomy_service import holonomy_service


def compose(a: Permutation, b: Permutation) -> Permutation:
    """a after b."""
    return tuple(a[x] for x in b)


def invert(a: Permutation) -> Permutation:
    inverse = [0] * len(a)
    for x, y in enumerate(a):
        inverse[y] = x
    return tuple(inverse)


class AtlasService(LoggerMixin):
    """
    Service for atlases of a graph product building.

    An atlas stores one simply transitive seed per vertex i and per orbit of
    i-perp-eq residues; the action at any other residue is obtained by
    transporting the seed with a subgroup element.
    """

    def __init__(self):
        """Initialize atlas service."""
        self.gp = graph_product_service
        self.holonomy = holonomy_service

    # Seeds

    def right_translation_seed(self, group: FiniteGroup) -> tuple[Permutation, ...]:
        """seed[h](g) = g h^-1."""
        return tuple(
            tuple(group.mul(g, group.inv(h)) for g in group.elements()) for h in group.elements()
        )

    def left_translation(self, group: FiniteGroup, e: int) -> Permutation:
        return tuple(group.mul(e, g) for g in group.elements())

    def twisted_seed(self, group: FiniteGroup, twist: Sequence[int]) -> tuple[Permutation, ...]:
        """Right-translation seed conjugated by a permutation of the labels."""
        twist = tuple(twist)
        twist_inverse = invert(twist)
        return tuple(
            compose(compose(twist, s), twist_inverse) for s in self.right_translation_seed(group)
        )

    def validate_seed(self, group: FiniteGroup, seed: Sequence[Permutation]) -> None:
        """
        Check that a seed is a simply transitive action of G_i.

        Raises:
            HolonomyException: If the seed is not a homomorphism or not simply transitive
        """
        identity = tuple(group.elements())
        if len(seed) != group.order or seed[group.identity] != identity:
            raise HolonomyException("Seed must send the identity to the identity permutation")
        for a in group.elements():
            for b in group.elements():
                if compose(seed[a], seed[b]) != seed[group.mul(a, b)]:
                    raise HolonomyException(f"Seed is not a homomorphism at ({a}, {b})")
        for g in group.elements():
            if len({seed[h][g] for h in group.elements()}) != group.order:
                raise HolonomyException("Seed is not simply transitive")

    # Atlases

    def standard_atlas(self, p: ProductPresentation) -> Atlas:
        """The Gamma-invariant atlas of right translations, one chart per vertex."""
        sub = self.holonomy.full_subgroup(p)
        charts = {
            i: (AtlasChart(
                vertex=i, quotient_rep=0, base=NormalForm(),
                seed=self.right_translation_seed(p.groups[i]),
            ),)
            for i in p.vertices
        }
        atlas = Atlas(subgroup=sub, charts=charts, name="standard")
        self.verify_invariance(p, atlas, settings.atlas_invariance_radius)
        return atlas

    def atlas_from_holonomy_free(
        self,
        p: ProductPresentation,
        sub: SubgroupData,
        twists: Optional[dict[int, Sequence[int]]] = None,
    ) -> Atlas:
        """
        Invariant atlas of a subgroup without holonomy.

        Args:
            p: Graph product presentation
            sub: Subgroup as preimage of S
            twists: Optional label permutation per vertex conjugating the seed

        Returns:
            Atlas with one chart per residue orbit

        Raises:
            NontrivialHolonomy: Naming the first residue carrying holonomy
            ConsistencyFailure: If the atlas is not invariant on the subgroup generators
        """
        twists = twists or {}
        charts = {}
        for i in p.vertices:
            group = p.groups[i]
            seed = (
                self.twisted_seed(group, twists[i]) if i in twists
                else self.right_translation_seed(group)
            )
            self.validate_seed(group, seed)
            vertex_charts = []
            for q, residue in self.holonomy.residue_representatives(p, sub, i):
                report = self.holonomy.holonomy_at(p, sub, i, residue, quotient_rep=q)
                if not report.trivial:
                    raise NontrivialHolonomy(
                        f"Holonomy at {residue} for vertex {p.names[i]}",
                        {"vertex": i, "base": str(residue.base), "image": list(report.image)},
                    )
                vertex_charts.append(
                    AtlasChart(vertex=i, quotient_rep=q, base=residue.base.element, seed=seed)
                )
            charts[i] = tuple(vertex_charts)
        atlas = Atlas(subgroup=sub, charts=charts, name="twisted" if twists else "invariant")
        self.verify_invariance(p, atlas, settings.atlas_invariance_radius)
        self.logger.info(
            f"Built atlas with {sum(len(c) for c in charts.values())} charts over {p.size} vertices"
        )
        return atlas

    def atlas_action(self, p: ProductPresentation, atlas: Atlas, i: int, chamber: NormalForm) -> tuple[Permutation, ...]:
        """
        Action of G_i at R(i-perp-eq, chamber), in labels of its canonical base.

        With chart base b0 and residue base b, an element
        lambda = b e y b0^-1 of the subgroup (e in G_i, y in Gamma_i-perp) acts
        on labels by left translation by e; the action is the seed conjugated
        by that translation.
        """
        group = p.groups[i]
        hom = atlas.subgroup.hom
        q = hom.target
        base = self.gp.coset_rep(p, chamber, p.perp_eq(i))
        qb_inverse = q.inv(self.holonomy.image_of(hom, base))
        perp = self.holonomy.vertex_image(p, hom, p.perp(i))

        for chart in atlas.charts_at(i):
            q0 = self.holonomy.image_of(hom, chart.base)
            targets = frozenset(q.mul(q.mul(qb_inverse, s), q0) for s in atlas.subgroup.image_subgroup)
            allowed = self.holonomy.coset_product(q, targets, perp)
            for e in group.elements():
                qe = hom.images[(i, e)] if e != group.identity else q.identity
                if qe in allowed:
                    translate = self.left_translation(group, e)
                    back = invert(translate)
                    return tuple(compose(compose(translate, s), back) for s in chart.seed)
        raise HolonomyException(
            f"No chart covers the residue of {chamber} at {p.names[i]}", {"vertex": i}
        )

    def label(self, p: ProductPresentation, i: int, chamber: NormalForm) -> int:
        """G_i label of a chamber relative to the canonical base of its i-perp-eq residue."""
        base = self.gp.coset_rep(p, chamber, p.perp_eq(i))
        z = self.gp.multiply(p, self.gp.inverse(p, base), chamber)
        coordinate = self.gp.retract(p, [i], z)
        return coordinate.syllables[0][1] if coordinate.syllables else p.groups[i].identity

    def atlases_equivalent(
        self,
        p: ProductPresentation,
        first: Atlas,
        second: Atlas,
        radius: int,
    ) -> bool:
        """
        Check that at every i-perp-eq residue met by the ball some g conjugates
        the actions: second(h) = first(g h g^-1).
        """
        for chamber in self.gp.enumerate_ball(p, radius):
            for i in p.vertices:
                group = p.groups[i]
                a1 = self.atlas_action(p, first, i, chamber)
                a2 = self.atlas_action(p, second, i, chamber)
                if not any(
                    all(a2[h] == a1[group.mul(group.mul(g, h), group.inv(g))] for h in group.elements())
                    for g in group.elements()
                ):
                    return False
        return True

    def verify_invariance(self, p: ProductPresentation, atlas: Atlas, radius: int) -> None:
        """
        Check atlas invariance under the subgroup generators on residues of the ball.

        Raises:
            ConsistencyFailure: If some generator does not carry the action along
        """
        generators = self.holonomy.schreier_generators(p, atlas.subgroup)
        for lam in generators:
            for chamber in self.gp.enumerate_ball(p, radius):
                moved = self.gp.multiply(p, lam, chamber)
                for i in p.vertices:
                    group = p.groups[i]
                    shift = self.gp.retract(
                        p, [i],
                        self.gp.multiply(
                            p,
                            self.gp.inverse(p, self.gp.coset_rep(p, moved, p.perp_eq(i))),
                            self.gp.multiply(p, lam, self.gp.coset_rep(p, chamber, p.perp_eq(i))),
                        ),
                    )
                    e = shift.syllables[0][1] if shift.syllables else group.identity
                    translate = self.left_translation(group, e)
                    here = self.atlas_action(p, atlas, i, chamber)
                    there = self.atlas_action(p, atlas, i, moved)
                    expected = tuple(compose(compose(translate, s), invert(translate)) for s in here)
                    if expected != there:
                        raise ConsistencyFailure(
                            f"Atlas not invariant under {lam} at {chamber}",
                            {"generator": str(lam), "chamber": str(chamber), "vertex": i},
                        )

    # Gallery words

    def word_of_gallery(self, p: ProductPresentation, atlas: Atlas, g: Gallery) -> GalleryWord:
        """
        Letter (i, x) for an i-adjacent step where the atlas element x carries
        the component of the first chamber to that of the second.
        """
        letters = []
        for c1, c2 in zip(g.chambers, g.chambers[1:]):
            delta = self.gp.multiply(p, self.gp.inverse(p, c1.element), c2.element)
            if delta.is_identity():
                letters.append(None)
                continue
            if delta.length != 1:
                raise HolonomyException(f"Chambers {c1} and {c2} are not adjacent")
            i = delta.syllables[0][0]
            action = self.atlas_action(p, atlas, i, c1.element)
            source, target = self.label(p, i, c1.element), self.label(p, i, c2.element)
            x = next(h for h in p.groups[i].elements() if action[h][source] == target)
            letters.append((i, x))
        return GalleryWord(letters=tuple(letters))

    def step(self, p: ProductPresentation, atlas: Atlas, chamber: NormalForm, letter) -> NormalForm:
        """Chamber reached from chamber by one letter."""
        if letter is None:
            return chamber
        i, x = letter
        group = p.groups[i]
        action = self.atlas_action(p, atlas, i, chamber)
        source = self.label(p, i, chamber)
        target = action[x][source]
        s = group.mul(group.inv(source), target)
        if s == group.identity:
            return chamber
        return self.gp.multiply(p, chamber, NormalForm(syllables=((i, s),)))

    def gallery_of_word(self, p: ProductPresentation, atlas: Atlas, base: Chamber, w: GalleryWord) -> Gallery:
        chambers = [base.element]
        for letter in w.letters:
            chambers.append(self.step(p, atlas, chambers[-1], letter))
        return Gallery(chambers=tuple(Chamber(element=c) for c in chambers))

    # Germ extension

    def geodesic(self, p: ProductPresentation, start: NormalForm, end: NormalForm) -> Gallery:
        """Gallery from start to end following the normal form of start^-1 end."""
        delta = self.gp.multiply(p, self.gp.inverse(p, start), end)
        chambers = [start]
        for syllable in delta.syllables:
            chambers.append(self.gp.multiply(p, chambers[-1], NormalForm(syllables=(syllable,))))
        return Gallery(chambers=tuple(Chamber(element=c) for c in chambers))

    def extend_germ(
        self,
        p: ProductPresentation,
        germ: tuple[Chamber, Chamber],
        source: Atlas,
        target: Atlas,
        radius: Optional[int] = None,
    ) -> LazyAutomorphism:
        """
        Unique automorphism sending germ[0] to germ[1] and source to target.

        Transport is certified on the ball of the given radius around the
        source chamber: every rank-1 triangle and rank-2 square closes, and
        one-step transport agrees with geodesic transport.

        Raises:
            ConsistencyFailure: If some loop of the ball does not close
        """
        radius = settings.default_radius if radius is None else radius
        automorphism = LazyAutomorphism(source=source, target=target, germ=germ)
        self.certify(p, automorphism, radius)
        return automorphism.model_copy(update={"certified_radius": radius})

    def evaluate(self, p: ProductPresentation, automorphism: LazyAutomorphism, chamber: NormalForm) -> NormalForm:
        """Image of a chamber: transport the geodesic gallery word from the germ."""
        cached = automorphism.cache.get(chamber)
        if cached is not None:
            return cached
        start, image = automorphism.germ
        word = self.word_of_gallery(p, automorphism.source, self.geodesic(p, start.element, chamber))
        result = self.gallery_of_word(p, automorphism.target, image, word).chambers[-1].element
        automorphism.cache[chamber] = result
        return result

    def transport(self, p: ProductPresentation, automorphism: LazyAutomorphism, gallery: Gallery) -> Gallery:
        word = self.word_of_gallery(p, automorphism.source, gallery)
        start = Chamber(element=self.evaluate(p, automorphism, gallery.chambers[0].element))
        return self.gallery_of_word(p, automorphism.target, start, word)

    def certify(self, p: ProductPresentation, automorphism: LazyAutomorphism, radius: int) -> None:
        start = automorphism.germ[0].element
        keys = self.gp.generator_keys(p)
        for x in self.gp.enumerate_ball(p, radius):
            chamber = self.gp.multiply(p, start, x)
            loops = []
            for a in keys:
                for b in keys:
                    sa, sb = NormalForm(syllables=(a,)), NormalForm(syllables=(b,))
                    if a[0] == b[0] and a[1] != b[1]:
                        c1 = self.gp.multiply(p, chamber, sa)
                        c2 = self.gp.multiply(p, chamber, sb)
                        loops.append((chamber, c1, c2, chamber))
                    elif a[0] < b[0] and p.commute(a[0], b[0]):
                        c1 = self.gp.multiply(p, chamber, sa)
                        c2 = self.gp.multiply(p, c1, sb)
                        c3 = self.gp.multiply(p, chamber, sb)
                        loops.append((chamber, c1, c2, c3, chamber))
            for loop in loops:
                image = self.transport(p, automorphism, Gallery(chambers=tuple(Chamber(element=c) for c in loop)))
                if image.chambers[0] != image.chambers[-1]:
                    raise ConsistencyFailure(
                        f"Transport does not close around a loop at {chamber}",
                        {"loop": [str(c) for c in loop]},
                    )
            for key in keys:
                neighbour = self.gp.multiply(p, chamber, NormalForm(syllables=(key,)))
                stepped = self.step(
                    p, automorphism.target, self.evaluate(p, automorphism, chamber),
                    self.word_of_gallery(p, automorphism.source, Gallery(chambers=(
                        Chamber(element=chamber), Chamber(element=neighbour)))).letters[0],
                )
                if stepped != self.evaluate(p, automorphism, neighbour):
                    raise ConsistencyFailure(
                        f"Transport depends on the gallery at {neighbour}",
                        {"chamber": str(neighbour)},
                    )
        self.logger.debug(f"Certified germ extension on radius {radius}")

    def inverse_automorphism(self, p: ProductPresentation, automorphism: LazyAutomorphism, radius: Optional[int] = None) -> LazyAutomorphism:
        start, image = automorphism.germ
        return self.extend_germ(p, (image, start), automorphism.target, automorphism.source, radius)

    # Commensuration witness

    def commensuration_witness(
        self,
        p: ProductPresentation,
        sub: SubgroupData,
        radius: Optional[int] = None,
    ) -> CommensurationReport:
        """
        Conjugate the subgroup into Gamma by the automorphism f taking its
        invariant atlas to the standard one.

        For every Schreier generator lambda, f lambda f^-1 must agree on the
        ball with left translation by g = f lambda f^-1 (C_*).

        Args:
            p: Graph product presentation
            sub: Subgroup without holonomy
            radius: Chamber ball radius for the check

        Returns:
            CommensurationReport listing g per generator

        Raises:
            NontrivialHolonomy: If the subgroup has holonomy
            WitnessMismatch: If some conjugate is not a translation on the ball
        """
        radius = settings.default_radius if radius is None else radius
        invariant = self.atlas_from_holonomy_free(p, sub)
        standard = self.standard_atlas(p)
        identity = Chamber()
        f = self.extend_germ(p, (identity, identity), invariant, standard, radius)
        f_inverse = self.extend_germ(p, (identity, identity), standard, invariant, radius)

        ball = self.gp.enumerate_ball(p, radius)
        entries = []
        for lam in self.holonomy.schreier_generators(p, sub):
            def conjugate(c: NormalForm) -> NormalForm:
                return self.evaluate(p, f, self.gp.multiply(p, lam, self.evaluate(p, f_inverse, c)))

            g = conjugate(NormalForm())
            for c in ball:
                if conjugate(c) != self.gp.multiply(p, g, c):
                    raise WitnessMismatch(
                        f"Conjugate of {lam} is not a translation at {c}",
                        {"generator": str(lam), "chamber": str(c)},
                    )
            entries.append(WitnessEntry(generator=lam, translation=g))
        self.logger.info(f"Commensuration witness: {len(entries)} generators checked on radius {radius}")
        return CommensurationReport(
            radius=radius, entries=tuple(entries), checked_chambers=len(ball), chambers=tuple(ball),
        )


# Singleton instance
atlas_service = AtlasService()
