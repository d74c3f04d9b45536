"""
Holonomy Service.
Residue orbit representatives, holonomy at i-perp-eq residues, Schreier
generators and the fiber-product step that kills holonomy.
"""
from collections import deque
from typing import Iterable, Optional, Sequence

from app.core.exceptions import WrongResidueType
from app.core.logging import LoggerMixin
from app.domain.atlas import HolonomyReport, KillHolonomyReport
from app.domain.building import Chamber, Residue
from app.domain.factories import GroupFactory
from app.domain.graph_product import NormalForm, ProductPresentation
from app.domain.groups import FiniteGroup, GroupHom, SourceKind, SubgroupData
from app.services.graph_product.graph_product_service import graph_product_service
from app.services.groups.group_service import group_service


class HolonomyService(LoggerMixin):
    """
    Service for the i-holonomy of finite-index subgroups.

    A subgroup is the preimage of S under a homomorphism phi onto a finite
    quotient; every computation happens in the quotient.
    """

    def __init__(self):
        """Initialize holonomy service."""
        self.gp = graph_product_service
        self.groups = group_service

    def full_subgroup(self, p: ProductPresentation) -> SubgroupData:
        """The whole graph product, as the preimage of the trivial group."""
        hom = self.gp.make_hom(
            p, GroupFactory.cyclic(1, name="1"),
            {key: 0 for key in self.gp.generator_keys(p)}, name="trivial",
        )
        return SubgroupData(hom=hom, image_subgroup=frozenset({0}))

    def image_of(self, hom: GroupHom, a: NormalForm) -> int:
        return hom.evaluate(a.syllables)

    def vertex_image(self, p: ProductPresentation, hom: GroupHom, subset: Iterable[int]) -> frozenset[int]:
        """phi(Gamma_J) as a subgroup of the quotient."""
        subset = set(subset)
        gens = [q for (j, _), q in hom.images.items() if j in subset]
        return self.groups.subgroup_closure(hom.target, gens)

    def effective_subgroup(self, sub: SubgroupData) -> frozenset[int]:
        """S intersected with the image of phi."""
        return sub.image_subgroup & self.groups.image_subgroup(sub.hom)

    # Residue representatives

    def residue_representatives(
        self,
        p: ProductPresentation,
        sub: SubgroupData,
        i: int,
    ) -> list[tuple[int, Residue]]:
        """
        One i-perp-eq residue per orbit of the subgroup.

        Orbits correspond to double cosets S\\Im(phi)/phi(Gamma_i-perp-eq).

        Returns:
            Pairs (quotient representative, residue with canonical base)
        """
        hom = sub.hom
        image = self.groups.image_subgroup(hom)
        perp_eq = self.vertex_image(p, hom, p.perp_eq(i))
        reps = self.groups.double_coset_reps(
            hom.target, self.effective_subgroup(sub), perp_eq, within=image
        )
        preimages = self.groups.preimage_table(hom)
        result = []
        for q in reps:
            gamma = self.gp.normalize(p, preimages[q])
            base = self.gp.coset_rep(p, gamma, p.perp_eq(i))
            result.append((q, Residue(type=p.perp_eq(i), base=Chamber(element=base))))
        return result

    # Holonomy

    def holonomy_at(
        self,
        p: ProductPresentation,
        sub: SubgroupData,
        i: int,
        r: Residue,
        quotient_rep: Optional[int] = None,
    ) -> HolonomyReport:
        """
        Image of the stabilizer of R in Sym(G_i labels).

        g acts iff phi(g) lies in phi(b)^-1 S phi(b) phi(Gamma_i-perp), b the
        base of R; it acts by left translation.

        Args:
            p: Graph product presentation
            sub: Subgroup as preimage of S
            i: Vertex index
            r: Residue of type i-perp-eq

        Returns:
            HolonomyReport with the image elements and their permutations

        Raises:
            WrongResidueType: If r is not of type i-perp-eq
        """
        if r.type != p.perp_eq(i):
            raise WrongResidueType(
                f"Residue type {sorted(r.type)} is not the i-perp-eq of {p.names[i]}",
                {"vertex": i, "type": sorted(r.type)},
            )
        hom = sub.hom
        q = hom.target
        qb = self.image_of(hom, r.base.element)
        allowed = self.coset_product(q, [q.conjugate(s, qb) for s in sub.image_subgroup],
                                     self.vertex_image(p, hom, p.perp(i)))

        group = p.groups[i]
        image = tuple(
            g for g in group.elements()
            if (hom.images[(i, g)] if g != group.identity else q.identity) in allowed
        )
        permutations = tuple(tuple(group.mul(g, x) for x in group.elements()) for g in image)
        return HolonomyReport(
            vertex=i, residue=r, quotient_rep=quotient_rep, image=image, permutations=permutations
        )

    def coset_product(self, q: FiniteGroup, left: Iterable[int], right: Iterable[int]) -> frozenset[int]:
        right = list(right)
        return frozenset(q.mul(a, b) for a in left for b in right)

    def holonomy_reports(self, p: ProductPresentation, sub: SubgroupData) -> list[HolonomyReport]:
        """Holonomy at every residue orbit representative, for every vertex."""
        reports = []
        for i in p.vertices:
            for q, residue in self.residue_representatives(p, sub, i):
                reports.append(self.holonomy_at(p, sub, i, residue, quotient_rep=q))
        nontrivial = sum(1 for r in reports if not r.trivial)
        self.logger.info(f"Computed {len(reports)} holonomy reports, {nontrivial} nontrivial")
        return reports

    def has_trivial_holonomy(self, p: ProductPresentation, sub: SubgroupData) -> bool:
        return all(r.trivial for r in self.holonomy_reports(p, sub))

    # Subgroup arithmetic

    def index(self, sub: SubgroupData) -> int:
        return self.groups.index_of(sub)

    def schreier_generators(self, p: ProductPresentation, sub: SubgroupData) -> list[NormalForm]:
        """
        Finite generating set of the preimage subgroup.

        Uses a transversal of its right cosets, read off from a breadth-first
        search over right cosets of S in the image.
        """
        hom = sub.hom
        q = hom.target
        effective = self.effective_subgroup(sub)
        keys = self.gp.generator_keys(p)

        def coset_of(x: int) -> frozenset[int]:
            return frozenset(q.mul(s, x) for s in effective)

        transversal: dict[frozenset[int], NormalForm] = {coset_of(q.identity): NormalForm()}
        queue = deque([NormalForm()])
        while queue:
            t = queue.popleft()
            for key in keys:
                u = self.gp.multiply(p, t, NormalForm(syllables=(key,)))
                coset = coset_of(self.image_of(hom, u))
                if coset not in transversal:
                    transversal[coset] = u
                    queue.append(u)

        generators: set[NormalForm] = set()
        for t in transversal.values():
            for key in keys:
                u = self.gp.multiply(p, t, NormalForm(syllables=(key,)))
                rep = transversal[coset_of(self.image_of(hom, u))]
                g = self.gp.multiply(p, u, self.gp.inverse(p, rep))
                if not g.is_identity():
                    generators.add(g)
        result = sorted(generators, key=NormalForm.sort_key)
        self.logger.debug(f"Index {len(transversal)} subgroup has {len(result)} Schreier generators")
        return result

    def fiber_product(self, p: ProductPresentation, homs: Sequence[GroupHom]) -> tuple[GroupHom, list[tuple[int, ...]]]:
        """
        Diagonal homomorphism into the image of Q_0 x Q_1 x ... x Q_k.

        Only the image is tabulated, enumerated from the generator images.

        Returns:
            The homomorphism and the coordinate tuple of every quotient element
        """
        keys = self.gp.generator_keys(p)
        images = {key: tuple(h.images[key] for h in homs) for key in keys}
        identity = tuple(h.target.identity for h in homs)

        def mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
            return tuple(h.target.mul(x, y) for h, x, y in zip(homs, a, b))

        elements = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue:
            a = queue.popleft()
            for image in images.values():
                b = mul(a, image)
                if b not in index:
                    index[b] = len(elements)
                    elements.append(b)
                    queue.append(b)

        table = tuple(tuple(index[mul(a, b)] for b in elements) for a in elements)
        inverses = tuple(row.index(0) for row in table)
        target = FiniteGroup(
            table=table, identity=0, inverses=inverses,
            name=" x ".join(str(h.target) for h in homs) + " (image)",
        )
        hom = GroupHom(
            source_kind=SourceKind.GRAPH_PRODUCT,
            source_name="fiber product",
            generators=keys,
            relators=self.gp.relators(p),
            target=target,
            images={key: index[image] for key, image in images.items()},
        )
        return self.groups.hom_check(hom), elements

    def kill_holonomy(
        self,
        p: ProductPresentation,
        sub: SubgroupData,
        separators: Sequence[GroupHom],
    ) -> KillHolonomyReport:
        """
        Intersect the subgroup with the kernels of separating quotients.

        Separators are inputs; the report lists the residues still carrying
        holonomy when they do not suffice.

        Args:
            p: Graph product presentation
            sub: Subgroup as preimage of S
            separators: Homomorphisms of the graph product to finite groups

        Returns:
            KillHolonomyReport for the intersected subgroup
        """
        if separators:
            for h in separators:
                self.groups.hom_check(h)
            hom, elements = self.fiber_product(p, [sub.hom, *separators])
            trivial_tail = tuple(h.target.identity for h in separators)
            subgroup = frozenset(
                k for k, coords in enumerate(elements)
                if coords[0] in sub.image_subgroup and coords[1:] == trivial_tail
            )
            sub = SubgroupData(hom=hom, image_subgroup=subgroup)
        reports = self.holonomy_reports(p, sub)
        report = KillHolonomyReport(subgroup=sub, reports=tuple(reports), index=self.index(sub))
        self.logger.info(
            f"Kill holonomy with {len(separators)} separators: index {report.index}, "
            f"success={report.success}"
        )
        return report


# Singleton instance
holonomy_service = HolonomyService()
