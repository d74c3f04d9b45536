"""
Group Service.
Handles validation and exact arithmetic of finite groups given by tables.
"""
import random
from collections import deque
from typing import Any, Iterable, Optional, Sequence

from app.core.config import settings
from app.core.exceptions import (
    NotLatinSquare, NonAssociative, NoIdentity, NotASubgroup, RelationViolated
)
from app.core.logging import LoggerMixin
from app.domain.groups import FiniteGroup, GroupHom, SubgroupData


class GroupService(LoggerMixin):
    """
    Service for finite group validation, subgroups and homomorphisms.

    All methods are pure; groups and homomorphisms are immutable.
    """

    def validate_group(
        self,
        table: Sequence[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
        name: str = "",
    ) -> FiniteGroup:
        """
        Validate a multiplication table and build a FiniteGroup.

        Associativity is checked on every triple up to
        settings.associativity_exhaustive_max and on random triples above.

        Args:
            table: Square matrix, table[a][b] = index of a*b
            labels: Optional element names
            name: Optional display name

        Returns:
            FiniteGroup with identity and inverses computed

        Raises:
            NotLatinSquare: If the table is not square or a row/column repeats
            NoIdentity: If there is no two-sided identity
            NonAssociative: If some triple fails (ab)c = a(bc)
        """
        n = len(table)
        rows = [tuple(int(x) for x in row) for row in table]
        if n == 0 or any(len(row) != n for row in rows):
            raise NotLatinSquare("Multiplication table must be a nonempty square", {"order": n})

        full = set(range(n))
        for a, row in enumerate(rows):
            if set(row) != full:
                raise NotLatinSquare(f"Row {a} is not a permutation", {"row": a})
        for b in range(n):
            if {rows[a][b] for a in range(n)} != full:
                raise NotLatinSquare(f"Column {b} is not a permutation", {"column": b})

        triple = self._associativity_failure(rows)
        if triple is not None:
            raise NonAssociative(
                f"Associativity fails on {triple}", {"triple": list(triple)}
            )

        identity = next(
            (e for e in range(n)
             if all(rows[e][x] == x and rows[x][e] == x for x in range(n))),
            None,
        )
        if identity is None:
            raise NoIdentity("Table has no two-sided identity")

        inverses = tuple(rows[a].index(identity) for a in range(n))
        if labels is not None and len(labels) != n:
            raise NotLatinSquare("Label count does not match order", {"labels": len(labels)})

        self.logger.debug(f"Validated group of order {n}")
        return FiniteGroup(
            table=tuple(rows),
            identity=identity,
            inverses=inverses,
            labels=tuple(labels) if labels else None,
            name=name,
        )

    def _associativity_failure(self, rows: list[tuple[int, ...]]) -> Optional[tuple[int, int, int]]:
        n = len(rows)
        if n <= settings.associativity_exhaustive_max:
            triples: Iterable[tuple[int, int, int]] = (
                (a, b, c) for a in range(n) for b in range(n) for c in range(n)
            )
        else:
            rng = random.Random(settings.random_seed)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(settings.associativity_samples)
            )
            self.logger.info(f"Sampling {settings.associativity_samples} triples for order {n}")
        for a, b, c in triples:
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                return (a, b, c)
        return None

    # Subgroups

    def subgroup_closure(self, g: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
        """
        Smallest subgroup containing gens.

        Args:
            g: Ambient group
            gens: Generating indices

        Returns:
            Frozen set of element indices
        """
        gens = list(gens)
        closure = {g.identity}
        queue = deque([g.identity])
        while queue:
            x = queue.popleft()
            for s in gens:
                for y in (g.mul(x, s), g.mul(x, g.inv(s))):
                    if y not in closure:
                        closure.add(y)
                        queue.append(y)
        return frozenset(closure)

    def is_subgroup(self, g: FiniteGroup, subset: Iterable[int]) -> bool:
        subset = set(subset)
        if g.identity not in subset:
            return False
        return all(g.mul(a, g.inv(b)) in subset for a in subset for b in subset)

    def require_subgroup(self, g: FiniteGroup, subset: Iterable[int], name: str = "subset") -> frozenset[int]:
        subset = frozenset(subset)
        if not self.is_subgroup(g, subset):
            raise NotASubgroup(f"{name} is not a subgroup", {"subset": sorted(subset)})
        return subset

    def left_coset(self, g: FiniteGroup, x: int, h: Iterable[int]) -> frozenset[int]:
        """The coset xH."""
        return frozenset(g.mul(x, y) for y in h)

    def double_coset(self, g: FiniteGroup, left: Iterable[int], x: int, right: Iterable[int]) -> frozenset[int]:
        right = list(right)
        return frozenset(g.mul(g.mul(a, x), b) for a in left for b in right)

    def double_coset_reps(
        self,
        g: FiniteGroup,
        left: Iterable[int],
        right: Iterable[int],
        within: Optional[Iterable[int]] = None,
    ) -> list[int]:
        """
        One representative per double coset left\\G/right.

        Representatives are the least index of their class. When within is
        given (a subgroup containing left and right), only its double cosets
        are listed.

        Raises:
            NotASubgroup: If left, right or within is not a subgroup
        """
        left = self.require_subgroup(g, left, "left")
        right = self.require_subgroup(g, right, "right")
        universe = (
            sorted(self.require_subgroup(g, within, "within"))
            if within is not None else list(g.elements())
        )

        seen: set[int] = set()
        reps = []
        for x in universe:
            if x in seen:
                continue
            reps.append(x)
            seen |= self.double_coset(g, left, x, right)
        return reps

    # Homomorphisms

    def hom_check(self, h: GroupHom) -> GroupHom:
        """
        Verify that every defining relation maps to the identity.

        Args:
            h: Homomorphism to check

        Returns:
            The same homomorphism

        Raises:
            RelationViolated: Naming the first failing relation
        """
        missing = [k for k in h.generators if k not in h.images]
        if missing:
            raise RelationViolated(
                f"No image for generators {missing}", {"generators": [str(k) for k in missing]}
            )
        violation = h.first_violation()
        if violation is not None:
            value = h.evaluate(violation.word)
            raise RelationViolated(
                f"Relation {violation.name} maps to {h.target.label(value)}",
                {"relation": violation.name, "value": value},
            )
        self.logger.debug(f"Checked {len(h.relators)} relations of {h.source_name or h.source_kind}")
        return h

    def image_subgroup(self, h: GroupHom) -> frozenset[int]:
        """Image of the homomorphism (closure of the generator images)."""
        return self.subgroup_closure(h.target, h.images.values())

    def preimage_table(self, h: GroupHom, keys: Optional[Iterable[Any]] = None) -> dict[int, tuple[Any, ...]]:
        """
        One shortest preimage word per reachable quotient element.

        Breadth-first search over the generator keys (optionally restricted),
        visiting keys in their listed order.
        """
        keys = list(h.generators if keys is None else keys)
        table: dict[int, tuple[Any, ...]] = {h.target.identity: ()}
        queue = deque([h.target.identity])
        while queue:
            q = queue.popleft()
            for key in keys:
                nxt = h.target.mul(q, h.images[key])
                if nxt not in table:
                    table[nxt] = table[q] + (key,)
                    queue.append(nxt)
        return table

    def subgroup_data(self, h: GroupHom, image_subgroup: Iterable[int]) -> SubgroupData:
        """Checked SubgroupData for the preimage of a subgroup."""
        self.hom_check(h)
        subgroup = self.require_subgroup(h.target, image_subgroup, "image_subgroup")
        return SubgroupData(hom=h, image_subgroup=subgroup)

    def index_of(self, sub: SubgroupData) -> int:
        """Index of the preimage subgroup: |Im| / |S cap Im|."""
        image = self.image_subgroup(sub.hom)
        return len(image) // len(image & sub.image_subgroup)


# Singleton instance
group_service = GroupService()
