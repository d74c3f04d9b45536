"""
Cocycle Service.
Coboundaries, the action of automorphisms on cochains, the wall field
solver F(c, M), killing along wall orbits, voltage covers and the exact
linear fallback over finite abelian coefficients.
"""
from collections import deque
from itertools import combinations
from typing import Any, Optional, Sequence

from sympy import factorint, multiplicity
from sympy.ntheory.modular import crt

from app.core.exceptions import (
    InconsistentWallField,
    InvalidComplex,
    SelfIntersecting,
    WallNotTree,
)
from app.core.logging import LoggerMixin
from app.domain.cochains import (
    Cochain1,
    Cocycle2,
    CoverData,
    CoverMethod,
    Element,
    ExtensionReport,
    ExtensionVerdict,
    KillInCoverReport,
    WallFieldSolution,
)
from app.domain.complexes import sort_key
from app.domain.factories import GroupFactory
from app.domain.groups import FiniteAbelian, FiniteGroup
from app.domain.polygonal import CellMap, DeckAction, Edge, Polygon, PolygonalComplex, Wall
from app.services.polygonal.polygonal_service import polygonal_service


def solve_mod_prime_power(
    matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int, e: int
) -> Optional[list[int]]:
    """
    Solve A x = b over Z/p^e, or return None.

    Forward elimination pivots on an entry of least p-valuation in the whole
    remaining block, so every later entry of a pivot row is divisible by its
    pivot and back substitution never has to revisit a choice.
    """
    q = p ** e
    a = [[x % q for x in row] for row in matrix]
    b = [x % q for x in rhs]
    m = len(a)
    n = len(a[0]) if a else 0
    free_cols = set(range(n))
    pivots: list[tuple[int, int, int]] = []
    r = 0
    while r < m:
        best = None
        for i in range(r, m):
            for j in free_cols:
                if a[i][j]:
                    v = multiplicity(p, a[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        a[r], a[i] = a[i], a[r]
        b[r], b[i] = b[i], b[r]
        inv = pow(a[r][j] // p ** v, -1, q)
        a[r] = [(x * inv) % q for x in a[r]]
        b[r] = (b[r] * inv) % q
        for i2 in range(r + 1, m):
            if a[i2][j]:
                t = a[i2][j] // p ** v
                a[i2] = [(x - t * y) % q for x, y in zip(a[i2], a[r])]
                b[i2] = (b[i2] - t * b[r]) % q
        pivots.append((r, j, v))
        free_cols.discard(j)
        r += 1

    if any(b[i] for i in range(r, m)):
        return None
    x = [0] * n
    for row, col, v in reversed(pivots):
        s = (b[row] - sum(a[row][k] * x[k] for k in range(n) if k != col)) % q
        if s % p ** v:
            return None
        x[col] = (s // p ** v) % q
    return x


def solve_mod(matrix: Sequence[Sequence[int]], rhs: Sequence[int], n: int) -> Optional[list[int]]:
    """Solve A x = b over Z/n by prime powers and the Chinese remainder theorem."""
    width = len(matrix[0]) if matrix else 0
    if n == 1:
        return [0] * width
    moduli, solutions = [], []
    for p, e in sorted(factorint(n).items()):
        x = solve_mod_prime_power(matrix, rhs, p, e)
        if x is None:
            return None
        moduli.append(p ** e)
        solutions.append(x)
    if len(moduli) == 1:
        return solutions[0]
    return [int(crt(moduli, [s[k] for s in solutions])[0]) for k in range(width)]


class CocycleService(LoggerMixin):
    """Service for 1-cochains and 2-cocycles on polygonal complexes."""

    def __init__(self):
        """Initialize cocycle service."""
        self.polygonal = polygonal_service

    # Cochain algebra

    def zero_cochain(self, coefficients: FiniteAbelian) -> Cochain1:
        return Cochain1(coefficients=coefficients)

    def cochain(self, coefficients: FiniteAbelian, values: dict[Any, Any]) -> Cochain1:
        return Cochain1(coefficients=coefficients, values={e: coefficients.element(a) for e, a in values.items()})

    def cocycle(self, coefficients: FiniteAbelian, values: dict[Any, Any]) -> Cocycle2:
        return Cocycle2(coefficients=coefficients, values={p: coefficients.element(a) for p, a in values.items()})

    def add_cochains(self, u: Cochain1, v: Cochain1) -> Cochain1:
        a = u.coefficients
        keys = set(u.values) | set(v.values)
        return Cochain1(coefficients=a, values={e: a.add(u.value(e), v.value(e)) for e in keys})

    def add_cocycles(self, c: Cocycle2, d: Cocycle2) -> Cocycle2:
        a = c.coefficients
        keys = set(c.values) | set(d.values)
        return Cocycle2(coefficients=a, values={p: a.add(c.value(p), d.value(p)) for p in keys})

    def negate(self, c: Cocycle2) -> Cocycle2:
        a = c.coefficients
        return Cocycle2(coefficients=a, values={p: a.neg(v) for p, v in c.values.items()})

    def coboundary_at(self, x: PolygonalComplex, u: Cochain1, pid: Any) -> Element:
        a = u.coefficients
        total = a.zero
        for e, s in x.polygons[pid].cycle:
            total = a.add(total, a.scale(s, u.value(e)))
        return total

    def coboundary(self, x: PolygonalComplex, u: Cochain1) -> Cocycle2:
        """du(pi) = sum of eta(e) u(e) over the boundary cycle of pi."""
        return Cocycle2(
            coefficients=u.coefficients,
            values={pid: self.coboundary_at(x, u, pid) for pid in x.polygon_ids()},
        )

    def equal_cocycles(self, x: PolygonalComplex, c: Cocycle2, d: Cocycle2) -> bool:
        return all(c.value(p) == d.value(p) for p in x.polygons)

    def act(self, x: PolygonalComplex, a: DeckAction, g: int, u: Cochain1 | Cocycle2) -> Cochain1 | Cocycle2:
        """
        Push a cochain forward along the automorphism g.

        (g u)(g e) = eta(g, e) u(e) and (g c)(g pi) = eta(g, pi) c(pi).
        """
        coeff = u.coefficients
        cell_map = a[g]
        if isinstance(u, Cochain1):
            values = {}
            for e in x.edges:
                target, eta = cell_map.edges[e]
                values[target] = coeff.scale(eta, u.value(e))
            return Cochain1(coefficients=coeff, values=values)
        values = {}
        for p in x.polygons:
            target, eta = cell_map.polygons[p]
            values[target] = coeff.scale(eta, u.value(p))
        return Cocycle2(coefficients=coeff, values=values)

    # Wall fields

    def _diameter_sides(self, x: PolygonalComplex, m: Wall) -> dict[Any, list[tuple[int, int]]]:
        sides: dict[Any, list[tuple[int, int]]] = {}
        for pairing in m.pairs:
            sides.setdefault(pairing.polygon, [])
            entry = (pairing.first, pairing.second)
            if entry not in sides[pairing.polygon] and entry[::-1] not in sides[pairing.polygon]:
                sides[pairing.polygon].append(entry)
        return sides

    def field_holds(self, x: PolygonalComplex, c: Cocycle2, m: Wall, u: Cochain1) -> bool:
        """Membership in F(c, M): support on dual edges and c + du = 0 on crossed polygons."""
        if not u.support() <= m.edges:
            return False
        return all(
            u.coefficients.is_zero(u.coefficients.add(c.value(pid), self.coboundary_at(x, u, pid)))
            for pid in m.polygons
        )

    def solve_wall_field(
        self,
        x: PolygonalComplex,
        c: Cocycle2,
        m: Wall,
        seed_edge: Any,
        seed_value: Any,
        tolerant: bool = False,
    ) -> WallFieldSolution:
        """
        The member of F(c, M) with u(seed_edge) = seed_value.

        Values propagate across each crossed polygon along its diameter:
        c(pi) + s u(e) + s' u(e') = 0 for the sides s e, s' e' it joins.

        Args:
            x: Polygonal complex
            c: 2-cocycle
            m: Wall whose dual edges carry the field
            seed_edge: An edge dual to m
            seed_value: Coefficient element at the seed edge
            tolerant: Accept cyclic geometric walls when every closing
                equation holds (fields on finite covers)

        Raises:
            WallNotTree: If the geometric wall is not a tree with one
                diameter per polygon (strict mode)
            InconsistentWallField: If propagation contradicts itself
        """
        coeff = c.coefficients
        report = self.polygonal.geometric_wall(x, m)
        if not tolerant and not (report.acyclic and report.at_most_one_diameter):
            raise WallNotTree(
                "Geometric wall is not a tree",
                {"acyclic": report.acyclic, "diameters": {str(k): v for k, v in report.diameters_per_polygon.items()}},
            )
        if seed_edge not in m.edges:
            raise InconsistentWallField(f"Seed edge {seed_edge!r} is not dual to the wall")

        seed_value = coeff.element(seed_value)
        values: dict[Any, Element] = {seed_edge: seed_value}
        diameters = self._diameter_sides(x, m)
        polygons_at: dict[Any, list[Any]] = {}
        for pid in diameters:
            for j in {s for pair in diameters[pid] for s in pair}:
                polygons_at.setdefault(x.polygons[pid].side(j)[0], []).append(pid)

        queue = deque([seed_edge])
        visited_polygons: set[Any] = set()
        while queue:
            e = queue.popleft()
            for pid in sorted(set(polygons_at.get(e, [])), key=sort_key):
                if pid in visited_polygons:
                    continue
                polygon = x.polygons[pid]
                for first, second in diameters[pid]:
                    ends = [polygon.side(first), polygon.side(second)]
                    known = [oe for oe in ends if oe[0] in values]
                    unknown = [oe for oe in ends if oe[0] not in values]
                    if not known or not unknown:
                        continue
                    (ke, ks), (ue, us) = known[0], unknown[0]
                    partial = coeff.add(c.value(pid), coeff.scale(ks, values[ke]))
                    values[ue] = coeff.scale(-us, partial)
                    queue.append(ue)
                visited_polygons.add(pid)

        u = Cochain1(coefficients=coeff, values=values)
        if not self.field_holds(x, c, m, u):
            raise InconsistentWallField(
                "Wall field equations have no solution with this seed",
                {"seed_edge": str(seed_edge), "seed_value": list(seed_value)},
            )
        self.logger.debug(f"Solved wall field on {len(values)} dual edges")
        return WallFieldSolution(wall=m, cochain=u, seed_edge=seed_edge, seed_value=seed_value)

    def field_solutions(self, x: PolygonalComplex, c: Cocycle2, m: Wall, seed_edge: Any) -> list[WallFieldSolution]:
        """One solution per seed value; in the tree case this lists all of F(c, M)."""
        return [self.solve_wall_field(x, c, m, seed_edge, a) for a in c.coefficients.elements()]

    def first_edge(self, m: Wall) -> Any:
        return m.members()[0][0]

    def geometric_walls_meet(self, m1: Wall, m2: Wall) -> bool:
        return bool(m1.edges & m2.edges or m1.polygons & m2.polygons)

    def kill_along_wall(
        self,
        x: PolygonalComplex,
        c: Cocycle2,
        orbit: Sequence[Wall],
        choices: Optional[Sequence[WallFieldSolution]] = None,
        tolerant: bool = False,
    ) -> tuple[Cocycle2, Cochain1]:
        """
        Add the coboundary of a field per wall of an orbit.

        Args:
            x: Polygonal complex
            c: 2-cocycle
            orbit: Walls with pairwise disjoint geometric walls
            choices: One solution per wall; zero-seeded solutions when omitted

        Returns:
            (c', u) with c' = c + du, zero on the polygons crossed by the orbit

        Raises:
            SelfIntersecting: If two walls of the orbit meet
        """
        for m1, m2 in combinations(orbit, 2):
            if m1.oriented_edges != m2.oriented_edges and self.geometric_walls_meet(m1, m2):
                raise SelfIntersecting(
                    "Two walls of the orbit intersect",
                    {"first": [str(oe) for oe in m1.members()], "second": [str(oe) for oe in m2.members()]},
                )
        if choices is None:
            choices = [
                self.solve_wall_field(x, c, m, self.first_edge(m), c.coefficients.zero, tolerant=tolerant)
                for m in orbit
            ]
        u = self.zero_cochain(c.coefficients)
        for solution in choices:
            u = self.add_cochains(u, solution.cochain)
        killed = self.add_cocycles(c, self.coboundary(x, u))

        crossed = set().union(*(m.polygons for m in orbit)) if orbit else set()
        coeff = c.coefficients
        for pid in x.polygons:
            expected = coeff.zero if pid in crossed else c.value(pid)
            if killed.value(pid) != expected:
                raise InconsistentWallField(
                    f"Killing along the orbit leaves polygon {pid!r} wrong", {"polygon": str(pid)}
                )
        return killed, u

    # Covers

    def build_cover(self, base: PolygonalComplex, group: FiniteGroup, voltages: dict[Any, int]) -> CoverData:
        """
        Cover of the base defined by edge voltages in a finite group.

        Raises:
            InvalidComplex: If some polygon has nontrivial voltage product
        """
        q_elements = group.elements()
        vertices = [(v, q) for v in base.vertices for q in q_elements]
        edges = {}
        for e, edge in base.edges.items():
            for q in q_elements:
                edges[(e, q)] = Edge(id=(e, q), tail=(edge.tail, q), head=(edge.head, group.mul(q, voltages[e])))

        polygons = {}
        for pid in base.polygon_ids():
            total = group.product(
                voltages[e] if s == 1 else group.inv(voltages[e]) for e, s in base.polygons[pid].cycle
            )
            if total != group.identity:
                raise InvalidComplex(
                    f"Voltage around polygon {pid!r} is not trivial", {"polygon": str(pid), "product": total}
                )
            for q in q_elements:
                cycle = []
                current = q
                for e, s in base.polygons[pid].cycle:
                    if s == 1:
                        cycle.append(((e, current), 1))
                        current = group.mul(current, voltages[e])
                    else:
                        current = group.mul(current, group.inv(voltages[e]))
                        cycle.append(((e, current), -1))
                polygons[(pid, q)] = Polygon(id=(pid, q), cycle=tuple(cycle))

        cover = self.polygonal.validate(PolygonalComplex(
            vertices=tuple(vertices), edges=edges, polygons=polygons, name=f"{base.name} cover of degree {group.order}"
        ))
        maps = {
            g: CellMap(
                vertices={(v, q): (v, group.mul(g, q)) for v, q in vertices},
                edges={(e, q): ((e, group.mul(g, q)), 1) for e, q in edges},
                polygons={(p, q): ((p, group.mul(g, q)), 1) for p, q in polygons},
            )
            for g in q_elements
        }
        action = DeckAction(group=group, maps=maps)
        self.logger.info(f"Built cover of degree {group.order}: {len(vertices)} vertices, {len(polygons)} polygons")
        return CoverData(base=base, group=group, voltages=dict(voltages), cover=cover, action=action)

    def trivial_cover(self, base: PolygonalComplex) -> CoverData:
        return self.build_cover(base, GroupFactory.cyclic(1, name="1"), {e: 0 for e in base.edges})

    def lift(self, cover: CoverData, c: Cocycle2) -> Cocycle2:
        """p*(c): every sheet of a polygon carries the value of the polygon."""
        return Cocycle2(
            coefficients=c.coefficients,
            values={pid: c.value(pid[0]) for pid in cover.cover.polygons},
        )

    def wall_orbits(self, x: PolygonalComplex, a: DeckAction, walls: Sequence[Wall]) -> list[list[Wall]]:
        """Group walls into orbits of the action; orbits ordered by their first wall."""
        by_members = {w.oriented_edges: w for w in walls}
        seen: set[frozenset] = set()
        orbits = []
        for w in walls:
            if w.oriented_edges in seen:
                continue
            orbit = []
            for g in a.elements():
                moved = self.polygonal.translate_wall(a, g, w)
                if moved not in seen:
                    seen.add(moved)
                    orbit.append(by_members[moved])
            orbits.append(orbit)
        return orbits

    def solve_coboundary(self, x: PolygonalComplex, c: Cocycle2) -> Optional[Cochain1]:
        """
        Some u with du = c, or None.

        Solved per cyclic factor of the coefficients through prime powers.
        """
        coeff = c.coefficients
        edges = sorted(x.edges, key=sort_key)
        polygons = x.polygon_ids()
        column = {e: k for k, e in enumerate(edges)}
        matrix = []
        for pid in polygons:
            row = [0] * len(edges)
            for e, s in x.polygons[pid].cycle:
                row[column[e]] += s
            matrix.append(row)
        if not polygons:
            return self.zero_cochain(coeff)

        per_factor = []
        for index, n in enumerate(coeff.torsion):
            rhs = [c.value(pid)[index] for pid in polygons]
            x_values = solve_mod(matrix, rhs, n)
            if x_values is None:
                return None
            per_factor.append(x_values)
        values = {e: coeff.element([col[k] for col in per_factor]) for k, e in enumerate(edges)}
        return Cochain1(coefficients=coeff, values=values)

    def kill_in_cover(self, cover: CoverData, c: Cocycle2) -> KillInCoverReport:
        """
        Find u on the cover with du = -p*(c).

        Iterates wall fields over the deck-group orbits of walls; when some
        polygon survives, the exact linear solver decides.

        Args:
            cover: Voltage cover of the base
            c: 2-cocycle on the base

        Returns:
            KillInCoverReport; the certificate is re-verified by a direct
            coboundary computation
        """
        x = cover.cover
        coeff = c.coefficients
        lifted = self.lift(cover, c)
        if lifted.is_zero():
            return KillInCoverReport(
                success=True, method=CoverMethod.TRIVIAL, degree=cover.degree,
                certificate=self.zero_cochain(coeff), surviving=lifted,
            )

        current = lifted
        u = self.zero_cochain(coeff)
        obstructions = []
        for orbit in self.wall_orbits(x, cover.action, self.polygonal.compute_walls(x)):
            if all(current.value(pid) == coeff.zero for m in orbit for pid in m.polygons):
                continue
            try:
                current, step = self.kill_along_wall(x, current, orbit, tolerant=True)
            except (InconsistentWallField, SelfIntersecting) as e:
                self.logger.debug(f"Wall orbit skipped: {e.message}")
                obstructions.append(tuple(orbit[0].members()))
                continue
            u = self.add_cochains(u, step)

        method = CoverMethod.WALLS
        if not current.is_zero():
            fallback = self.solve_coboundary(x, self.negate(lifted))
            if fallback is None:
                self.logger.info(f"Cocycle survives in the cover of degree {cover.degree}")
                return KillInCoverReport(
                    success=False, method=CoverMethod.NONE, degree=cover.degree,
                    surviving=current, obstructions=tuple(obstructions),
                )
            u, method = fallback, CoverMethod.LINEAR

        check = self.add_cocycles(self.coboundary(x, u), lifted)
        if not check.is_zero():
            raise InconsistentWallField("Certificate does not kill the lifted cocycle")
        self.logger.info(f"Killed cocycle in the cover of degree {cover.degree} by {method.value}")
        return KillInCoverReport(
            success=True, method=method, degree=cover.degree, certificate=u,
            surviving=self.zero_cocycle(coeff), obstructions=tuple(obstructions),
        )

    def zero_cocycle(self, coefficients: FiniteAbelian) -> Cocycle2:
        return Cocycle2(coefficients=coefficients)

    def extension_report(self, report: KillInCoverReport) -> ExtensionReport:
        """Central extension verdict from a cover result: splits at index = cover degree."""
        if report.success:
            return ExtensionReport(verdict=ExtensionVerdict.SPLITS, index=report.degree)
        return ExtensionReport(
            verdict=ExtensionVerdict.UNRESOLVED, index=report.degree, obstructions=report.obstructions
        )


# Singleton instance
cocycle_service = CocycleService()
