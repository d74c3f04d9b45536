"""
Reflection Service.
Holonomy of systems of local reflections, fields and their action,
decomposition over a transversal, e-wall solvers and germ extension.
"""
import random
from collections import deque
from typing import Any, Iterable, Optional, Sequence

import networkx as nx

from app.core.config import settings
from app.core.exceptions import (
    ConfigurationException,
    ConsistencyFailure,
    EWallNotTree,
    HolonomyPresent,
    NotClean,
    NotDecomposable,
    NotSymmetric,
    PolygonOnBoundary,
    ReflectionException,
)
from app.core.logging import LoggerMixin
from app.domain.complexes import sort_key
from app.domain.coxeter import BlockComplex, BlockComplexKind, CoxeterData, CoxWord
from app.domain.polygonal import Wall
from app.domain.reflections import (
    AutomorphismForm,
    EWallCrossing,
    EWallFieldSolution,
    GermExtension,
    GSequenceReport,
    KillIterationReport,
    KillStep,
    LRSystem,
    Permutation,
    Rank1Field,
    Rank2Field,
    SemiEdge,
    Step,
    Triangle,
    partner,
)
from app.services.davis.davis_service import davis_service
from app.services.holonomy.atlas_service import compose, invert
from app.services.polygonal.polygonal_service import polygonal_service


class ReflectionService(LoggerMixin):
    """Service for systems of local reflections on Davis blocks."""

    def __init__(self):
        """Initialize reflection service."""
        self.davis = davis_service
        self._fixers: dict[tuple, list[Permutation]] = {}
        self._automorphisms: dict[tuple, list[Permutation]] = {}

    # Aut(L, m)

    def automorphisms(self, d: CoxeterData) -> list[Permutation]:
        if d.signature not in self._automorphisms:
            self._automorphisms[d.signature] = self.davis.automorphisms(d)
        return self._automorphisms[d.signature]

    def fixers(self, d: CoxeterData, i: int) -> list[Permutation]:
        """F(e) for an edge of type i: automorphisms fixing star(i) pointwise, identity first."""
        key = (d.signature, i)
        if key not in self._fixers:
            self._fixers[key] = self.davis.star_fixers(d, i, self.automorphisms(d))
        return self._fixers[key]

    def fixes_star(self, d: CoxeterData, i: int, a: Permutation) -> bool:
        return all(a[v] == v for v in d.star(i))

    # Systems

    def sigma_w(self, ball: BlockComplex) -> LRSystem:
        """The standard system: every local reflection is the chart transition."""
        return LRSystem(size=ball.data.size, name="standard")

    def validate_system(self, ball: BlockComplex, sigma: LRSystem) -> LRSystem:
        """
        Every entry is a weight-preserving automorphism fixing the star of its type.

        Raises:
            ReflectionException: Naming the first bad edge
        """
        d = ball.data
        auts = set(self.automorphisms(d))
        for e, a in sorted(sigma.values.items(), key=lambda item: sort_key(item[0])):
            if e not in ball.edge_types:
                raise ReflectionException(f"System has an entry for unknown edge {e!r}", {"edge": str(e)})
            if a not in auts or not self.fixes_star(d, ball.edge_types[e], a):
                raise ReflectionException(
                    f"Entry at {e!r} does not fix star({d.names[ball.edge_types[e]]})", {"edge": str(e)}
                )
        return sigma

    def system_from_config(self, ball: BlockComplex, data: dict[str, Any]) -> LRSystem:
        """
        Parse {"values": [{"block": b, "type": i, "map": [...]}, ...]}.

        The map is read in the direction leaving the given block.

        Raises:
            ConfigurationException: On unknown rank-1 vertices
        """
        values = {}
        for entry in data.get("values", []):
            block = entry["block"]
            block = tuple(block) if isinstance(block, list) else block
            i = int(entry["type"])
            if (block, i) not in ball.across:
                raise ConfigurationException(
                    f"No rank-1 vertex of type {i} at block {block!r}", {"field": "values.block"}
                )
            e = ball.edge_id(block, i)
            a = tuple(entry["map"])
            values[e] = a if ball.lower_block(e) == block else invert(a)
        return self.validate_system(ball, LRSystem(size=ball.data.size, values=values, name=data.get("name", "")))

    def pullback(self, ball: BlockComplex, quotient: BlockComplex, sigma: LRSystem) -> LRSystem:
        """Lift a system on a quotient block complex to a Davis ball through the quotient map."""
        hom = quotient.hom
        if hom is None:
            raise ReflectionException("Pullback needs a quotient block complex")
        values = {}
        for e, i in ball.edge_types.items():
            q = hom.evaluate(ball.lower_block(e))
            qe = quotient.edge_id(q, i)
            a = sigma.value(qe)
            a = a if quotient.lower_block(qe) == q else invert(a)
            if a != sigma.identity:
                values[e] = a
        return LRSystem(size=sigma.size, values=values, name=f"pullback of {sigma.name}".strip())

    # Traversals and holonomy

    def traversal(self, ball: BlockComplex, tau: Triangle) -> list[Step]:
        pid, direction = tau
        if pid not in ball.x.polygons:
            raise PolygonOnBoundary(f"Polygon {pid!r} is not complete in the ball", {"polygon": str(pid)})
        blocks = ball.polygon_blocks[pid]
        cycle = ball.x.polygons[pid].cycle
        k = len(cycle)
        if direction > 0:
            sides = [(s, blocks[s], blocks[(s + 1) % k]) for s in range(k)]
        else:
            sides = [(k - t, blocks[(k - t + 1) % k], blocks[k - t]) for t in range(1, k + 1)]
        return [Step(side=s, source=a, target=b, edge=cycle[s][0]) for s, a, b in sides]

    def step_map(self, ball: BlockComplex, sigma: LRSystem, step: Step) -> Permutation:
        """Chart map of the local reflection from the source block to the target block."""
        a = sigma.value(step.edge)
        return a if ball.lower_block(step.edge) == step.source else invert(a)

    def holonomy(self, ball: BlockComplex, sigma: LRSystem, tau: Triangle) -> Permutation:
        """
        Composite of the local reflections around the polygon of tau.

        Raises:
            PolygonOnBoundary: If the polygon is not complete
        """
        h = sigma.identity
        for step in self.traversal(ball, tau):
            h = compose(self.step_map(ball, sigma, step), h)
        return h

    def holonomies(self, ball: BlockComplex, sigma: LRSystem) -> dict[Triangle, Permutation]:
        return {
            (pid, direction): self.holonomy(ball, sigma, (pid, direction))
            for pid in ball.x.polygon_ids()
            for direction in (1, -1)
        }

    def nontrivial_holonomy(self, ball: BlockComplex, sigma: LRSystem) -> list[Triangle]:
        return [tau for tau, h in self.holonomies(ball, sigma).items() if h != sigma.identity]

    def local_reflection_map(self, ball: BlockComplex, sigma: LRSystem, e: Any) -> dict[tuple[Any, int], tuple[Any, int]]:
        """Point map of U(v) on (block, vertex of L) keys; an involution swapping the two blocks."""
        lower, upper = ball.lower_block(e), ball.upper_block(e)
        a = sigma.value(e)
        b = invert(a)
        cells = {(lower, x): (upper, a[x]) for x in range(sigma.size)}
        cells.update({(upper, x): (lower, b[x]) for x in range(sigma.size)})
        return cells

    def holonomy_by_cells(self, ball: BlockComplex, sigma: LRSystem, tau: Triangle) -> Permutation:
        """Holonomy by moving points through the local reflection maps one at a time."""
        steps = self.traversal(ball, tau)
        points = [(steps[0].source, x) for x in range(sigma.size)]
        for step in steps:
            cells = self.local_reflection_map(ball, sigma, step.edge)
            points = [cells[p] for p in points]
        if any(block != steps[0].source for block, _ in points):
            raise ConsistencyFailure(f"Traversal of {tau!r} does not return to its block")
        return tuple(x for _, x in points)

    def f_plus(self, ball: BlockComplex, tau: Triangle) -> list[Permutation]:
        first = self.traversal(ball, tau)[0]
        return self.fixers(ball.data, ball.edge_types[first.edge])

    def f_minus(self, ball: BlockComplex, tau: Triangle) -> list[Permutation]:
        second = self.traversal(ball, tau)[1]
        return self.fixers(ball.data, ball.edge_types[second.edge])

    # Fields

    def semi_edges(self, ball: BlockComplex, e: Any) -> tuple[SemiEdge, SemiEdge]:
        return (e, ball.lower_block(e)), (e, ball.upper_block(e))

    def mirror(self, sigma: LRSystem, e: Any, a: Permutation) -> Permutation:
        """Value on the opposite semi-edge forced by symmetry: alpha a^-1 alpha^-1."""
        alpha = sigma.value(e)
        return compose(alpha, compose(invert(a), invert(alpha)))

    def symmetric_field(self, ball: BlockComplex, sigma: LRSystem, lower_values: dict[Any, Permutation]) -> Rank1Field:
        """The sigma-symmetric field with the given values on lower semi-edges."""
        values = {}
        for e, a in lower_values.items():
            low, high = self.semi_edges(ball, e)
            values[low] = a
            values[high] = self.mirror(sigma, e, a)
        return Rank1Field(size=sigma.size, values=values)

    def random_symmetric_field(
        self,
        ball: BlockComplex,
        sigma: LRSystem,
        rng: Optional[random.Random] = None,
        types: Optional[Iterable[int]] = None,
    ) -> Rank1Field:
        """Uniform choice in F(e) on every lower semi-edge of the chosen types."""
        rng = rng or random.Random(settings.random_seed)
        types = set(ball.data.vertices if types is None else types)
        lower_values = {
            e: rng.choice(self.fixers(ball.data, i))
            for e, i in sorted(ball.edge_types.items(), key=lambda item: sort_key(item[0]))
            if i in types
        }
        return self.symmetric_field(ball, sigma, lower_values)

    def check_symmetric(self, ball: BlockComplex, sigma: LRSystem, f: Rank1Field) -> None:
        """
        Raises:
            NotSymmetric: At the first rank-1 vertex violating sigma_v f(e) = f(e')^-1 sigma_v
        """
        d = ball.data
        for e, i in sorted(ball.edge_types.items(), key=lambda item: sort_key(item[0])):
            low, high = self.semi_edges(ball, e)
            for semi in (low, high):
                if not self.fixes_star(d, i, f.value(semi)):
                    raise NotSymmetric(
                        f"Field value at {semi!r} does not fix star({d.names[i]})", {"edge": str(e)}
                    )
            if f.value(high) != self.mirror(sigma, e, f.value(low)):
                raise NotSymmetric(f"Field is not symmetric at rank-1 vertex {e!r}", {"edge": str(e)})

    def apply_field(self, ball: BlockComplex, sigma: LRSystem, f: Rank1Field) -> LRSystem:
        """
        The system sigma f: sigma'_v(p) = sigma_v(f(e) p).

        Raises:
            NotSymmetric: If f is not sigma-symmetric
        """
        self.check_symmetric(ball, sigma, f)
        values = dict(sigma.values)
        for e in {semi[0] for semi in f.support()}:
            low, _ = self.semi_edges(ball, e)
            values[e] = compose(sigma.value(e), f.value(low))
        values = {e: a for e, a in values.items() if a != sigma.identity}
        return LRSystem(size=sigma.size, values=values, name=sigma.name)

    def field_from_systems(self, ball: BlockComplex, sigma: LRSystem, sigma_prime: LRSystem) -> Rank1Field:
        """The unique field f with sigma f = sigma_prime."""
        values = {}
        for e in sigma.support() | sigma_prime.support():
            alpha, beta = sigma.value(e), sigma_prime.value(e)
            low, high = self.semi_edges(ball, e)
            values[low] = compose(invert(alpha), beta)
            values[high] = compose(alpha, invert(beta))
        values = {s: a for s, a in values.items() if a != sigma.identity}
        return Rank1Field(size=sigma.size, values=values)

    def g_sequence(self, ball: BlockComplex, sigma: LRSystem, f: Rank1Field, tau: Triangle) -> GSequenceReport:
        """
        Conjugated field values g_1..g_2m along the traversal of tau.

        g_k is f at the k-th source semi-edge, pulled back to the base chart;
        the holonomy of sigma f at tau is h_sigma(tau) g_2m ... g_1.
        """
        d = ball.data
        steps = self.traversal(ball, tau)
        first, second = ball.edge_types[steps[0].edge], ball.edge_types[steps[1].edge]
        partial = sigma.identity
        gs = []
        for step in steps:
            fk = f.value((step.edge, step.source))
            gs.append(compose(invert(partial), compose(fk, partial)))
            partial = compose(self.step_map(ball, sigma, step), partial)

        parity_ok = all(
            self.fixes_star(d, first if k % 2 == 0 else second, g) for k, g in enumerate(gs)
        )
        product = sigma.identity
        for g in gs:
            product = compose(g, product)
        predicted = compose(self.holonomy(ball, sigma, tau), product)
        actual = self.holonomy(ball, self.apply_field(ball, sigma, f), tau)
        return GSequenceReport(triangle=tau, gs=tuple(gs), parity_ok=parity_ok, formula_holds=predicted == actual)

    # Decomposition over the transversal

    def transversal(self, ball: BlockComplex) -> list[Triangle]:
        """One (0, 2)-class per polygon, at its least block."""
        return [(pid, direction) for pid in ball.x.polygon_ids() for direction in (1, -1)]

    def side_label(self, side: int) -> int:
        """+1 on even sides of the stored cycle, -1 on odd ones."""
        return 1 if side % 2 == 0 else -1

    def decompose_holonomy(self, ball: BlockComplex, sigma: LRSystem) -> Rank2Field:
        """
        phi on the transversal with h_sigma(tau) = phi(tau')^-1 phi(tau).

        For each polygon, phi(tau') runs over F+(tau') identity first and
        phi(tau) = phi(tau') h must land in F+(tau).

        Raises:
            NotDecomposable: If some holonomy is outside F+(tau) F-(tau)
        """
        values = {}
        for pid in ball.x.polygon_ids():
            tau = (pid, 1)
            h = self.holonomy(ball, sigma, tau)
            plus = set(self.f_plus(ball, tau))
            for b in self.f_minus(ball, tau):
                a = compose(b, h)
                if a in plus:
                    break
            else:
                raise NotDecomposable(f"Holonomy at {tau!r} is not in F+ F-", {"triangle": str(tau)})
            if a != sigma.identity:
                values[tau] = a
            if b != sigma.identity:
                values[partner(tau)] = b
        return Rank2Field(size=sigma.size, values=values)

    def decomposes(self, ball: BlockComplex, sigma: LRSystem, phi: Rank2Field, polygons: Optional[Iterable[Any]] = None) -> bool:
        polygons = ball.x.polygon_ids() if polygons is None else polygons
        for pid in polygons:
            tau = (pid, 1)
            expected = compose(invert(phi.value(partner(tau))), phi.value(tau))
            if self.holonomy(ball, sigma, tau) != expected:
                return False
        return True

    # E-walls

    def ewalls(self, ball: BlockComplex) -> list[Wall]:
        """E-walls of X, one per support."""
        seen: set[frozenset] = set()
        walls = []
        for wall in polygonal_service.compute_ewalls(ball.x):
            if wall.edges not in seen:
                seen.add(wall.edges)
                walls.append(wall)
        return walls

    def crossings(self, ball: BlockComplex, wall: Wall) -> list[EWallCrossing]:
        """
        Dual sides of the wall in each polygon, with the transversal triangle they select.

        Raises:
            NotClean: If the wall crosses some polygon twice
        """
        by_polygon: dict[Any, list[frozenset[int]]] = {}
        for pid, sides in wall.diameters:
            by_polygon.setdefault(pid, []).append(sides)
        result = []
        for pid in sorted(by_polygon, key=sort_key):
            if len(by_polygon[pid]) > 1:
                raise NotClean(f"E-wall crosses polygon {pid!r} more than once", {"polygon": str(pid)})
            j1, j2 = sorted(by_polygon[pid][0])
            k = ball.x.polygons[pid].k
            tau = (pid, self.side_label(j1))
            if tau[1] > 0:
                steps = {j1: j1 + 1, j2: j2 + 1}
            else:
                steps = {j1: k - j1, j2: k - j2}
            ordered = sorted((j1, j2), key=lambda s: steps[s])
            result.append(EWallCrossing(
                polygon=pid, sides=tuple(ordered), triangle=tau, steps=tuple(steps[s] for s in ordered),
            ))
        return result

    def _solve_from_seed(
        self,
        ball: BlockComplex,
        sigma: LRSystem,
        phi: Rank2Field,
        crossings: Sequence[EWallCrossing],
        seed_edge: Any,
        seed_low: Permutation,
    ) -> Optional[dict[Any, Permutation]]:
        """Propagate lower semi-edge values across the wall; None if some equation fails."""
        d = ball.data
        frames = {}
        by_edge: dict[Any, list[EWallCrossing]] = {}
        for c in crossings:
            steps = self.traversal(ball, c.triangle)
            partials = [sigma.identity]
            for step in steps:
                partials.append(compose(self.step_map(ball, sigma, step), partials[-1]))
            frames[c.polygon] = (steps, partials)
            for s in c.sides:
                by_edge.setdefault(ball.x.polygons[c.polygon].cycle[s][0], []).append(c)

        def at_source(e: Any, source: Any, low: Permutation) -> Permutation:
            return low if source == ball.lower_block(e) else self.mirror(sigma, e, low)

        def to_low(e: Any, source: Any, a: Permutation) -> Permutation:
            if source == ball.lower_block(e):
                return a
            alpha = sigma.value(e)
            return compose(invert(alpha), compose(invert(a), alpha))

        def g_at(c: EWallCrossing, index: int, low_values: dict[Any, Permutation]) -> Permutation:
            steps, partials = frames[c.polygon]
            step = steps[c.steps[index] - 1]
            p = partials[c.steps[index] - 1]
            return compose(invert(p), compose(at_source(step.edge, step.source, low_values[step.edge]), p))

        values = {seed_edge: seed_low}
        queue = deque([seed_edge])
        while queue:
            e = queue.popleft()
            for c in by_edge.get(e, []):
                steps, partials = frames[c.polygon]
                target = phi.value(c.triangle)
                known = [k for k in (0, 1) if steps[c.steps[k] - 1].edge in values]
                if len(known) == 2:
                    continue
                if known == [0]:
                    g = compose(invert(target), invert(g_at(c, 0, values)))
                    index = 1
                else:
                    g = compose(invert(g_at(c, 1, values)), invert(target))
                    index = 0
                step = steps[c.steps[index] - 1]
                p = partials[c.steps[index] - 1]
                a = compose(p, compose(g, invert(p)))
                values[step.edge] = to_low(step.edge, step.source, a)
                queue.append(step.edge)

        # Closing equations, including those skipped on cycles
        for c in crossings:
            if compose(g_at(c, 1, values), g_at(c, 0, values)) != invert(phi.value(c.triangle)):
                return None
        for e, a in values.items():
            if not self.fixes_star(d, ball.edge_types[e], a):
                return None
        return values

    def solve_ewall_field(
        self,
        ball: BlockComplex,
        sigma: LRSystem,
        phi: Rank2Field,
        wall: Wall,
        seed: Optional[SemiEdge] = None,
        seed_value: Optional[Permutation] = None,
        tolerant: bool = False,
    ) -> Optional[EWallFieldSolution]:
        """
        The member of F(sigma, phi, M) with a prescribed value at a seed semi-edge.

        In every polygon crossed by M the two contributions satisfy
        g_i2 g_i1 = phi(tau(pi, M))^-1, which kills phi at tau(pi, M).

        Args:
            ball: Block complex
            sigma: Current system
            phi: Decomposition of the holonomy of sigma
            wall: E-wall
            seed: Semi-edge (edge, block); defaults to the lower side of the first edge
            seed_value: Value at the seed; defaults to the identity
            tolerant: Accept cyclic wall graphs when every closing equation holds

        Returns:
            The solution, or None when tolerant and some equation fails

        Raises:
            EWallNotTree: If the geometric e-wall is not a tree and not tolerant
            NotClean: If the wall crosses a polygon twice
        """
        if not tolerant and not polygonal_service.geometric_wall(ball.x, wall).acyclic:
            raise EWallNotTree("Geometric e-wall has a cycle", {"edges": sorted(map(str, wall.edges))})
        crossings = self.crossings(ball, wall)
        edges = sorted(wall.edges, key=sort_key)
        seed = seed or (edges[0], ball.lower_block(edges[0]))
        seed_value = seed_value or sigma.identity
        e, block = seed
        seed_low = seed_value if block == ball.lower_block(e) else compose(
            invert(sigma.value(e)), compose(invert(seed_value), sigma.value(e))
        )
        values = self._solve_from_seed(ball, sigma, phi, crossings, e, seed_low)
        if values is None:
            if tolerant:
                return None
            raise ReflectionException("E-wall equations do not close", {"edges": sorted(map(str, wall.edges))})
        field = self.symmetric_field(ball, sigma, {k: a for k, a in values.items() if a != sigma.identity})
        return EWallFieldSolution(
            edges=wall.edges, field=field, seed=seed, seed_value=seed_value, crossings=tuple(crossings),
        )

    def ewall_field_solutions(
        self, ball: BlockComplex, sigma: LRSystem, phi: Rank2Field, wall: Wall, tolerant: bool = False,
    ) -> list[EWallFieldSolution]:
        """One solution per seed value in F(e) at the default seed, when it exists."""
        edges = sorted(wall.edges, key=sort_key)
        seed = (edges[0], ball.lower_block(edges[0]))
        solutions = []
        for value in self.fixers(ball.data, ball.edge_types[edges[0]]):
            solution = self.solve_ewall_field(ball, sigma, phi, wall, seed, value, tolerant=tolerant)
            if solution is not None:
                solutions.append(solution)
        return solutions

    # Killing holonomy

    def kill_half_holonomy(
        self,
        ball: BlockComplex,
        sigma: LRSystem,
        phi: Rank2Field,
        orbit: Sequence[Wall],
        choices: Optional[Sequence[EWallFieldSolution]] = None,
        tolerant: bool = False,
    ) -> tuple[LRSystem, Rank2Field]:
        """
        Modify sigma along pairwise disjoint e-walls so phi dies at tau(pi, M).

        Returns:
            (sigma f, phi') where phi' is trivial at tau(pi, M), equal to
            phi elsewhere, and decomposes the holonomy of sigma f

        Raises:
            NotClean: If two walls of the orbit cross a common polygon
            EWallNotTree: If some wall has no solution
        """
        if not orbit:
            return sigma, phi
        crossed: dict[Any, int] = {}
        for n, wall in enumerate(orbit):
            for c in self.crossings(ball, wall):
                if c.polygon in crossed:
                    raise NotClean(
                        f"Walls {crossed[c.polygon]} and {n} of the orbit cross polygon {c.polygon!r}",
                        {"polygon": str(c.polygon)},
                    )
                crossed[c.polygon] = n

        if choices is None:
            choices = []
            for wall in orbit:
                found = (
                    self.ewall_field_solutions(ball, sigma, phi, wall, tolerant=True)
                    if tolerant else [self.solve_ewall_field(ball, sigma, phi, wall)]
                )
                if not found:
                    raise EWallNotTree(
                        "No seed value closes the e-wall equations", {"edges": sorted(map(str, wall.edges))}
                    )
                choices.append(found[0])

        merged = {}
        for choice in choices:
            merged.update(choice.field.values)
        sigma_prime = self.apply_field(ball, sigma, Rank1Field(size=sigma.size, values=merged))

        values = dict(phi.values)
        for choice in choices:
            for c in choice.crossings:
                values.pop(c.triangle, None)
        phi_prime = Rank2Field(size=phi.size, values=values)

        if not self.decomposes(ball, sigma_prime, phi_prime, crossed):
            raise NotDecomposable("Modified system is not decomposed by phi'")
        self.logger.debug(f"Killed half holonomy on {len(crossed)} polygons across {len(orbit)} e-walls")
        return sigma_prime, phi_prime

    def kill_holonomy_iteration(
        self, ball: BlockComplex, sigma: LRSystem, tolerant: Optional[bool] = None,
    ) -> KillIterationReport:
        """
        Kill half holonomy across every e-wall, one wall per orbit.

        Quotient complexes are solved tolerantly: cyclic e-walls are accepted
        when some seed closes every equation.
        """
        tolerant = ball.kind == BlockComplexKind.QUOTIENT if tolerant is None else tolerant
        self.logger.info(f"Killing holonomy of {sigma.name or 'system'} on {len(ball.blocks)} blocks")
        phi = self.decompose_holonomy(ball, sigma)
        steps = []
        obstructions = []
        for wall in self.ewalls(ball):
            try:
                crossings = self.crossings(ball, wall)
            except NotClean:
                obstructions.append(tuple(sorted(wall.edges, key=sort_key)))
                continue
            if all(phi.value(c.triangle) == sigma.identity for c in crossings):
                continue
            try:
                sigma, phi_next = self.kill_half_holonomy(ball, sigma, phi, [wall], tolerant=tolerant)
            except ReflectionException as e:
                self.logger.debug(f"E-wall {sorted(map(str, wall.edges))[:3]}... obstructs: {e.message}")
                obstructions.append(tuple(sorted(wall.edges, key=sort_key)))
                continue
            killed = tuple(c.triangle for c in crossings if phi.value(c.triangle) != sigma.identity)
            steps.append(KillStep(edges=wall.edges, killed=killed))
            phi = phi_next

        residual = tuple(self.nontrivial_holonomy(ball, sigma))
        self.logger.info(
            f"Holonomy iteration: {len(steps)} walls used, {len(obstructions)} obstructions, "
            f"{len(residual)} triangles with holonomy left"
        )
        return KillIterationReport(
            system=sigma, decomposition=phi, steps=tuple(steps),
            obstructions=tuple(obstructions), residual=residual,
        )

    # Germ extension

    def _image_step(self, ball: BlockComplex, sigma_prime: LRSystem, block: tuple[int, ...], i: int) -> Permutation:
        """Step map of sigma' leaving an image block across type i; identity outside the ball."""
        if (block, i) not in ball.across:
            return sigma_prime.identity
        e = ball.edge_id(block, i)
        a = sigma_prime.value(e)
        return a if ball.lower_block(e) == block else invert(a)

    def extend_system_germ(
        self,
        ball: BlockComplex,
        sigma: LRSystem,
        sigma_prime: LRSystem,
        germ: Permutation,
        image: Sequence[int] = (),
        base: Sequence[int] = (),
    ) -> GermExtension:
        """
        Extend a block germ to an automorphism carrying sigma to sigma'.

        Crossing the type-i facet of b: F(b s_i) = F(b) s_f(i) and
        f_(b s_i) = sigma'_step o f_b o sigma_step^-1. Every arrival at an
        already reached block must agree.

        Raises:
            HolonomyPresent: If either system has holonomy in the ball
            ConsistencyFailure: If two galleries disagree on a block
        """
        d = ball.data
        for name, system in (("source", sigma), ("target", sigma_prime)):
            residual = self.nontrivial_holonomy(ball, system)
            if residual:
                raise HolonomyPresent(
                    f"The {name} system has holonomy at {residual[0]!r}", {"triangle": str(residual[0])}
                )
        if tuple(germ) not in set(self.automorphisms(d)):
            raise ReflectionException(f"Germ {tuple(germ)} is not an automorphism of (L, m)")

        base = tuple(base)
        images = {base: self.davis.cox_normalize(d, image).letters}
        charts = {base: tuple(germ)}
        closed = 0
        queue = deque([base])
        while queue:
            b = queue.popleft()
            f_b = charts[b]
            for i in d.vertices:
                if (b, i) not in ball.across:
                    continue
                nb = ball.across[(b, i)]
                j = f_b[i]
                image_nb = self.davis.multiply(d, CoxWord(letters=images[b]), (j,)).letters
                back = self.step_map(ball, sigma, Step(side=0, source=b, target=nb, edge=ball.edge_id(b, i)))
                chart = compose(self._image_step(ball, sigma_prime, images[b], j), compose(f_b, invert(back)))
                if nb in images:
                    if images[nb] != image_nb or charts[nb] != chart:
                        raise ConsistencyFailure(
                            f"Galleries disagree at block {d.name_of(nb)}", {"block": list(nb)}
                        )
                    closed += 1
                    continue
                images[nb] = image_nb
                charts[nb] = chart
                queue.append(nb)
        self.logger.debug(f"Extended germ to {len(images)} blocks, {closed} loop closures checked")
        return GermExtension(base=base, images=images, charts=charts, closed_loops=closed)

    def identify_automorphism(self, d: CoxeterData, extension: GermExtension) -> Optional[AutomorphismForm]:
        """Recognize x -> w alpha(x) with alpha in Aut(L, m); None if not of that form."""
        alpha = extension.charts[extension.base]
        if any(chart != alpha for chart in extension.charts.values()):
            return None
        w = CoxWord(letters=extension.images[extension.base])
        if extension.base:
            w = self.davis.multiply(d, w, tuple(alpha[x] for x in reversed(extension.base)))
        for block, image in extension.images.items():
            moved = self.davis.multiply(d, w, tuple(alpha[x] for x in block))
            if moved.letters != image:
                return None
        return AutomorphismForm(translation=w, graph_automorphism=alpha)

    def chamber_system_graph(self, ball: BlockComplex, sigma: LRSystem) -> nx.MultiGraph:
        """Blocks joined per rank-1 vertex, labelled by type and the stored reflection."""
        g = nx.MultiGraph()
        g.add_nodes_from(ball.blocks)
        for e, i in sorted(ball.edge_types.items(), key=lambda item: sort_key(item[0])):
            g.add_edge(ball.lower_block(e), ball.upper_block(e), key=e, type=i, reflection=sigma.value(e))
        return g


# Singleton instance
reflection_service = ReflectionService()
