"""
Job runner: builds domain objects from a job file, calls the services and
assembles the report.
"""
import random
from typing import Any, Optional, Union

from app.cli.dot_export import block_graph_dot, chamber_graph_dot, link_graph_dot, wall_dot
from app.core.config import settings
from app.core.exceptions import (
    ConfigurationException,
    NontrivialHolonomy,
    RabuildException,
    WitnessMismatch,
)
from app.core.logging import LoggerMixin
from app.domain.coxeter import BlockComplex, CoxeterData
from app.domain.factories import GroupFactory, PolygonalFactory
from app.domain.graph_product import ProductPresentation
from app.domain.groups import FiniteAbelian, FiniteGroup, GroupHom, SubgroupData
from app.domain.polygonal import CurvatureCondition, PolygonalComplex, Verdict
from app.domain.reflections import LRSystem
from app.schemas.config import DotObject, JobConfig, JobKind, QuotientMapConfig
from app.schemas.report import Report
from app.services.building.building_service import building_service
from app.services.cocycle.cocycle_service import cocycle_service
from app.services.cubical.cubical_service import cubical_service
from app.services.davis.davis_service import davis_service
from app.services.graph_product.graph_product_service import graph_product_service
from app.services.groups.group_service import group_service
from app.services.holonomy.atlas_service import atlas_service
from app.services.holonomy.holonomy_service import holonomy_service
from app.services.polygonal.polygonal_service import polygonal_service
from app.services.reflections.reflection_service import reflection_service

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

Outcome = tuple[str, str, dict[str, int], dict[str, Any]]


def exit_code_of(verdict: str) -> int:
    return EXIT_OK if verdict == Verdict.PASS.value else EXIT_FAIL


class JobRunner(LoggerMixin):
    """Runs one CLI job and reports its verdict."""

    def __init__(self):
        """Initialize job runner."""
        self.jobs = {
            JobKind.BUILD.value: self.build,
            JobKind.CHECK.value: self.check,
            JobKind.WALLS.value: self.walls,
            JobKind.HOLONOMY.value: self.holonomy,
            JobKind.WITNESS.value: self.witness,
            JobKind.KILL_COCYCLE.value: self.kill_cocycle,
            JobKind.KILL_HOLONOMY.value: self.kill_holonomy,
            JobKind.DAVIS.value: self.davis,
        }

    def run(self, config: JobConfig) -> tuple[Union[Report, str], int]:
        """
        Run a job.

        Returns:
            (report, exit code); the dot job returns DOT text instead of a report.
            Exit code 0 on pass, 1 on fail, 2 on input errors.
        """
        self.logger.info(f"Running job {config.job} on {config.config_path}")
        if config.cap is not None:
            settings.ball_cap = config.cap
        try:
            if config.job == JobKind.DOT.value:
                return self.dot(config), EXIT_OK
            verdict, message, counters, data = self.jobs[config.job](config)
        except RabuildException as e:
            self.logger.error(f"Job {config.job} failed: {e.message}")
            return self._report(config, "error", EXIT_INPUT, e.message, error={
                "type": type(e).__name__, "message": e.message, "details": e.details,
            }), EXIT_INPUT
        code = exit_code_of(verdict)
        self.logger.info(f"Job {config.job} finished: {verdict}")
        return self._report(config, verdict, code, message, counters, data), code

    def _report(
        self,
        config: JobConfig,
        verdict: str,
        code: int,
        message: str,
        counters: Optional[dict[str, int]] = None,
        data: Optional[dict[str, Any]] = None,
        error: Optional[dict[str, Any]] = None,
    ) -> Report:
        return Report(
            app=settings.app_name, version=settings.app_version, job=str(config.job),
            config=config.config_path, radius=config.radius, verdict=verdict, exit_code=code,
            message=message, counters=counters or {}, data=data or {}, error=error,
        )

    # Inputs

    def _require(self, value: Any, field: str) -> Any:
        if value is None:
            raise ConfigurationException(f"Job file needs a '{field}' section", {"field": field})
        return value

    def presentation(self, config: JobConfig) -> ProductPresentation:
        section = self._require(config.file.presentation, "presentation")
        return graph_product_service.presentation_from_config(section.model_dump(exclude_none=True))

    def polygonal_complex(self, config: JobConfig) -> PolygonalComplex:
        section = self._require(config.file.complex, "complex")
        return PolygonalFactory.from_config(section.model_dump(by_alias=True, exclude_none=True))

    def coxeter_data(self, config: JobConfig) -> CoxeterData:
        section = self._require(config.file.coxeter, "coxeter")
        return davis_service.data_from_config(section.model_dump(exclude_none=True))

    def element(self, group_config: dict[str, Any], group: FiniteGroup, value: Union[int, list[int]]) -> int:
        """Element index from an index or, for product groups, coordinates."""
        if isinstance(value, int):
            return value
        if group_config.get("kind") != "product":
            raise ConfigurationException("Coordinates need a product group", {"field": "images"})
        orders = [GroupFactory.from_config(f).order for f in group_config["factors"]]
        if len(value) != len(orders):
            raise ConfigurationException(f"Expected {len(orders)} coordinates, got {len(value)}", {"field": "images"})
        return GroupFactory.product_index(orders, value)

    def quotient_images(self, section: QuotientMapConfig) -> tuple[FiniteGroup, dict[str, int]]:
        try:
            target = GroupFactory.from_config(section.group)
        except (KeyError, ValueError) as e:
            raise ConfigurationException(f"Invalid quotient group: {e}", {"field": "group"})
        images = {key: self.element(section.group, target, value) for key, value in section.images.items()}
        for key, index in images.items():
            if not 0 <= index < target.order:
                raise ConfigurationException(f"Image of {key} is not an element", {"field": f"images.{key}"})
        return target, images

    def subgroup(self, config: JobConfig, p: ProductPresentation) -> tuple[SubgroupData, list[GroupHom]]:
        """Subgroup from the job file; Gamma0 when no quotient is given."""
        section = config.file.subgroup
        if section is None or section.quotient is None:
            hom = graph_product_service.gamma0_hom(p)
        else:
            target, images = self.quotient_images(section.quotient)
            hom = graph_product_service.hom_from_config(p, target, images)
        image = [hom.target.identity] if section is None or section.subgroup is None else section.subgroup
        separators = []
        for s in (section.separators if section else []):
            target, images = self.quotient_images(s)
            separators.append(graph_product_service.hom_from_config(p, target, images))
        return group_service.subgroup_data(hom, image), separators

    def quotient_blocks(self, config: JobConfig, d: CoxeterData) -> BlockComplex:
        section = self._require(config.file.quotient, "quotient")
        target, images = self.quotient_images(section)
        by_index = {}
        for key, value in images.items():
            if key in d.names:
                by_index[d.names.index(key)] = value
            elif key.isdigit() and int(key) < d.size:
                by_index[int(key)] = value
            else:
                raise ConfigurationException(f"Unknown generator {key}", {"field": f"quotient.images.{key}"})
        hom = davis_service.coxeter_hom(d, target, by_index, name="W")
        return davis_service.build_quotient_blocks(d, hom)

    # Jobs

    def build(self, config: JobConfig) -> Outcome:
        p = self.presentation(config)
        ball = building_service.build_ball(p, config.radius)
        cat0 = cubical_service.is_locally_cat0(ball.complex, sorted(ball.interior))
        counters = {
            "chambers": len(ball.chambers),
            "vertices": len(ball.complex.vertex_types),
            "interior_vertices": len(ball.interior),
        }
        data = {
            "cells": {str(dim): n for dim, n in sorted(ball.complex.cell_counts().items())},
            "locally_cat0": cat0.is_locally_cat0,
        }
        if not cat0.is_locally_cat0:
            data["witness"] = {"vertex": str(cat0.vertex), "clique": [str(v) for v in cat0.clique or ()]}
        verdict = Verdict.PASS.value if cat0.is_locally_cat0 else Verdict.FAIL.value
        return verdict, f"ball of radius {config.radius} with {len(ball.chambers)} chambers", counters, data

    def _condition(self, config: JobConfig) -> CurvatureCondition:
        try:
            return CurvatureCondition(config.file.condition.upper())
        except ValueError:
            raise ConfigurationException(
                f"Unknown condition {config.file.condition}", {"field": "condition"}
            )

    def check(self, config: JobConfig) -> Outcome:
        x = self.polygonal_complex(config)
        report = polygonal_service.check_condition(x, self._condition(config), strict=config.strict)
        data = {
            "condition": report.condition.value,
            "strict": report.strict,
            "vertex": None if report.vertex is None else str(report.vertex),
            "cycle": [[str(e), s] for e, s in report.cycle],
            "weights": list(report.weights),
            "total": None if report.total is None else str(report.total),
            "reason": report.reason,
        }
        counters = {"checked_vertices": report.checked_vertices}
        return report.verdict.value, f"{report.condition.value}: {report.verdict.value}", counters, data

    def walls(self, config: JobConfig) -> Outcome:
        x = self.polygonal_complex(config)
        entries = {}
        tree_like = True
        for key, walls in (("walls", polygonal_service.compute_walls(x)), ("ewalls", polygonal_service.compute_ewalls(x))):
            entries[key] = []
            for wall in walls:
                shape = polygonal_service.geometric_wall(x, wall)
                tree_like = tree_like and shape.is_tree_like
                entries[key].append({
                    "members": [[str(e), s] for e, s in wall.members()],
                    "acyclic": shape.acyclic,
                    "max_diameters_per_polygon": max(shape.diameters_per_polygon.values(), default=0),
                    "opposite_free": shape.opposite_free,
                })
        counters = {"walls": len(entries["walls"]), "ewalls": len(entries["ewalls"])}
        verdict = Verdict.PASS.value if tree_like else Verdict.FAIL.value
        return verdict, f"{counters['walls']} walls, {counters['ewalls']} e-walls", counters, entries

    def holonomy(self, config: JobConfig) -> Outcome:
        p = self.presentation(config)
        sub, separators = self.subgroup(config, p)
        if separators:
            killed = holonomy_service.kill_holonomy(p, sub, separators)
            reports, index = list(killed.reports), killed.index
        else:
            reports, index = holonomy_service.holonomy_reports(p, sub), holonomy_service.index(sub)
        nontrivial = [r for r in reports if not r.trivial]
        data = {
            "residues": [
                {"vertex": p.names[r.vertex], "quotient_rep": r.quotient_rep, "image": list(r.image)}
                for r in reports
            ],
        }
        counters = {"residue_orbits": len(reports), "nontrivial": len(nontrivial), "index": index}
        if nontrivial:
            return Verdict.FAIL.value, f"nontrivial at {len(nontrivial)} of {len(reports)} residue orbits", counters, data
        return Verdict.PASS.value, f"trivial at all {len(reports)} residue orbits", counters, data

    def witness(self, config: JobConfig) -> Outcome:
        p = self.presentation(config)
        sub, _ = self.subgroup(config, p)
        try:
            report = atlas_service.commensuration_witness(p, sub, config.radius)
        except (NontrivialHolonomy, WitnessMismatch) as e:
            return Verdict.FAIL.value, e.message, {}, {"details": e.details}
        data = {"entries": [{"generator": str(w.generator), "translation": str(w.translation)} for w in report.entries]}
        counters = {"generators": len(report.entries), "checked_chambers": report.checked_chambers}
        return Verdict.PASS.value, f"{len(report.entries)} generators conjugate into the group", counters, data

    def kill_cocycle(self, config: JobConfig) -> Outcome:
        x = self.polygonal_complex(config)
        section = self._require(config.file.cocycle, "cocycle")
        coefficients = FiniteAbelian(torsion=tuple(section.coefficients))
        unknown = [p for p in section.values if p not in x.polygons]
        if unknown:
            raise ConfigurationException(f"Unknown polygon {unknown[0]}", {"field": f"cocycle.values.{unknown[0]}"})
        c = cocycle_service.cocycle(coefficients, section.values)
        if config.file.cover is None:
            cover = cocycle_service.trivial_cover(x)
        else:
            group = GroupFactory.from_config(config.file.cover.group)
            cover = cocycle_service.build_cover(x, group, config.file.cover.voltages)
        report = cocycle_service.kill_in_cover(cover, c)
        extension = cocycle_service.extension_report(report)
        data = {
            "method": report.method.value,
            "extension": extension.verdict.value,
            "obstructions": [[str(oe) for oe in o] for o in report.obstructions],
        }
        if report.certificate is not None:
            data["certificate"] = {
                str(e): list(a) for e, a in sorted(report.certificate.values.items(), key=lambda item: str(item[0]))
                if not coefficients.is_zero(a)
            }
        counters = {"degree": report.degree, "index": extension.index}
        verdict = Verdict.PASS.value if report.success else Verdict.FAIL.value
        return verdict, f"kill in cover of degree {report.degree}: {report.method.value}", counters, data

    def davis(self, config: JobConfig) -> Outcome:
        d = self.coxeter_data(config)
        ball = davis_service.build_davis_ball(d, config.radius)
        curvature = polygonal_service.check_condition(
            ball.x, CurvatureCondition.C2, strict=config.strict, vertices=sorted(ball.interior_blocks),
        )
        counters = {
            "blocks": len(ball.blocks),
            "rank1": len(ball.edge_types),
            "polygons": len(ball.x.polygons),
            "boundary_polygons": len(ball.boundary_polygons),
            "interior_blocks": len(ball.interior_blocks),
        }
        c4 = davis_service.c4_triple_witness(d)
        data: dict[str, Any] = {
            "c2_interior": curvature.verdict.value,
            "c4_triple": None if c4 is None else [d.names[i] for i in c4],
            "automorphisms": len(davis_service.automorphisms(d)),
        }
        if config.emit == "x":
            data["x"] = self.complex_config(ball.x, d)
        return curvature.verdict.value, f"Davis ball of radius {config.radius}", counters, data

    def complex_config(self, x: PolygonalComplex, d: CoxeterData) -> dict[str, Any]:
        """X as a polygonal complex job section, with readable ids."""
        def block(b: tuple[int, ...]) -> str:
            return d.name_of(b)

        def edge(e: tuple[tuple[int, ...], int]) -> str:
            return f"{block(e[0])}|{d.names[e[1]]}"

        return {
            "name": x.name,
            "vertices": [block(b) for b in x.vertices],
            "edges": [
                {"id": edge(e), "from": block(x.edges[e].tail), "to": block(x.edges[e].head)}
                for e in sorted(x.edges)
            ],
            "polygons": [
                {
                    "id": f"{block(pid[0])}|{d.names[pid[1][0]]}{d.names[pid[1][1]]}",
                    "cycle": [[edge(e), s] for e, s in x.polygons[pid].cycle],
                }
                for pid in x.polygon_ids()
            ],
        }

    def initial_system(self, config: JobConfig, quotient: BlockComplex) -> LRSystem:
        section = config.file.system
        standard = reflection_service.sigma_w(quotient)
        if section is not None and section.values:
            return reflection_service.system_from_config(quotient, section.model_dump())
        types = None if section is None else section.field_types
        f = reflection_service.random_symmetric_field(quotient, standard, random.Random(config.seed), types)
        return reflection_service.apply_field(quotient, standard, f)

    def kill_holonomy(self, config: JobConfig) -> Outcome:
        d = self.coxeter_data(config)
        quotient = self.quotient_blocks(config, d)
        sigma = self.initial_system(config, quotient)
        initial = len(reflection_service.nontrivial_holonomy(quotient, sigma))
        report = reflection_service.kill_holonomy_iteration(quotient, sigma)
        counters = {
            "blocks": len(quotient.blocks),
            "polygons": len(quotient.x.polygons),
            "initial_holonomy": initial,
            "walls_used": len(report.steps),
            "obstructions": len(report.obstructions),
            "residual_holonomy": len(report.residual),
        }
        data: dict[str, Any] = {"holonomy_free": report.holonomy_free}
        if report.holonomy_free and config.radius > 0:
            ball = davis_service.build_davis_ball(d, config.radius)
            pulled = reflection_service.pullback(ball, quotient, report.system)
            extension = reflection_service.extend_system_germ(
                ball, pulled, reflection_service.sigma_w(ball), tuple(d.vertices),
            )
            counters["extended_blocks"] = len(extension.images)
            counters["closed_loops"] = extension.closed_loops
        verdict = Verdict.PASS.value if report.holonomy_free else Verdict.FAIL.value
        return verdict, f"{len(report.residual)} triangles keep holonomy", counters, data

    def dot(self, config: JobConfig) -> str:
        section = self._require(config.file.dot, "dot")
        kind = DotObject(section.object)
        if kind == DotObject.LINK:
            x = self.polygonal_complex(config)
            if section.vertex not in x.vertices:
                raise ConfigurationException(f"Unknown vertex {section.vertex}", {"field": "dot.vertex"})
            return link_graph_dot(polygonal_service.link_graph(x, section.vertex))
        if kind == DotObject.CHAMBERS:
            p = self.presentation(config)
            return chamber_graph_dot(building_service.chamber_graph(p, config.radius))
        if kind == DotObject.WALL:
            x = self.polygonal_complex(config)
            walls = polygonal_service.compute_ewalls(x) if section.even else polygonal_service.compute_walls(x)
            if walls and section.wall >= len(walls):
                raise ConfigurationException(f"No wall with index {section.wall}", {"field": "dot.wall"})
            return wall_dot(x, walls[section.wall] if walls else None)
        d = self.coxeter_data(config)
        ball = davis_service.build_davis_ball(d, config.radius)
        return block_graph_dot(davis_service.chamber_graph(ball), d.names)


# Singleton instance
job_runner = JobRunner()
