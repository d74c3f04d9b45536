"""Schemas for job files and reports."""
from app.schemas.config import (
    CocycleConfig,
    CoverConfig,
    CoxeterConfig,
    DotConfig,
    DotObject,
    JobConfig,
    JobFile,
    JobKind,
    PolygonalComplexConfig,
    PresentationConfig,
    QuotientMapConfig,
    SubgroupConfig,
    SystemConfig,
)
from app.schemas.report import Report

__all__ = [
    "CocycleConfig",
    "CoverConfig",
    "CoxeterConfig",
    "DotConfig",
    "DotObject",
    "JobConfig",
    "JobFile",
    "JobKind",
    "PolygonalComplexConfig",
    "PresentationConfig",
    "QuotientMapConfig",
    "SubgroupConfig",
    "SystemConfig",
    "Report",
]
