"""Holonomy and atlas service module."""
from app.services.holonomy.holonomy_service import HolonomyService, holonomy_service
from app.services.holonomy.atlas_service import AtlasService, atlas_service

__all__ = ["HolonomyService", "holonomy_service", "AtlasService", "atlas_service"]
