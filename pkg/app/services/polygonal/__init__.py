"""Polygonal complex service module."""
from app.services.polygonal.polygonal_service import PolygonalService, polygonal_service

__all__ = ["PolygonalService", "polygonal_service"]
