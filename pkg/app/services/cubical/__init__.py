"""Simplicial and cubical complex service module."""
from app.services.cubical.cubical_service import CubicalService, cubical_service

__all__ = ["CubicalService", "cubical_service"]
