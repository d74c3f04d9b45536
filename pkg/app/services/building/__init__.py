"""Building service module."""
from app.services.building.building_service import BuildingService, building_service

__all__ = ["BuildingService", "building_service"]
