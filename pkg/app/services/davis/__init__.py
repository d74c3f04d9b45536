"""Davis complex service module."""
from app.services.davis.davis_service import DavisService, davis_service

__all__ = ["DavisService", "davis_service"]
