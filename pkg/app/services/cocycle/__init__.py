"""Cocycle service module."""
from app.services.cocycle.cocycle_service import CocycleService, cocycle_service

__all__ = ["CocycleService", "cocycle_service"]
