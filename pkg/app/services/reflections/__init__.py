"""Local reflection systems service module."""
from app.services.reflections.reflection_service import ReflectionService, reflection_service

__all__ = ["ReflectionService", "reflection_service"]
