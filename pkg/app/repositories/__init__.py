"""Repository layer for job files and reports."""
from app.repositories.config_repository import ConfigRepository, config_repository

__all__ = ["ConfigRepository", "config_repository"]
