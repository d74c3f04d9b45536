"""Finite group service module."""
from app.services.groups.group_service import GroupService, group_service

__all__ = ["GroupService", "group_service"]
