"""Report schema written by every CLI job."""
from typing import Any, Optional
from pydantic import BaseModel, Field


class Report(BaseModel):
    """Machine-readable job outcome; keys are written in declaration order."""
    app: str
    version: str
    job: str
    config: str
    radius: Optional[int] = None
    verdict: str = Field(..., description="pass, fail, unverified or error")
    exit_code: int
    message: str = ""
    counters: dict[str, int] = Field(default_factory=dict)
    data: dict[str, Any] = Field(default_factory=dict)
    error: Optional[dict[str, Any]] = None
