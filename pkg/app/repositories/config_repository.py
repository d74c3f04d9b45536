"""Repository for job files and reports on disk."""
import json
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from app.core.exceptions import ConfigurationException
from app.core.logging import LoggerMixin
from app.schemas.config import JobFile
from app.schemas.report import Report


def field_of(error: ValidationError) -> str:
    """Dotted location of the first validation error."""
    first = error.errors()[0]
    return ".".join(str(part) for part in first.get("loc", ())) or "<root>"


class ConfigRepository(LoggerMixin):
    """Load JSON job files and write JSON reports or DOT text."""

    def load_json(self, path: str) -> Any:
        """
        Read a JSON document.

        Raises:
            ConfigurationException: If the file is missing or not valid JSON
        """
        file = Path(path)
        if not file.is_file():
            raise ConfigurationException(f"Config file not found: {path}", {"field": "config"})
        try:
            return json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationException(
                f"Config file {path} is not valid JSON: {e.msg} at line {e.lineno}", {"field": "config"}
            )

    def load_job_file(self, path: str) -> JobFile:
        """
        Parse a job file.

        Raises:
            ConfigurationException: Naming the offending field
        """
        data = self.load_json(path)
        try:
            job_file = JobFile.model_validate(data)
        except ValidationError as e:
            field = field_of(e)
            raise ConfigurationException(
                f"Invalid job file {path}: {field}: {e.errors()[0]['msg']}", {"field": field}
            )
        self.logger.debug(f"Loaded job file {path}")
        return job_file

    def report_json(self, report: Report) -> str:
        return json.dumps(report.model_dump(mode="json"), indent=2, default=str) + "\n"

    def write_text(self, text: str, out: Optional[str] = None) -> None:
        """Write to the given path, or to stdout when none is given."""
        if out is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        self.logger.info(f"Wrote {len(text)} bytes to {out}")

    def save_report(self, report: Report, out: Optional[str] = None) -> None:
        self.write_text(self.report_json(report), out)


# Singleton instance
config_repository = ConfigRepository()
