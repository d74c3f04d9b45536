"""Job runner and DOT export for the command line."""
from app.cli.runner import JobRunner, job_runner

__all__ = ["JobRunner", "job_runner"]
