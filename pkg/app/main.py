"""
Command-line entry point.

    python -m app.main <job> --config job.json [--radius r] [--cap n]
                       [--out path] [--seed s] [--strict] [--emit x]

Reports go to --out or stdout; logs go to stderr.
"""
import argparse
import sys
from typing import Optional, Sequence

from app.cli.runner import EXIT_INPUT, job_runner
from app.core.config import settings
from app.core.exceptions import ConfigurationException
from app.core.logging import get_logger, setup_logging
from app.repositories.config_repository import config_repository
from app.schemas.config import JobConfig, JobKind
from app.schemas.report import Report

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Right-angled buildings, Davis complexes, holonomy and wall solvers",
    )
    parser.add_argument("job", choices=[kind.value for kind in JobKind])
    parser.add_argument("--config", required=True, help="JSON job file")
    parser.add_argument("--radius", type=int, default=None, help=f"Ball radius (default {settings.default_radius})")
    parser.add_argument("--cap", type=int, default=None, help="Element cap for balls")
    parser.add_argument("--out", default=None, help="Output path (stdout by default)")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized choices")
    parser.add_argument("--strict", action="store_true", help="Primed (strict) curvature conditions")
    parser.add_argument("--emit", choices=["x"], default=None, help="Include the polygonal complex X in davis reports")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(sys.stderr)
    radius = settings.default_radius if args.radius is None else args.radius
    seed = settings.random_seed if args.seed is None else args.seed

    try:
        if radius < 0:
            raise ConfigurationException("Radius must be non-negative", {"field": "radius"})
        job_file = config_repository.load_job_file(args.config)
    except ConfigurationException as e:
        logger.error(e.message)
        report = Report(
            app=settings.app_name, version=settings.app_version, job=args.job, config=args.config,
            radius=radius, verdict="error", exit_code=EXIT_INPUT, message=e.message,
            error={"type": type(e).__name__, "message": e.message, "details": e.details},
        )
        config_repository.save_report(report, args.out)
        return EXIT_INPUT

    config = JobConfig(
        job=args.job, config_path=args.config, file=job_file, radius=radius, cap=args.cap,
        seed=seed, strict=args.strict, emit=args.emit, out=args.out,
    )
    result, code = job_runner.run(config)
    if isinstance(result, str):
        config_repository.write_text(result, args.out)
    else:
        config_repository.save_report(result, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
