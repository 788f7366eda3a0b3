"""
Dirichlet Moments Lab - command-line entry point.

Numerical lab for shifted moments of Dirichlet L-functions: every subcommand
computes one report (CSV, JSON or text) from the feature routers below.
"""
import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.core.commands import Command, CommandRouter
from app.core.config import Settings, settings
from app.core.constants import OutputFormat
from app.core.exceptions import EXIT_OK, CheckFailedError, DomainError
from app.middleware.error_handler import handle_exception
from app.schemas.common import Report, ReportMeta
from app.utils.reports import render, verify_report, write_report

# Import routers
from app.features.characters.router import router as characters_router
from app.features.lfunctions.router import router as lfunctions_router
from app.features.polynomials.router import router as polynomials_router
from app.features.moments.router import router as moments_router

logger = logging.getLogger(__name__)

PROG = "dlm"

ROUTERS: List[CommandRouter] = [
    characters_router,
    lfunctions_router,
    polynomials_router,
    moments_router,
]

# Global flag -> settings field
OVERRIDES: Dict[str, str] = {
    "threads": "THREADS",
    "cost_cap": "MAX_MOMENT_MODULUS",
    "cutoff_eps": "AFE_CUTOFF_EPS",
    "em_shift": "EM_SHIFT",
    "bernoulli_terms": "EM_BERNOULLI_TERMS",
    "weight_abscissa": "WEIGHT_ABSCISSA",
    "weight_step": "WEIGHT_STEP",
    "weight_height": "WEIGHT_HEIGHT",
    "tolerance": "CHECK_TOLERANCE",
}


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises DomainError instead of exiting on bad input."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise DomainError(f"{self.prog}: {message}", field="argv")


def configure_logging(level: str) -> None:
    """Log to stderr (reports own stdout), plus LOG_FILE when configured."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=logging.DEBUG if settings.DEBUG else getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )


def _common_parser() -> argparse.ArgumentParser:
    common = LabArgumentParser(add_help=False)
    output = common.add_argument_group("output")
    output.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    output.add_argument("--out", default=None, help="Report path (default: stdout)")
    output.add_argument("--verify", action="store_true", help="Re-read the report and re-check its rows")
    output.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    caps = common.add_argument_group("caps and tolerances")
    caps.add_argument("--threads", type=int, default=None, help="Worker processes (overrides DLM_THREADS)")
    caps.add_argument("--cost-cap", type=int, default=None, help="Largest modulus of a moment computation")
    caps.add_argument("--cutoff-eps", type=float, default=None, help="AFE weight cutoff")
    caps.add_argument("--em-shift", type=int, default=None, help="Euler-Maclaurin shift N")
    caps.add_argument("--bernoulli-terms", type=int, default=None, help="Euler-Maclaurin Bernoulli terms")
    caps.add_argument("--weight-abscissa", type=float, default=None, help="Contour abscissa of the AFE weight")
    caps.add_argument("--weight-step", type=float, default=None, help="Quadrature step of the AFE weight")
    caps.add_argument("--weight-height", type=float, default=None, help="Truncation height of the AFE weight")
    caps.add_argument("--tolerance", type=float, default=None, help="Tolerance of the check suites")
    return common


def build_parser() -> argparse.ArgumentParser:
    """The top-level parser with one subparser per registered command."""
    parser = LabArgumentParser(prog=PROG, allow_abbrev=False,
                               description=f"{settings.APP_NAME} v{settings.APP_VERSION}")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_parser()
    for router in ROUTERS:
        for command in router.commands.values():
            sub = subparsers.add_parser(command.name, help=command.help, description=command.help,
                                         parents=[common], allow_abbrev=False)
            for argument in command.arguments:
                sub.add_argument(*argument.flags, **argument.kwargs)
            sub.set_defaults(_command=command)
    return parser


def apply_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Copy the global cap/tolerance flags into settings.

    Values pass the same validators as environment configuration.

    Raises:
        DomainError: If an override fails validation
    """
    overrides = {
        field: getattr(args, flag) for flag, field in OVERRIDES.items() if getattr(args, flag, None) is not None
    }
    if not overrides:
        return {}
    try:
        validated = Settings(**overrides)
    except ValidationError as exc:
        error = exc.errors()[0]
        raise DomainError(f"invalid override {error['loc'][0]}: {error['msg']}", field=str(error["loc"][0]))
    for field in overrides:
        setattr(settings, field, getattr(validated, field))
    logger.debug(f"Settings overrides: {overrides}")
    return overrides


def run(command: Command, args: argparse.Namespace, argv: List[str]) -> Report:
    """
    Compute, render, write and optionally verify one report.

    Raises:
        CheckFailedError: If verification fails or the report carries failed checks
    """
    started = time.perf_counter()
    report = command.handler(args)
    elapsed = time.perf_counter() - started
    logger.info(f"{command.name}: {len(report.rows)} rows in {elapsed:.2f}s")

    fmt = OutputFormat(args.format)
    meta = ReportMeta(version=settings.APP_VERSION, invocation=[PROG, *argv],
                      timing={"compute": elapsed}, notes=report.notes)
    text = render(report, fmt, meta)
    write_report(text, args.out)

    if args.verify:
        written = Path(args.out).read_text(encoding="utf-8") if args.out else text
        verify_report(written, fmt, report, command.row_check(args), source=args.out or "stdout")

    if report.failed_checks:
        for failure in report.failed_checks:
            logger.error(f"{command.name}: {failure}")
        raise CheckFailedError(command.name, f"{len(report.failed_checks)} check(s) failed",
                               details={"failures": report.failed_checks[:20]})
    return report


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the lab on a command line.

    Returns:
        0 on success, 1 on domain error, 2 on resource error, 3 on a failed check
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    configure_logging(settings.LOG_LEVEL)
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            configure_logging(args.log_level)
        apply_overrides(args)
        run(args._command, args, argv)
        return EXIT_OK
    except Exception as exc:
        return handle_exception(exc)


if __name__ == "__main__":
    sys.exit(main())
