"""
Command registration for the CLI.

Feature packages declare their subcommands on a CommandRouter, the way
HTTP routers declare endpoints; app.main mounts every router on one parser.
"""
import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import DomainError
from app.schemas.common import Report
from app.schemas.lfunctions import ShiftSpec
from app.utils.reports import RowCheck
from app.utils.validators import parse_float_list

Handler = Callable[[argparse.Namespace], Report]


class Argument:
    """Positional and keyword arguments of one argparse `add_argument` call."""

    def __init__(self, *flags: str, **kwargs: Any):
        self.flags = flags
        self.kwargs = kwargs


@dataclass
class Command:
    """One subcommand."""
    name: str
    handler: Handler
    help: str
    arguments: Tuple[Argument, ...] = ()
    verify: Optional[RowCheck] = None
    verify_from: Optional[Callable[[argparse.Namespace], RowCheck]] = None

    def row_check(self, args: argparse.Namespace) -> Optional[RowCheck]:
        """Row invariants of --verify, built from the parsed flags when they depend on them."""
        if self.verify_from is not None:
            return self.verify_from(args)
        return self.verify


@dataclass
class CommandRouter:
    """A group of subcommands belonging to one feature."""
    tags: List[str] = field(default_factory=list)
    commands: Dict[str, Command] = field(default_factory=dict)

    def command(self, name: str, help: str, arguments: Tuple[Argument, ...] = (),
                verify: Optional[RowCheck] = None,
                verify_from: Optional[Callable[[argparse.Namespace], RowCheck]] = None,
                ) -> Callable[[Handler], Handler]:
        """
        Register a handler as a subcommand.

        Args:
            name: Subcommand name
            help: One-line description
            arguments: Flags of the subcommand
            verify: Row invariants re-checked by --verify
            verify_from: Builds the row invariants from the parsed flags instead
        """
        def decorator(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"duplicate command {name}")
            self.commands[name] = Command(name=name, handler=handler, help=help,
                                          arguments=tuple(arguments), verify=verify,
                                          verify_from=verify_from)
            return handler
        return decorator


# Shared flags of the commands that take shifts
SHIFT_ARGUMENTS = (
    Argument("--t", required=True, help="Comma-separated shifts t_1..t_k"),
    Argument("--a", default=None, help="Comma-separated exponents a_1..a_k (default all 1)"),
    Argument("--A", dest="bound_exponent", type=float, default=1.0, help="Exponent A in |t_j| <= q^A"),
)


def shift_spec_from(args: argparse.Namespace) -> ShiftSpec:
    """
    Build the ShiftSpec of a command from --t, --a and --A.

    Raises:
        DomainError: If lengths differ, an exponent is not positive or a shift exceeds MAX_SHIFT
    """
    t = parse_float_list(args.t, "t")
    a = parse_float_list(args.a, "a") if args.a is not None else tuple(1.0 for _ in t)
    if any(abs(x) > settings.MAX_SHIFT for x in t):
        raise DomainError(f"--t: shifts must satisfy |t| <= {settings.MAX_SHIFT:g}", field="t")
    try:
        return ShiftSpec(t=t, a=a, bound_exponent=args.bound_exponent)
    except ValidationError as exc:
        raise DomainError(f"invalid shifts/exponents: {exc.errors()[0]['msg']}", field="t")
