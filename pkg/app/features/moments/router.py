"""
Moment commands: moment, sweep, proof-split, powerest.
"""
import argparse
import logging
import math
from typing import Any, Dict, List, Optional

from app.core.commands import SHIFT_ARGUMENTS, Argument, CommandRouter, shift_spec_from
from app.core.constants import HOLDER_SLACK
from app.core.exceptions import DomainError
from app.features.characters.group import character_group
from app.features.moments.service import (
    NO_PRIMITIVE_REASON,
    MomentService,
    growth_exponent,
    power_moment,
    proof_split,
)
from app.features.polynomials.mollifier import mollifier_schedule
from app.features.polynomials.primes import prime_table
from app.schemas.common import Report
from app.schemas.moments import MomentReport
from app.utils.formatters import csv_columns, flatten_row
from app.utils.validators import parse_int_list, parse_moduli

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Moments"])

SWEEP_COLUMNS = ["q", "phi", "phi_star", "moment", "main_term", "ratio"]


def _moment_row(report: MomentReport) -> Dict[str, Any]:
    return {c: getattr(report, c) for c in SWEEP_COLUMNS}


def _check_moment_rows(rows: List[Dict[str, Any]]) -> List[str]:
    failures = []
    for row in rows:
        if row["moment"] < 0:
            failures.append(f"q={row['q']}: negative moment {row['moment']}")
        if not row["main_term"] > 0:
            failures.append(f"q={row['q']}: main term {row['main_term']} not positive")
        elif row["phi_star"] and not math.isclose(row["ratio"], row["moment"] / row["main_term"], rel_tol=1e-12):
            failures.append(f"q={row['q']}: ratio {row['ratio']} is not moment / main term")
    return failures


@router.command(
    "moment",
    help="Shifted moment over primitive characters against the predicted main term",
    arguments=(
        Argument("--q", required=True, type=int, help="Modulus"),
        *SHIFT_ARGUMENTS,
        Argument("--split", action="store_true", help="Also compute the Hoelder split over the good set"),
        Argument("--delta", type=float, default=None, help="Schedule exponent of the split"),
    ),
    verify=_check_moment_rows,
)
def moment(args: argparse.Namespace) -> Report:
    """M_{t,a}(q), the main term and their ratio."""
    spec = shift_spec_from(args)
    report = MomentService(threads=args.threads).moment_report(args.q, spec, delta=args.delta, split=args.split)
    row = _moment_row(report)
    columns = list(SWEEP_COLUMNS)
    if report.split is not None:
        row.update(_split_fields(report.split.model_dump()))
        columns = csv_columns([row], SWEEP_COLUMNS)
    notes = []
    if report.skipped_reason:
        notes.append(f"moment is zero: {report.skipped_reason}")
    return Report(command="moment", columns=columns, rows=[row], summary={"elapsed": report.elapsed},
                  notes=notes, failed_checks=_check_moment_rows([row]))


@router.command(
    "sweep",
    help="Moment ratios over a list of moduli",
    arguments=(
        Argument("--moduli", required=True, help="Modulus list, e.g. prime:101..499"),
        *SHIFT_ARGUMENTS,
    ),
    verify=_check_moment_rows,
)
def sweep(args: argparse.Namespace) -> Report:
    """One row per modulus with primitive characters; the ratio window goes to the summary."""
    spec = shift_spec_from(args)
    reports, summary = MomentService(threads=args.threads).moment_sweep(parse_moduli(args.moduli), spec)
    rows = [_moment_row(r) for r in reports if r.skipped_reason is None]
    notes = [f"q={q} skipped: {NO_PRIMITIVE_REASON}" for q in summary.skipped]
    return Report(command="sweep", columns=list(SWEEP_COLUMNS), rows=rows,
                  summary=summary.model_dump(exclude={"skipped"}), notes=notes,
                  failed_checks=_check_moment_rows(rows))


def _split_fields(split: Dict[str, Any]) -> Dict[str, Any]:
    holder = split.pop("holder")
    fields = flatten_row(split)
    fields.pop("q", None)
    fields["u"], fields["v"] = holder["u"], holder["v"]
    for m, r in enumerate(holder["r"], start=1):
        fields[f"r_{m}"] = r
    return fields


def _check_split_rows(rows: List[Dict[str, Any]]) -> List[str]:
    return [
        f"q={row['q']}: Hoelder residual {row['holder_residual']} below -{HOLDER_SLACK:g} x rhs"
        for row in rows
        if row["holder_residual"] < -HOLDER_SLACK * max(row["holder_rhs"], 1.0)
    ]


def _max_growth(q: int, shifts) -> Optional[float]:
    exponents = [
        growth_exponent(chi, t)
        for chi in character_group(q) if chi.is_primitive
        for t in sorted(set(shifts))
    ]
    return max(exponents) if exponents else None


@router.command(
    "proof-split",
    help="S_0, J and S_m over the good set with the Hoelder residual",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list (q >= 100)"),
        *SHIFT_ARGUMENTS,
        Argument("--delta", type=float, default=None, help="Schedule exponent delta in (0, 1)"),
        Argument("--log-delta", type=float, default=None, help="log delta, for delta below double range"),
        Argument("--no-telescope", action="store_true", help="Skip the telescoped S_0 sums"),
    ),
    verify=_check_split_rows,
)
def proof_split_command(args: argparse.Namespace) -> Report:
    """Hoelder decomposition of the moment, one row per modulus."""
    spec = shift_spec_from(args)
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        if args.log_delta is not None:
            sched = mollifier_schedule(q, spec=spec, log_delta=args.log_delta)
        else:
            sched = mollifier_schedule(q, delta=args.delta, spec=spec)
        split = proof_split(q, spec, sched, telescope=not args.no_telescope)
        row = {"q": q, **_split_fields(split.model_dump())}
        row["max_growth_exponent"] = _max_growth(q, spec.t)
        rows.append(row)
    preferred = ["q", "R", "members", "primitive_count", "moment", "holder_rhs", "holder_residual"]
    return Report(command="proof-split", columns=csv_columns(rows, preferred), rows=rows,
                  failed_checks=_check_split_rows(rows))


def _twist_coefficients(x: float, twist: Optional[float]) -> Optional[Dict[int, complex]]:
    if twist is None:
        return None
    primes = prime_table(int(math.floor(x))).primes
    return {int(p): complex(math.cos(twist * math.log(p)), -math.sin(twist * math.log(p))) for p in primes}


@router.command(
    "powerest",
    help="2k-th power moment of a prime polynomial against phi(q) k! (sum |a(p)|^2/p)^k",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list"),
        Argument("--x", required=True, type=float, help="Prime bound, x^k <= q / log q"),
        Argument("--k", default="1", help="Comma-separated moment orders"),
        Argument("--twist", type=float, default=None, help="Use a(p) = p^{-i twist} instead of a(p) = 1"),
    ),
)
def powerest(args: argparse.Namespace) -> Report:
    """Power-moment ratios; the implied constant is recorded, not asserted."""
    ks = parse_int_list(args.k, "k")
    if args.x < 2:
        raise DomainError(f"--x must be >= 2, got {args.x}", field="x")
    coeffs = _twist_coefficients(args.x, args.twist)
    rows = [
        power_moment(q, args.x, coeffs, k).model_dump()
        for q in parse_moduli(args.q)
        for k in ks
    ]
    summary = {"max_ratio": max(r["ratio"] for r in rows)}
    return Report(command="powerest", columns=["q", "x", "k", "lhs", "rhs", "ratio"], rows=rows, summary=summary)
