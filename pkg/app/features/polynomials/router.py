"""
Dirichlet-polynomial commands: prime-sums, surrogate, schedule, mollifier-check.
"""
import argparse
import logging
import math
from typing import Any, Dict, List

from app.core.commands import SHIFT_ARGUMENTS, Argument, CommandRouter, shift_spec_from
from app.core.config import settings
from app.core.constants import MEISSEL_MERTENS, PrimeSumKind, SurrogateVariant
from app.core.exceptions import DomainError
from app.features.characters.group import character_group
from app.features.polynomials.mollifier import mollifier_schedule
from app.features.polynomials.primes import cosine_sums, meissel_mertens_constant, prime_sum
from app.features.polynomials.service import MollifierCheckService
from app.features.polynomials.surrogate import pit_ratio, surrogate_gap_census
from app.schemas.common import Report
from app.schemas.lfunctions import ShiftSpec
from app.utils.formatters import flatten_row
from app.utils.validators import parse_float_list, parse_moduli

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Dirichlet polynomials"])


def _delta_arguments(args: argparse.Namespace) -> Dict[str, Any]:
    if args.log_delta is not None:
        return {"log_delta": args.log_delta}
    return {"delta": args.delta if args.delta is not None else settings.MOLLIFIER_DELTA}


DELTA_ARGUMENTS = (
    Argument("--delta", type=float, default=None, help="Schedule exponent delta in (0, 1)"),
    Argument("--log-delta", type=float, default=None, help="log delta, for delta below double range"),
)


def _check_prime_sum_rows(bound: float):
    def check(rows: List[Dict[str, Any]]) -> List[str]:
        return [
            f"cosine x={row['x']} alpha={row['alpha']}: |residual| = {abs(row['residual'])} above {bound}"
            for row in rows
            if row["kind"] == PrimeSumKind.COSINE.value and not abs(row["residual"]) <= bound
        ]
    return check


@router.command(
    "prime-sums",
    help="Mertens-type prime sums against their main terms",
    arguments=(
        Argument("--kind", default="all", choices=["all"] + [k.value for k in PrimeSumKind]),
        Argument("--x", default="1e3,1e4,1e5,1e6", help="Comma-separated bounds x"),
        Argument("--alpha", default="0", help="Comma-separated frequencies of the cosine sum"),
        Argument("--bound", type=float, default=5.0, help="Bound on |cosine residual|"),
        Argument("--mertens", action="store_true", help="Also estimate the Meissel-Mertens constant"),
        Argument("--mertens-limit", type=float, default=1e8, help="Sieve limit of the constant estimate"),
    ),
    verify_from=lambda args: _check_prime_sum_rows(args.bound),
)
def prime_sums(args: argparse.Namespace) -> Report:
    """Direct prime sums with residuals; the cosine residual is held to --bound."""
    kinds = list(PrimeSumKind) if args.kind == "all" else [PrimeSumKind(args.kind)]
    xs = parse_float_list(args.x, "x")
    alphas = parse_float_list(args.alpha, "alpha")
    rows: List[Dict[str, Any]] = []
    for kind in kinds:
        results = cosine_sums(xs, alphas) if kind == PrimeSumKind.COSINE else [prime_sum(kind, x) for x in xs]
        rows.extend(flatten_row(result.model_dump()) for result in results)
    cosine = [abs(r["residual"]) for r in rows if r["kind"] == PrimeSumKind.COSINE]
    summary: Dict[str, Any] = {}
    if cosine:
        summary["max_abs_cosine_residual"] = max(cosine)
    if args.mertens:
        limit = int(args.mertens_limit)
        estimate = meissel_mertens_constant(limit)
        summary["meissel_mertens_estimate"] = estimate
        summary["meissel_mertens_limit"] = limit
        summary["meissel_mertens_error"] = estimate - MEISSEL_MERTENS
    failed = _check_prime_sum_rows(args.bound)(rows)
    columns = ["kind", "x", "alpha", "value", "main_term", "residual"]
    return Report(command="prime-sums", columns=columns, rows=rows, summary=summary, failed_checks=failed)


@router.command(
    "surrogate",
    help="Gap between the log|L| surrogate and the actual sum of log|L| over primitive characters",
    arguments=(
        Argument("--q", required=True, type=int, help="Modulus"),
        *SHIFT_ARGUMENTS,
        Argument("--x", type=float, default=None, help="Prime-sum length (default q^{1/2})"),
        Argument("--variant", choices=[v.value for v in SurrogateVariant], default=SurrogateVariant.GENERAL.value),
        Argument("--pit-x", type=float, default=None, help="Also record the prime-sum ratio at this length"),
    ),
)
def surrogate(args: argparse.Namespace) -> Report:
    """Surrogate gap census; the gap is recorded as a distribution, never asserted."""
    spec = shift_spec_from(args)
    x = args.x if args.x is not None else math.sqrt(args.q)
    census = surrogate_gap_census(args.q, spec, x, SurrogateVariant(args.variant))
    rows = [flatten_row(row.model_dump()) for row in census.rows]
    summary: Dict[str, Any] = census.model_dump(exclude={"rows", "q", "x"})
    if args.pit_x is not None:
        group = character_group(args.q)
        ratios = [pit_ratio(chi, args.pit_x, spec.t[0]) for chi in group if chi.is_primitive]
        summary["max_pit_ratio"] = max(ratios)
    columns = ["q", "index", "x", "surrogate", "log_l_sum", "gap"]
    return Report(command="surrogate", columns=columns, rows=rows, summary=summary)


def _check_schedule_rows(rows: List[Dict[str, Any]]) -> List[str]:
    failures = []
    for row in rows:
        if row["R"] < 0:
            failures.append(f"q={row['q']}: negative R")
        if row["R"] >= 1 and not row["c_1"] <= math.exp(row["log_delta"]) * (1 + 1e-12):
            failures.append(f"q={row['q']}: c_1 = {row['c_1']} above delta with R = {row['R']}")
    return failures


@router.command(
    "schedule",
    help="Mollifier scales c_j, P_j, K_j, D_j and R",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list"),
        *DELTA_ARGUMENTS,
        Argument("--a", default="1,1", help="Comma-separated exponents (only a* is used)"),
    ),
    verify=_check_schedule_rows,
)
def schedule(args: argparse.Namespace) -> Report:
    """One row per modulus describing the first scale."""
    a = parse_float_list(args.a, "a")
    if not all(v > 0 for v in a):
        raise DomainError("--a: exponents must be positive", field="a")
    spec = ShiftSpec(t=tuple(0.0 for _ in a), a=a)
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        sched = mollifier_schedule(q, spec=spec, **_delta_arguments(args))
        rows.append({
            "q": q,
            "R": sched.R,
            "log_delta": sched.log_delta,
            "loglog_sq": sched.loglog_sq,
            "c_1": sched.c[1],
            "P_1": sched.P(1),
            "K_1": sched.K[0] if sched.R else None,
            "D_1": sched.degree(1) if sched.R else None,
            "theoretical": sched.theoretical_regime,
        })
    columns = ["q", "R", "log_delta", "loglog_sq", "c_1", "P_1", "K_1", "D_1", "theoretical"]
    notes = []
    if any(row["theoretical"] for row in rows):
        notes.append("delta is in the asymptotic regime: R = 0 at every feasible modulus")
    return Report(command="schedule", columns=columns, rows=rows, notes=notes,
                  failed_checks=_check_schedule_rows(rows))


def _check_mollifier_rows(rows: List[Dict[str, Any]]) -> List[str]:
    return [
        f"{row['check']}: worst {row['worst']} above {row['bound']}"
        for row in rows if not row["passed"] or not row["worst"] <= row["bound"]
    ]


@router.command(
    "mollifier-check",
    help="Truncation, coefficient, majorant, duality and conjugation checks of the mollifier",
    arguments=(
        Argument("--q", type=int, default=30011, help="Modulus (R >= 1 needs q around 3e4 at delta = 0.5)"),
        *SHIFT_ARGUMENTS,
        *DELTA_ARGUMENTS,
        Argument("--length", type=int, default=10_000, help="Length of the coefficient vectors"),
        Argument("--duality-length", type=int, default=100_000, help="Cap on the duality vectors"),
        Argument("--samples", type=int, default=4, help="Primitive characters used by the character checks"),
        Argument("--suite", default=None, help="Comma-separated suites (default: all)"),
    ),
    verify=_check_mollifier_rows,
)
def mollifier_check(args: argparse.Namespace) -> Report:
    """Run the mollifier check suites at one modulus."""
    spec = shift_spec_from(args)
    sched = mollifier_schedule(args.q, spec=spec, **_delta_arguments(args))
    service = MollifierCheckService(spec, sched, length=args.length, duality_length=args.duality_length,
                                    samples=args.samples)
    names = [n.strip() for n in args.suite.split(",") if n.strip()] if args.suite else None
    rows = [row.model_dump() for row in service.run(names)]
    notes = [] if sched.R else ["R = 0 at this modulus and delta; scale checks are vacuous"]
    summary = {"q": args.q, "R": sched.R, "x": service.x}
    columns = ["check", "cases", "worst", "bound", "passed", "note"]
    return Report(command="mollifier-check", columns=columns, rows=rows, summary=summary, notes=notes,
                  failed_checks=_check_mollifier_rows(rows))
