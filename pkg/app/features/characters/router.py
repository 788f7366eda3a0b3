"""
Character-engine commands: chars, gauss, kloosterman.
"""
import argparse
import logging
from math import gcd
from typing import Any, Dict, List

from app.core.commands import Argument, CommandRouter
from app.core.config import settings
from app.features.characters.arithmetic import euler_phi, phi_star
from app.features.characters.group import character_group
from app.features.characters.sums import (
    gauss_conjugation_residual,
    gauss_sums,
    kloosterman_sum,
    orthogonality_sum,
    primitive_orthogonality_sum,
    weil_bound,
)
from app.schemas.arithmetic import CharacterRow, GaussRow, KloostermanRow
from app.schemas.common import Report
from app.utils.formatters import flatten_row
from app.utils.validators import parse_int_list, parse_moduli

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Characters"])


def _check_character_rows(rows: List[Dict[str, Any]]) -> List[str]:
    failures = []
    for row in rows:
        if "conductor" in row and bool(row["primitive"]) != (row["conductor"] == row["q"]):
            failures.append(f"q={row['q']} index={row['index']}: primitive flag disagrees with conductor")
        if "count" in row and row["count"] != row["phi"]:
            failures.append(f"q={row['q']}: {row['count']} characters, phi = {row['phi']}")
        if "primitive_count" in row and row["primitive_count"] != row["phi_star"]:
            failures.append(f"q={row['q']}: {row['primitive_count']} primitive, phi* = {row['phi_star']}")
    return failures


@router.command(
    "chars",
    help="Character table: conductors, primitivity, parities and orders",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list (e.g. 1..1000)"),
        Argument("--primitive-only", action="store_true", help="List primitive characters only"),
        Argument("--counts", action="store_true", help="One row per modulus with character counts"),
        Argument("--orthogonality", action="store_true",
                 help="Also check both orthogonality relations at every unit"),
    ),
    verify=_check_character_rows,
)
def chars(args: argparse.Namespace) -> Report:
    """Enumerate the characters of each modulus."""
    moduli = parse_moduli(args.q)
    rows: List[Dict[str, Any]] = []
    failed: List[str] = []
    for q in moduli:
        group = character_group(q)
        if args.counts or len(moduli) > 1:
            row = {"q": q, "phi": euler_phi(q), "phi_star": phi_star(q),
                   "count": group.size, "primitive_count": group.primitive_count}
            rows.append(row)
        else:
            for chi in group:
                if args.primitive_only and not chi.is_primitive:
                    continue
                rows.append(flatten_row(CharacterRow(
                    q=q, index=chi.index, exponents=":".join(str(e) for e in chi.exponents) or "0",
                    conductor=chi.conductor, primitive=chi.is_primitive, parity=chi.parity, order=chi.order
                ).model_dump()))
        if args.orthogonality:
            # both helpers raise InternalError on a mismatch
            for n in range(1, max(q, 2)):
                if gcd(n, q) == 1:
                    orthogonality_sum(q, n)
                    primitive_orthogonality_sum(q, n)
        logger.debug(f"chars q={q}: {group.size} characters, {group.primitive_count} primitive")

    failed.extend(_check_character_rows(rows))
    columns = list(rows[0].keys()) if rows else ["q", "index"]
    summary = {"moduli": len(moduli)}
    if args.orthogonality:
        summary["orthogonality_checked"] = True
    return Report(command="chars", columns=columns, rows=rows, summary=summary, failed_checks=failed)


def _check_gauss_rows(rows: List[Dict[str, Any]]) -> List[str]:
    failures = []
    for row in rows:
        deviation = row.get("abs_squared_minus_q")
        if row["primitive"] and deviation is not None and abs(deviation) >= settings.CHECK_TOLERANCE:
            failures.append(f"q={row['q']} index={row['index']}: ||tau|^2 - q| = {deviation}")
        residual = row.get("conjugation_residual")
        if residual is not None and residual >= settings.CHECK_TOLERANCE:
            failures.append(f"q={row['q']} index={row['index']}: conjugation residual {residual}")
    return failures


@router.command(
    "gauss",
    help="Gauss sums with the |tau|^2 = q law and the conjugation identity",
    arguments=(Argument("--q", required=True, help="Modulus or modulus list"),),
    verify=_check_gauss_rows,
)
def gauss(args: argparse.Namespace) -> Report:
    """Gauss sums of every character."""
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        group = character_group(q)
        taus = gauss_sums(group)
        primitive = group.primitive_mask
        for chi in group:
            tau = complex(taus[chi.index])
            rows.append(flatten_row(GaussRow(
                q=q, index=chi.index, primitive=bool(primitive[chi.index]), tau=tau,
                abs_squared_minus_q=abs(tau) ** 2 - q if primitive[chi.index] else None,
                conjugation_residual=gauss_conjugation_residual(chi),
            ).model_dump()))
    columns = ["q", "index", "primitive", "tau_re", "tau_im", "abs_squared_minus_q", "conjugation_residual"]
    worst = max((abs(r["abs_squared_minus_q"]) for r in rows if r["abs_squared_minus_q"] is not None), default=0.0)
    return Report(command="gauss", columns=columns, rows=rows, summary={"worst_abs_squared_minus_q": worst},
                  failed_checks=_check_gauss_rows(rows))


def _check_kloosterman_rows(rows: List[Dict[str, Any]]) -> List[str]:
    failures = []
    for row in rows:
        magnitude = abs(complex(row["value_re"], row["value_im"]))
        if magnitude > row["weil_bound"] * (1 + 1e-9):
            failures.append(f"q={row['q']} k={row['k']} v={row['v']}: |S| = {magnitude} above {row['weil_bound']}")
    return failures


@router.command(
    "kloosterman",
    help="Hyper-Kloosterman sums against the Weil bound d_k(q) q^{(k-1)/2}",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list"),
        Argument("--k", default="2", help="Comma-separated numbers of variables"),
        Argument("--v", default=None, help="Comma-separated units v (default: every unit)"),
    ),
    verify=_check_kloosterman_rows,
)
def kloosterman(args: argparse.Namespace) -> Report:
    """S_k(v, q) for the requested (q, k, v)."""
    ks = parse_int_list(args.k, "k")
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        units = parse_int_list(args.v, "v") if args.v else [int(u) for u in character_group(q).unit_residues]
        for k in ks:
            bound = weil_bound(k, q)
            for v in units:
                value = kloosterman_sum(k, v, q)
                rows.append(flatten_row(KloostermanRow(
                    q=q, k=k, v=v, value=value, weil_bound=bound, within_bound=abs(value) <= bound * (1 + 1e-9)
                ).model_dump()))
    columns = ["q", "k", "v", "value_re", "value_im", "weil_bound", "within_bound"]
    return Report(command="kloosterman", columns=columns, rows=rows, failed_checks=_check_kloosterman_rows(rows))
