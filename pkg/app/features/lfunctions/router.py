"""
L-function commands: lvalue, afe-check, fe-check.
"""
import argparse
import logging
from typing import Any, Dict, List

import numpy as np

from app.core.commands import Argument, CommandRouter
from app.core.config import settings
from app.core.constants import LValueMethod
from app.core.exceptions import DomainError
from app.features.characters.group import character_group
from app.features.lfunctions.afe import AfeEvaluator, afe_agreement, afe_tolerance
from app.features.lfunctions.reference import functional_equation_residual, l_reference, l_values, root_number
from app.schemas.common import Report
from app.schemas.lfunctions import AfeCheckRow, EvalOptions, FunctionalEquationRow, LValueRow
from app.utils.formatters import flatten_row
from app.utils.validators import parse_complex_list, parse_float_list, parse_moduli

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["L-functions"])

# Sample points of fe-check when --s is not given
DEFAULT_FE_POINTS = "0.5+1i,0.5+7.5i,0.3+2i,0.7-3i,0.25+0.5i"


def _selected(group, index):
    if index is None:
        return list(group)
    if not 0 <= index < group.size:
        raise DomainError(f"--index must lie in [0, {group.size}), got {index}", field="index")
    return [group.character(index)]


@router.command(
    "lvalue",
    help="L(s, chi) by the Hurwitz reference or, for primitive chi on the critical line, the AFE",
    arguments=(
        Argument("--q", required=True, type=int, help="Modulus"),
        Argument("--index", type=int, default=None, help="Character index (default: all)"),
        Argument("--s", required=True, help="Comma-separated points, e.g. 0.5+14.1i,2"),
        Argument("--method", choices=[m.value for m in LValueMethod], default=LValueMethod.REFERENCE.value),
        Argument("--X", type=float, default=1.0, help="AFE balance parameter"),
    ),
)
def lvalue(args: argparse.Namespace) -> Report:
    """Tabulate L-values."""
    points = parse_complex_list(args.s, "s")
    method = LValueMethod(args.method)
    group = character_group(args.q)
    characters = _selected(group, args.index)
    opts = EvalOptions.from_settings()
    rows: List[Dict[str, Any]] = []
    for s in points:
        if method == LValueMethod.AFE and s.real != 0.5:
            raise DomainError(f"--method afe evaluates on Re s = 1/2 only, got {s}", field="s")
        evaluator = AfeEvaluator(args.q, (s.imag,), args.X) if method == LValueMethod.AFE else None
        for chi in characters:
            if evaluator is not None:
                if not chi.is_primitive:
                    continue
                result = evaluator.for_character(chi)
            else:
                result = l_reference(chi, s, opts)
            rows.append(flatten_row(LValueRow(
                q=args.q, index=chi.index, s=s, value=result.value, method=result.method,
                error_estimate=result.truncation_error_estimate, primitive=chi.is_primitive,
            ).model_dump(exclude={"growth_exponent"})))
    columns = ["q", "index", "s_re", "s_im", "value_re", "value_im", "method", "error_estimate", "primitive"]
    notes = []
    if method == LValueMethod.AFE and len(rows) < len(points) * len(characters):
        notes.append("imprimitive characters skipped by the AFE")
    return Report(command="lvalue", columns=columns, rows=rows, notes=notes)


def _check_afe_rows(rows: List[Dict[str, Any]]) -> List[str]:
    return [
        f"q={row['q']} index={row['index']} X={row['X']}: deviation {row['deviation']}"
        for row in rows if not row["deviation"] < afe_tolerance(bool(row["relative"]))
    ]


@router.command(
    "afe-check",
    help="Agreement of the AFE with the reference evaluator across X",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list"),
        Argument("--t", required=True, help="Comma-separated shifts"),
        Argument("--X", default="0.5,1,2", help="Comma-separated balance parameters"),
        Argument("--index", type=int, default=None, help="Character index (default: all primitive)"),
    ),
    verify=_check_afe_rows,
)
def afe_check(args: argparse.Namespace) -> Report:
    """
    Compare the AFE product with the reference product for primitive characters.

    The deviation is relative when the reference exceeds AFE_RELATIVE_FLOOR in
    modulus and absolute otherwise.
    """
    shifts = parse_float_list(args.t, "t")
    xs = parse_float_list(args.X, "X")
    if any(x <= 0 for x in xs):
        raise DomainError("--X values must be positive", field="X")
    opts = EvalOptions.from_settings()
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        group = character_group(q)
        reference = np.ones(group.size, dtype=complex)
        for t in shifts:
            reference *= l_values(group, complex(0.5, t), opts)
        chosen = [chi for chi in _selected(group, args.index) if chi.is_primitive]
        if not chosen:
            logger.info(f"afe-check q={q}: no primitive characters")
            continue
        for X in xs:
            evaluator = AfeEvaluator(q, shifts, X)
            values = evaluator.for_group(group)
            for chi in chosen:
                afe, ref = complex(values[chi.index]), complex(reference[chi.index])
                deviation, relative, _ = afe_agreement(afe, ref)
                rows.append(flatten_row(AfeCheckRow(
                    q=q, index=chi.index, X=X, afe=afe, reference=ref, deviation=deviation,
                    relative=relative, terms=evaluator.term_count(chi.parity),
                ).model_dump()))
    columns = ["q", "index", "X", "afe_re", "afe_im", "reference_re", "reference_im",
               "deviation", "relative", "terms"]
    worst = max((r["deviation"] for r in rows), default=0.0)
    notes = [] if rows else ["no primitive characters"]
    return Report(command="afe-check", columns=columns, rows=rows, summary={"worst_deviation": worst},
                  notes=notes, failed_checks=_check_afe_rows(rows))


def _check_fe_rows(rows: List[Dict[str, Any]]) -> List[str]:
    return [
        f"q={row['q']} index={row['index']} s={row['s_re']}+{row['s_im']}i: residual {row['residual']}"
        for row in rows if not row["residual"] < settings.CHECK_TOLERANCE
    ]


@router.command(
    "fe-check",
    help="Functional-equation residual of every primitive character",
    arguments=(
        Argument("--q", required=True, help="Modulus or modulus list"),
        Argument("--s", default=DEFAULT_FE_POINTS, help="Comma-separated points with 0 < Re s < 1"),
    ),
    verify=_check_fe_rows,
)
def fe_check(args: argparse.Namespace) -> Report:
    """Lambda(s, chi) against eps(chi) Lambda(1 - s, conj chi)."""
    points = parse_complex_list(args.s, "s")
    opts = EvalOptions.from_settings()
    rows: List[Dict[str, Any]] = []
    for q in parse_moduli(args.q):
        for chi in character_group(q):
            if not chi.is_primitive:
                continue
            epsilon = root_number(chi)
            for s in points:
                rows.append(flatten_row(FunctionalEquationRow(
                    q=q, index=chi.index, parity=chi.parity, s=s,
                    residual=functional_equation_residual(chi, s, opts), root_number=epsilon,
                ).model_dump()))
    columns = ["q", "index", "parity", "s_re", "s_im", "residual", "root_number_re", "root_number_im"]
    worst = max((r["residual"] for r in rows), default=0.0)
    return Report(command="fe-check", columns=columns, rows=rows, summary={"worst_residual": worst},
                  notes=[] if rows else ["no primitive characters"], failed_checks=_check_fe_rows(rows))
