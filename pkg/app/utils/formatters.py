"""
Formatting utilities for report fields.

Floats are rendered with 17 significant digits so that a report re-parses to
the exact doubles that produced it; complex values are split into _re/_im
columns and booleans become 0/1.
"""
import math
from enum import Enum
from typing import Any, Dict, List, Sequence

from app.core.constants import FLOAT_DIGITS


def format_float(value: float) -> str:
    """
    Render a double with FLOAT_DIGITS significant digits.

    Examples:
        >>> format_float(0.1)
        '0.10000000000000001'
        >>> format_float(float("nan"))
        'nan'
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{FLOAT_DIGITS}g")


def format_scalar(value: Any) -> str:
    """Render one CSV cell: booleans as 0/1, integers verbatim, floats at full precision."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def flatten_row(row: Dict[str, Any]) -> Dict[str, Any]:
    """
    Split complex fields into name_re / name_im and drop nested structures.

    Args:
        row: Field map of one report row

    Returns:
        Map with scalar values only, in the original column order
    """
    flat: Dict[str, Any] = {}
    for name, value in row.items():
        if isinstance(value, complex):
            flat[f"{name}_re"] = value.real
            flat[f"{name}_im"] = value.imag
        elif isinstance(value, (list, tuple)):
            for i, item in enumerate(value, start=1):
                if isinstance(item, complex):
                    flat[f"{name}_{i}_re"] = item.real
                    flat[f"{name}_{i}_im"] = item.imag
                elif not isinstance(item, (dict, list, tuple)):
                    flat[f"{name}_{i}"] = item
        elif isinstance(value, dict):
            continue
        else:
            flat[name] = value
    return flat


def csv_columns(rows: Sequence[Dict[str, Any]], preferred: Sequence[str] = ()) -> List[str]:
    """Column order: preferred columns first, then the remaining keys in first-seen order."""
    columns = [c for c in preferred]
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def to_jsonable(value: Any) -> Any:
    """Convert complex numbers to {"re", "im"} and floats to full-precision JSON numbers."""
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return format_float(value)
        return float(format_float(value))
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def format_text_table(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    """Aligned plain-text table for the text output format."""
    cells = [[format_scalar(row.get(c, "")) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)
