"""
Report rendering, writing and read-back verification.

CSV reports carry a header row and one flat row per record; JSON reports are
one object with `meta` (version, invocation, timing) and `rows`. Reading a
report back yields the same doubles that were written.
"""
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from app.core.constants import OutputFormat
from app.core.exceptions import CheckFailedError, DomainError
from app.schemas.common import Report, ReportMeta
from app.utils.formatters import format_scalar, format_text_table, to_jsonable

logger = logging.getLogger(__name__)

RowCheck = Callable[[List[Dict[str, Any]]], List[str]]


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_scalar(row.get(c)) for c in report.columns])
    return buffer.getvalue()


def render_json(report: Report, meta: ReportMeta) -> str:
    document = {
        "meta": to_jsonable(meta.model_dump()),
        "command": report.command,
        "columns": report.columns,
        "rows": [to_jsonable({c: row.get(c) for c in report.columns}) for row in report.rows],
        "summary": to_jsonable(report.summary),
        "notes": report.notes,
        "failed_checks": report.failed_checks,
    }
    return json.dumps(document, indent=2) + "\n"


def render_text(report: Report) -> str:
    parts = [format_text_table(report.columns, report.rows)] if report.rows else ["(no rows)"]
    for key, value in report.summary.items():
        parts.append(f"{key}: {format_scalar(value) if not isinstance(value, (list, dict)) else value}")
    parts.extend(f"note: {note}" for note in report.notes)
    parts.extend(f"FAILED: {check}" for check in report.failed_checks)
    return "\n".join(parts) + "\n"


def render(report: Report, fmt: OutputFormat, meta: ReportMeta) -> str:
    """
    Render a report in the requested format.

    Args:
        report: Rows, summary and notes
        fmt: csv, json or text
        meta: Version, invocation and timing (JSON only)

    Returns:
        The report text, newline-terminated
    """
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.CSV:
        return render_csv(report)
    if fmt == OutputFormat.JSON:
        return render_json(report, meta)
    return render_text(report)


def write_report(text: str, out: Optional[str]) -> None:
    """Write to the given path, or to stdout when no path is set."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        raise DomainError(f"output directory {path.parent} does not exist", field="out")
    path.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {path}")


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_report(text: str, fmt: OutputFormat) -> Tuple[List[str], List[Dict[str, Any]]]:
    """
    Parse a rendered report back into (columns, rows).

    Raises:
        DomainError: For text reports, which are not machine-readable
    """
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.CSV:
        reader = csv.reader(io.StringIO(text))
        lines = list(reader)
        if not lines:
            return [], []
        columns = lines[0]
        rows = [dict(zip(columns, (_parse_cell(cell) for cell in line))) for line in lines[1:]]
        return columns, rows
    if fmt == OutputFormat.JSON:
        document = json.loads(text)
        columns = list(document.get("columns", []))
        rows = []
        for row in document["rows"]:
            flat: Dict[str, Any] = {}
            for key, value in row.items():
                if isinstance(value, dict) and set(value) == {"re", "im"}:
                    flat[key] = complex(float(value["re"]), float(value["im"]))
                elif isinstance(value, str) and value in ("nan", "inf", "-inf"):
                    flat[key] = float(value)
                else:
                    flat[key] = value
            rows.append(flat)
        return columns, rows
    raise DomainError("text reports cannot be verified; use --format csv or json", field="format")


def _same(a: Any, b: Any) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, float) and isinstance(b, (int, float)) and a != a:
        return isinstance(b, float) and b != b
    if isinstance(a, bool) or isinstance(b, bool):
        return int(a) == int(b)
    if isinstance(b, str) and not isinstance(a, str):
        return str(a) == b
    return a == b


def verify_report(text: str, fmt: OutputFormat, report: Report, check: Optional[RowCheck] = None,
                  source: Optional[str] = None) -> List[str]:
    """
    Re-parse a written report and re-check it.

    The parsed rows must reproduce the in-memory rows exactly and satisfy
    the command's row invariants.

    Args:
        text: Report text as written
        fmt: Its format
        report: The report that was rendered
        check: Row invariants of the command
        source: Path the report was read from, for messages

    Returns:
        Empty list on success

    Raises:
        CheckFailedError: On any mismatch or violated invariant
    """
    columns, rows = parse_report(text, fmt)
    failures: List[str] = []
    if columns != report.columns:
        failures.append(f"columns {columns} differ from {report.columns}")
    if len(rows) != len(report.rows):
        failures.append(f"{len(rows)} rows read back, {len(report.rows)} written")
    else:
        for i, (parsed, original) in enumerate(zip(rows, report.rows)):
            for column in report.columns:
                expected = to_jsonable(original.get(column)) if fmt == OutputFormat.JSON else original.get(column)
                if isinstance(expected, dict) and set(expected) == {"re", "im"}:
                    expected = complex(expected["re"], expected["im"])
                if isinstance(expected, str) and expected in ("nan", "inf", "-inf"):
                    expected = float(expected)
                if hasattr(expected, "value"):
                    expected = expected.value
                if not _same(parsed.get(column), expected):
                    failures.append(f"row {i} column {column}: read {parsed.get(column)!r}, wrote {expected!r}")
                    break
    if check is not None and not failures:
        failures.extend(check(rows))
    if failures:
        raise CheckFailedError("verify", f"{source or 'report'} failed read-back verification",
                               details={"failures": failures[:20]})
    logger.info(f"Verified {len(rows)} rows of {source or 'report'}")
    return failures
