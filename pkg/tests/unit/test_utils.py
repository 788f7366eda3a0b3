"""
Tests for formatting, parsing, report read-back and the parallel helpers.
"""
import json
import math

import numpy as np
import pytest

from app.core.constants import OutputFormat, PrimeSumKind
from app.core.exceptions import CheckFailedError, DomainError
from app.infrastructure.parallel import ordered_map, pairwise_sum
from app.schemas.common import Report, ReportMeta
from app.utils.dirichlet import dirichlet_convolve, twist, unit_series
from app.utils.formatters import csv_columns, flatten_row, format_float, format_scalar, to_jsonable
from app.utils.reports import parse_report, render, verify_report, write_report
from app.utils.validators import (
    parse_complex,
    parse_complex_list,
    parse_float_list,
    parse_int_list,
    parse_moduli,
    validate_modulus_range,
)


def _square(x: int) -> int:
    return x * x


@pytest.fixture
def report():
    rows = [
        {"q": 5, "value_re": 0.1, "value_im": -1 / 3, "kind": PrimeSumKind.COSINE, "ok": True, "extra": None},
        {"q": 7, "value_re": 1e-300, "value_im": 2.0, "kind": PrimeSumKind.RECIPROCAL, "ok": False, "extra": 3},
    ]
    return Report(command="demo", columns=["q", "value_re", "value_im", "kind", "ok", "extra"], rows=rows,
                  summary={"max": 2.0}, notes=["a note"])


@pytest.fixture
def meta():
    return ReportMeta(version="1.0.0", invocation=["dlm", "demo"], timing={"compute": 0.5})


class TestFormatters:
    """Tests for cell rendering."""

    def test_float_round_trip(self):
        for value in (0.1, 1 / 3, 1e-300, -2.5e17, math.pi):
            assert float(format_float(value)) == value
        assert format_float(float("nan")) == "nan"
        assert format_float(float("-inf")) == "-inf"

    def test_scalars(self):
        assert format_scalar(True) == "1"
        assert format_scalar(None) == ""
        assert format_scalar(12) == "12"
        assert format_scalar(OutputFormat.JSON) == "json"

    def test_flatten(self):
        row = {"q": 3, "tau": 1 + 2j, "r": (2.0, 3.0), "s": (1j,), "nested": {"a": 1}}
        assert flatten_row(row) == {"q": 3, "tau_re": 1.0, "tau_im": 2.0, "r_1": 2.0, "r_2": 3.0,
                                    "s_1_re": 0.0, "s_1_im": 1.0}

    def test_columns(self):
        assert csv_columns([{"b": 1, "a": 2}, {"c": 3}], ["a"]) == ["a", "b", "c"]

    def test_jsonable(self):
        assert to_jsonable({"z": 1 - 1j, "k": PrimeSumKind.COSINE, "x": [float("inf")]}) == {
            "z": {"re": 1.0, "im": -1.0}, "k": "cosine", "x": ["inf"]
        }


class TestValidators:
    """Tests for command-line parsing."""

    def test_float_list(self):
        assert parse_float_list("0, 1.5,-2") == (0.0, 1.5, -2.0)
        with pytest.raises(DomainError):
            parse_float_list("1,abc")
        with pytest.raises(DomainError):
            parse_float_list("nan")
        with pytest.raises(DomainError):
            parse_float_list(" , ")

    def test_int_list(self):
        assert parse_int_list("1,2") == (1, 2)
        with pytest.raises(DomainError):
            parse_int_list("1.5")

    def test_complex(self):
        assert parse_complex("0.5+14.134725i") == complex(0.5, 14.134725)
        assert parse_complex("2") == 2
        assert parse_complex("0.7-3i") == complex(0.7, -3)
        assert parse_complex_list("0.5+1i, 2") == (complex(0.5, 1), 2)
        with pytest.raises(DomainError):
            parse_complex("1+")

    def test_moduli(self):
        assert parse_moduli("5,7,11") == [5, 7, 11]
        assert parse_moduli("3..6,9") == [3, 4, 5, 6, 9]
        assert parse_moduli("prime:10..30") == [11, 13, 17, 19, 23, 29]
        for bad in ("", "prime:24..28", "5..3", "x", "0..4", "1..200000"):
            with pytest.raises(DomainError):
                parse_moduli(bad)

    def test_modulus_range(self):
        assert validate_modulus_range(3, 5) == (True, None)
        assert validate_modulus_range(5, 3)[0] is False


class TestReports:
    """Tests for rendering and read-back verification."""

    def test_csv_round_trip(self, report, meta):
        text = render(report, OutputFormat.CSV, meta)
        assert text.splitlines()[0] == "q,value_re,value_im,kind,ok,extra"
        columns, rows = parse_report(text, OutputFormat.CSV)
        assert columns == report.columns
        assert rows[0]["value_im"] == -1 / 3
        assert rows[1]["value_re"] == 1e-300
        assert rows[0]["extra"] is None
        assert verify_report(text, OutputFormat.CSV, report) == []

    def test_json_document(self, report, meta):
        text = render(report, OutputFormat.JSON, meta)
        document = json.loads(text)
        assert document["meta"]["invocation"] == ["dlm", "demo"]
        assert document["summary"] == {"max": 2.0}
        assert document["rows"][0]["kind"] == "cosine"
        assert verify_report(text, OutputFormat.JSON, report) == []

    def test_text_is_not_verifiable(self, report, meta):
        text = render(report, OutputFormat.TEXT, meta)
        assert "note: a note" in text
        with pytest.raises(DomainError):
            parse_report(text, OutputFormat.TEXT)

    def test_tampered_report_fails(self, report, meta):
        text = render(report, OutputFormat.CSV, meta).replace("0.10000000000000001", "0.2")
        with pytest.raises(CheckFailedError):
            verify_report(text, OutputFormat.CSV, report)

    def test_row_check_runs_on_parsed_rows(self, report, meta):
        text = render(report, OutputFormat.CSV, meta)
        with pytest.raises(CheckFailedError):
            verify_report(text, OutputFormat.CSV, report, check=lambda rows: [f"q={r['q']}" for r in rows])

    def test_write_and_read(self, report, meta, tmp_path):
        path = tmp_path / "out.csv"
        write_report(render(report, OutputFormat.CSV, meta), str(path))
        columns, rows = parse_report(path.read_text(encoding="utf-8"), OutputFormat.CSV)
        assert columns == report.columns and len(rows) == 2
        with pytest.raises(DomainError):
            write_report("x", str(tmp_path / "missing" / "out.csv"))

    def test_csv_is_deterministic(self, report, meta):
        other = ReportMeta(version="1.0.0", timing={"compute": 9.0})
        assert render(report, OutputFormat.CSV, meta) == render(report, OutputFormat.CSV, other)


class TestParallel:
    """Tests for ordered_map and pairwise_sum."""

    def test_ordered_map_serial_and_parallel(self):
        items = list(range(20))
        assert ordered_map(_square, items, threads=1) == [x * x for x in items]
        assert ordered_map(_square, items, threads=3) == [x * x for x in items]

    def test_pairwise_sum(self):
        assert pairwise_sum([]) == 0.0
        assert pairwise_sum([1.5]) == 1.5
        assert pairwise_sum([1, 2, 3, 4, 5]) == 15
        values = np.random.default_rng(1).normal(size=1001)
        assert pairwise_sum(values) == pytest.approx(math.fsum(values), abs=1e-12)
        assert pairwise_sum(list(values)) == pairwise_sum(values)


class TestDirichletSeries:
    """Tests for dense Dirichlet-series helpers."""

    def test_convolution_of_ones_counts_divisors(self):
        ones = np.ones(31)
        d = dirichlet_convolve(ones, ones, 30)
        assert d[12] == 6 and d[1] == 1 and d[29] == 2

    def test_identity_and_repeated_convolution(self):
        ones = np.ones(31)
        assert np.array_equal(dirichlet_convolve(ones, unit_series(30), 30)[1:], ones[1:])
        d3 = dirichlet_convolve(dirichlet_convolve(ones, ones, 30), ones, 30)
        assert d3[8] == 10

    def test_twist(self):
        twisted = twist(np.ones(4), 1.0)
        assert twisted[1] == 1
        assert twisted[3] == pytest.approx(3 ** -1j)
