"""
End-to-end runs of the command line through app.main.main.
"""
import csv
import io
import json

import pytest

from app.core.config import settings
from app.features.lfunctions.afe import afe_tolerance
from app.main import build_parser, main


def _csv_rows(text: str):
    return list(csv.DictReader(io.StringIO(text)))


def _error_document(stderr: str) -> dict:
    lines = [line for line in stderr.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


class TestCommands:
    """Successful runs."""

    def test_every_command_is_registered(self):
        parser = build_parser()
        subparsers = next(a for a in parser._actions if a.dest == "command")
        assert set(subparsers.choices) == {
            "chars", "gauss", "kloosterman", "lvalue", "afe-check", "fe-check", "prime-sums",
            "surrogate", "schedule", "mollifier-check", "moment", "sweep", "proof-split", "powerest",
        }

    def test_chars_counts(self, capsys):
        assert main(["chars", "--q", "1..40", "--orthogonality"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 40
        assert rows[4] == {"q": "5", "phi": "4", "phi_star": "3", "count": "4", "primitive_count": "3"}

    def test_chars_table(self, capsys):
        assert main(["chars", "--q", "8", "--primitive-only"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 2
        assert {row["conductor"] for row in rows} == {"8"}

    def test_gauss_and_kloosterman(self, capsys):
        assert main(["gauss", "--q", "13"]) == 0
        assert len(_csv_rows(capsys.readouterr().out)) == 12
        assert main(["kloosterman", "--q", "31", "--k", "2,3", "--v", "1,2"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 4
        assert all(row["within_bound"] == "1" for row in rows)

    def test_afe_check_json(self, capsys):
        assert main(["afe-check", "--q", "13", "--t", "0,1", "--X", "0.5,1,2", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["command"] == "afe-check"
        assert len(document["rows"]) == 3 * 11
        assert document["summary"]["worst_deviation"] < settings.AFE_RELATIVE_TOLERANCE
        assert all(row["deviation"] < afe_tolerance(bool(row["relative"])) for row in document["rows"])
        assert document["meta"]["invocation"][:2] == ["dlm", "afe-check"]
        assert isinstance(document["rows"][0]["afe_re"], float)

    def test_fe_check(self, capsys):
        assert main(["fe-check", "--q", "7,8"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == (5 + 2) * 5

    def test_lvalue_afe_skips_imprimitive(self, capsys):
        assert main(["lvalue", "--q", "9", "--s", "0.5+1i", "--method", "afe", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert len(document["rows"]) == 4
        assert document["notes"] == ["imprimitive characters skipped by the AFE"]

    def test_prime_sums(self, capsys):
        assert main(["prime-sums", "--x", "1e3,1e4", "--alpha", "0,1"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert {row["kind"] for row in rows} == {"reciprocal", "log_over_p", "cosine"}

    def test_schedule(self, capsys):
        assert main(["schedule", "--q", "1000000", "--delta", "0.5", "--format", "json"]) == 0
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert row["R"] == 1
        assert row["c_1"] == pytest.approx(0.39424, abs=1e-4)
        assert row["P_1"] == pytest.approx(232.0, abs=0.5)

    def test_sweep_header(self, capsys):
        assert main(["sweep", "--moduli", "5..8", "--t", "0,1"]) == 0
        text = capsys.readouterr().out
        assert text.splitlines()[0] == "q,phi,phi_star,moment,main_term,ratio"
        assert [row["q"] for row in _csv_rows(text)] == ["5", "7", "8"]

    def test_moment_without_primitive_characters(self, capsys):
        assert main(["moment", "--q", "6", "--t", "0", "--a", "1", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["rows"][0]["moment"] == 0.0
        assert document["notes"] == ["moment is zero: no primitive characters"]

    def test_proof_split(self, capsys):
        assert main(["proof-split", "--q", "101", "--t", "0,1", "--format", "json"]) == 0
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert row["holder_residual"] >= 0 or abs(row["holder_residual"]) <= 1e-9 * row["holder_rhs"]
        assert row["u"] == pytest.approx(8.0)

    def test_powerest(self, capsys):
        assert main(["powerest", "--q", "5", "--x", "2"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert float(rows[0]["ratio"]) == pytest.approx(1.0)

    def test_verify_with_output_file(self, tmp_path, capsys):
        out = tmp_path / "gauss.csv"
        assert main(["gauss", "--q", "5..12", "--out", str(out), "--verify"]) == 0
        assert out.read_text().startswith("q,index")
        assert capsys.readouterr().out == ""

    def test_csv_output_is_reproducible(self, capsys):
        main(["fe-check", "--q", "5"])
        first = capsys.readouterr().out
        main(["fe-check", "--q", "5"])
        assert capsys.readouterr().out == first

    def test_sweep_is_independent_of_thread_count(self, capsys):
        argv = ["sweep", "--moduli", "5..20", "--t", "0,1"]
        assert main([*argv, "--threads", "1"]) == 0
        serial = capsys.readouterr().out
        assert main([*argv, "--threads", "2"]) == 0
        assert capsys.readouterr().out == serial
        assert [row["q"] for row in _csv_rows(serial)][-3:] == ["17", "19", "20"]

    def test_prime_sum_verification_uses_bound(self):
        parser = build_parser()
        args = parser.parse_args(["prime-sums", "--kind", "cosine", "--x", "1e3", "--bound", "1e-12"])
        row = {"kind": "cosine", "x": 1000.0, "alpha": 0.0, "residual": 0.5}
        assert len(args._command.row_check(args)([row])) == 1
        args = parser.parse_args(["prime-sums", "--kind", "cosine", "--x", "1e3"])
        assert args._command.row_check(args)([row]) == []


class TestExitCodes:
    """Error documents and exit codes."""

    def test_unknown_command(self, capsys):
        assert main(["nope"]) == 1
        assert _error_document(capsys.readouterr().err)["success"] is False

    def test_domain_error(self, capsys):
        assert main(["moment", "--q", "2", "--t", "0"]) == 1
        assert "q >= 3" in _error_document(capsys.readouterr().err)["message"]

    def test_mismatched_shifts(self, capsys):
        assert main(["moment", "--q", "7", "--t", "0,1", "--a", "1"]) == 1

    def test_shift_beyond_modulus_power(self, capsys):
        assert main(["moment", "--q", "5", "--t", "10", "--A", "0.1"]) == 1
        assert _error_document(capsys.readouterr().err)["details"]["field"] == "t"

    def test_invalid_override(self):
        assert main(["moment", "--q", "7", "--t", "0", "--threads", "0"]) == 1

    def test_resource_error(self, capsys):
        assert main(["moment", "--q", "101", "--t", "0", "--cost-cap", "50"]) == 2
        assert _error_document(capsys.readouterr().err)["details"]["limit"] == "50"

    def test_failed_check(self, capsys):
        assert main(["fe-check", "--q", "5", "--tolerance", "1e-300"]) == 3
        captured = capsys.readouterr()
        assert captured.out.startswith("q,index")
        assert "check(s) failed" in _error_document(captured.err)["message"]

    def test_text_reports_cannot_be_verified(self):
        assert main(["gauss", "--q", "5", "--format", "text", "--verify"]) == 1
