# File: tests/test_cli.py
import pytest
import sys
import json
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from main import EXIT_IO, EXIT_OK, EXIT_OUTSIDE, EXIT_USAGE, EXIT_VERIFY_FAILED, main
from utils.config_manager import get_config, get_default_config


class TestBoundaryCommand:
    def test_csv_export(self, tmp_path):
        """Header t,eta,p and the t = 0 endpoint row"""
        out = tmp_path / "d2.csv"
        assert main(["boundary", "--dim", "2", "--samples", "100", "--format", "csv",
                     "--out", str(out)]) == EXIT_OK
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,eta,p"
        assert "0,1,0.5" in lines

    def test_qutrit_row(self, capsys):
        """Row at t = 0.6 carries eta = 0.48, p = 0.6"""
        assert main(["boundary", "--dim", "3", "--samples", "101"]) == EXIT_OK
        rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
        row = next(r for r in rows if float(r[0]) == pytest.approx(0.6))
        assert float(row[1]) == pytest.approx(0.48)
        assert float(row[2]) == pytest.approx(0.6)

    def test_json_export(self, capsys):
        """JSON schema {d, samples: [{t, eta, p}]}"""
        assert main(["boundary", "--dim", "5", "--samples", "11", "--format", "json",
                     "--mode", "exact"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["d"] == 5
        assert data["samples"][0] == {"t": 0.0, "eta": 1.0, "p": pytest.approx(77 / 240)}

    def test_invalid_dimension(self, capsys):
        """d = 1 is a usage error"""
        assert main(["boundary", "--dim", "1"]) == EXIT_USAGE
        assert "dimension" in capsys.readouterr().err

    def test_unwritable_path(self, tmp_path):
        """Missing directory is an I/O error"""
        out = tmp_path / "missing" / "curve.csv"
        assert main(["boundary", "--dim", "2", "--out", str(out)]) == EXIT_IO

    def test_byte_identical_output(self, tmp_path):
        """Repeated runs write identical files"""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["boundary", "--dim", "4", "--out", str(first)])
        main(["boundary", "--dim", "4", "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()


class TestMembershipCommand:
    @pytest.mark.parametrize("dim, eta, p, code", [
        ("2", "0.8", "0.6", EXIT_OK),
        ("2", "0.9", "0.6", EXIT_OUTSIDE),
        ("5", "0", "1", EXIT_OK),
    ])
    def test_exit_codes(self, capsys, dim, eta, p, code):
        """Exit 0 inside, 3 outside"""
        assert main(["membership", "--dim", dim, "--eta", eta, "--p", p]) == code
        output = capsys.readouterr().out
        assert output.startswith("inside" if code == EXIT_OK else "outside")
        assert "eta_max=" in output and "margin=" in output

    def test_out_of_range(self):
        """eta > 1 is a usage error"""
        assert main(["membership", "--dim", "2", "--eta", "1.5", "--p", "0.5"]) == EXIT_USAGE

    def test_unknown_flag(self):
        """Unknown flags exit with status 1"""
        with pytest.raises(SystemExit) as excinfo:
            main(["membership", "--dim", "2", "--eta", "0.5", "--p", "0.5", "--colour", "red"])
        assert excinfo.value.code == EXIT_USAGE


class TestVerifyCommand:
    def test_closedform_suite(self, capsys, tmp_path):
        """Exact limits are reported and a JSON report is written"""
        report = tmp_path / "report.json"
        assert main(["verify", "--dim", "2", "--suite", "closedform", "--report", str(report)]) == EXIT_OK
        output = capsys.readouterr().out
        assert "T_2(0) exact: measured 1" in output
        assert "A_2(0) exact: measured 3/4" in output
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["passed"] is True

    @pytest.mark.statistical
    def test_optimality_suite(self, capsys):
        """Maximum visibility gap within 5 sigma for d = 2"""
        assert main(["verify", "--dim", "2", "--suite", "optimality", "--samples", "20000"]) == EXIT_OK
        assert "FAIL" not in capsys.readouterr().out

    @pytest.mark.statistical
    def test_mc_suite(self, capsys):
        """T and A agree with the closed forms on the t-grid"""
        assert main(["verify", "--dim", "3", "--suite", "mc", "--samples", "50000", "--seed", "3"]) == EXIT_OK

    def test_config_overrides_reach_estimators(self, tmp_path):
        """min_samples and chunk_size from --config apply to the Monte-Carlo suite"""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"monte_carlo": {"min_samples": 10, "chunk_size": 50}}),
                          encoding="utf-8")
        report = tmp_path / "report.json"
        main(["--config", str(config), "verify", "--dim", "2", "--suite", "mc", "--samples", "100",
              "--report", str(report)])
        checks = json.loads(report.read_text(encoding="utf-8"))["checks"]
        assert len(checks) == 38
        assert all(check["name"] != "suite" for check in checks)

    def test_overrides_do_not_outlive_the_command(self, tmp_path):
        """Defaults are back in effect once main returns"""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"monte_carlo": {"min_samples": 10}}), encoding="utf-8")
        main(["--config", str(config), "membership", "--dim", "2", "--eta", "0.5", "--p", "0.5"])
        assert get_config() == get_default_config()
        assert main(["verify", "--dim", "2", "--suite", "mc", "--samples", "100"]) == EXIT_VERIFY_FAILED


class TestCompareCommand:
    def test_csv_rows(self, capsys):
        """p, eta_max, povm_bound, ratio"""
        assert main(["compare", "--dim", "2", "--samples", "11"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "p,eta_max,povm_bound,ratio"
        rows = {round(float(line.split(",")[0]), 6): line.split(",") for line in lines[1:]}
        assert float(rows[0.9][1]) == pytest.approx(0.2)
        assert float(rows[0.9][2]) == pytest.approx(0.01)
        assert float(rows[1.0][1]) == 0.0 and float(rows[1.0][2]) == 0.0

    def test_json_rows(self, capsys):
        """Undefined ratio at p = 1 becomes null"""
        assert main(["compare", "--dim", "3", "--samples", "5", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["rows"][-1]["ratio"] is None


class TestSimulateCommand:
    def test_counts_json(self, capsys, tmp_path):
        """Maximally mixed qubit at t = 0.75 loses half the shots"""
        out = tmp_path / "counts.json"
        assert main(["simulate", "--dim", "2", "--t", "0.75", "--state", "maximally-mixed",
                     "--shots", "100000", "--format", "json", "--out", str(out)]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["shots"] == 100_000
        assert data["counts"]["ø"] / 100_000 == pytest.approx(0.5, abs=0.01)
        assert json.loads(out.read_text(encoding="utf-8")) == data

    def test_zero_threshold(self, capsys):
        """t = 0 never produces a no-click"""
        assert main(["simulate", "--dim", "3", "--t", "0", "--state", "random", "--basis", "random",
                     "--shots", "5000", "--format", "json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["counts"]["ø"] == 0

    def test_text_table(self, capsys):
        """Empirical and analytic distributions side by side"""
        assert main(["simulate", "--dim", "3", "--t", "0.6", "--state", "basis0",
                     "--shots", "20000"]) == EXIT_OK
        output = capsys.readouterr().out
        assert "expected" in output and "chi2" in output

    def test_threshold_one_rejected(self):
        """t must lie in [0, 1)"""
        assert main(["simulate", "--dim", "2", "--t", "1", "--shots", "10"]) == EXIT_USAGE

    def test_deterministic(self, capsys):
        """Same seed, same counts"""
        argv = ["simulate", "--dim", "2", "--t", "0.7", "--state", "random", "--shots", "5000",
                "--seed", "9", "--format", "json"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first
