# File: tests/test_verification_engine.py
import pytest
import sys
import json
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from analyzers.mc_oracle import estimate_A
from core.verification_engine import SUITES, VerificationEngine
from utils.config_manager import get_default_config


class TestVerificationEngine:
    def setup_method(self):
        """Setup test fixtures"""
        self.engine = VerificationEngine(threads=1)

    @pytest.mark.parametrize("d", [2, 3, 10])
    def test_closedform_suite(self, d):
        """Exact limits, float64 accuracy and the boundary identities hold"""
        report = self.engine.run(d, "closedform")
        assert report.passed, [check.name for check in report.failures]
        names = {check.name for check in report.checks}
        assert f"T_{d}(0) exact" in names
        assert "simple-regime identity" in names

    def test_unknown_suite(self):
        """Only the four suites and 'all' are accepted"""
        with pytest.raises(ValueError):
            self.engine.run(2, "bell")
        assert SUITES == ("closedform", "mc", "povm", "optimality")

    def test_suite_exception_becomes_failure(self):
        """A suite that raises is reported, not propagated"""
        report = self.engine.run(2, "mc", samples=10)
        assert not report.passed
        assert report.failures[0].name == "suite"
        assert "ValueError" in report.failures[0].detail

    @pytest.mark.statistical
    def test_mc_suite_with_overrides(self):
        """Configured t-grid is used for the Monte-Carlo suite"""
        config = get_default_config()
        config["verify"]["mc_t_grid"] = [0.3, 0.7]
        report = VerificationEngine(config, threads=2).run(3, "mc", samples=100_000, seed=1)
        assert len(report.checks) == 4
        assert report.passed

    def test_configured_chunk_size_is_used(self):
        """Estimates follow the chunking of the engine configuration"""
        config = get_default_config()
        config["monte_carlo"]["chunk_size"] = 250
        config["verify"]["mc_t_grid"] = [0.3]
        report = VerificationEngine(config, threads=2).run(2, "mc", samples=1000, seed=4)
        chunked = estimate_A(2, 0.3, 1000, 4, chunk_size=250)
        unchunked = estimate_A(2, 0.3, 1000, 4)
        assert report.checks[1].name == "A_2(0.3)"
        assert report.checks[1].measured == f"{chunked.mean:.6g}"
        assert chunked.mean != unchunked.mean

    @pytest.mark.statistical
    def test_povm_suite(self):
        """Reconstructed elements match the analytic ones"""
        report = self.engine.run(2, "povm", samples=50_000, seed=2)
        assert report.passed
        assert any(check.name == "N_ø at t=0.75" for check in report.checks)

    def test_report_save(self, tmp_path):
        """Report JSON carries the verdict and every check"""
        report = self.engine.run(2, "closedform")
        path = tmp_path / "report.json"
        report.save(str(path))
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["passed"] is True
        assert data["suites"] == ["closedform"]
        assert len(data["checks"]) == len(report.checks)
