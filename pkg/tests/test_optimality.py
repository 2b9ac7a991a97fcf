# File: tests/test_optimality.py
import pytest
import sys
import json
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from analyzers.optimality_analyzer import misassignment_check, optimality_probe, run_trial
from responses.response_factory import ResponseFactory


class TestTrials:
    def test_identity_has_zero_gap(self):
        """The threshold rule is its own matched reference"""
        family = ResponseFactory.create("identity", 3, 0.4)
        trial = run_trial(family, 3, 0.4, 20_000, seed=1, trial_index=0)
        assert not trial.discarded
        assert trial.gap == 0.0
        assert trial.std_error == 0.0

    def test_identity_visibility(self):
        """Estimated visibility of the threshold rule is p(t)"""
        family = ResponseFactory.create("identity", 2, 0.6)
        trial = run_trial(family, 2, 0.6, 50_000, seed=2, trial_index=0)
        assert abs(trial.visibility - 0.6) <= 5 * trial.visibility_error

    @pytest.mark.statistical
    def test_misassignment_is_detected(self):
        """Relabelled clicks on a cap of measure 0.1 lose visibility beyond 5 sigma"""
        trial = misassignment_check(2, 0.6, 100_000, seed=3)
        assert not trial.discarded
        assert trial.gap < -5 * trial.std_error

    def test_uncalibratable_family_discarded(self):
        """A score family cannot target efficiency 1"""
        family = ResponseFactory.create("threshold-jitter", 3, 0.2, np.random.default_rng(0))
        trial = run_trial(family, 3, 0.2, 5_000, seed=4, trial_index=0)
        assert trial.discarded
        assert trial.reason


class TestProbe:
    def test_needs_ten_trials(self):
        """Fewer than ten trials are refused"""
        with pytest.raises(ValueError):
            optimality_probe(2, 0.6, 10_000, 5, seed=0)

    @pytest.mark.statistical
    @pytest.mark.parametrize("d, t", [(2, 0.6), (3, 0.4)])
    def test_no_perturbation_beats_threshold(self, d, t):
        """Every kept gap is at most 5 combined standard errors"""
        report = optimality_probe(d, t, 50_000, 20, seed=d)
        assert report.passes()
        assert report.kept[0].family == "threshold"
        assert report.worst_gap <= 5 * report.worst.std_error

    @pytest.mark.slow
    @pytest.mark.parametrize("d, t", [(2, 0.6), (3, 0.4)])
    def test_hundred_perturbations(self, d, t):
        """Acceptance-size probe"""
        report = optimality_probe(d, t, 200_000, 100, seed=10 + d)
        assert report.passes()
        assert len(report.kept) >= 90

    def test_report_serialization(self):
        """Report JSON carries per-trial results and the worst gap"""
        report = optimality_probe(2, 0.6, 5_000, 10, seed=5, threads=2)
        data = json.loads(report.to_json())
        assert len(data["trials"]) == 10
        assert "worst_gap" in data and "n_discarded" in data
