# File: src/core/verification_engine.py
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional
import json
import logging

import numpy as np

from core.closed_form import (EvalMode, boundary_point, eval_A, eval_T, harmonic,
                              simple_regime_eta, unit_efficiency_visibility)
from core.data_models import Dimension, validate_povm
from core.measurement import analytic_simulated_povm, make_noisy_pvm
from core.region import export_curve
from utils.config_manager import TOLERANCES, get_config

SUITES = ("closedform", "mc", "povm", "optimality")


@dataclass
class VerificationCheck:
    """Single pass/fail line of a verification run"""
    suite: str
    name: str
    passed: bool
    measured: Optional[str] = None
    expected: Optional[str] = None
    std_error: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class VerificationReport:
    """Outcome of one verify invocation"""
    d: int
    seed: int
    samples: int
    suites: List[str]
    checks: List[VerificationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[VerificationCheck]:
        return [check for check in self.checks if not check.passed]

    def to_json(self) -> str:
        """Convert report to JSON string"""
        report_dict = {
            "d": self.d,
            "seed": self.seed,
            "samples": self.samples,
            "suites": self.suites,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }
        return json.dumps(report_dict, indent=2, ensure_ascii=False)

    def save(self, filepath: str):
        """Save report to file"""
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(self.to_json())


class VerificationEngine:
    """Runs the closed-form, Monte-Carlo, POVM and optimality suites for one d"""

    def __init__(self, config: Optional[Dict[str, Any]] = None, threads: Optional[int] = None):
        self.config = config or get_config()
        self.verify_config = self.config.get("verify", get_config()["verify"])
        monte_carlo = self.config.get("monte_carlo", get_config()["monte_carlo"])
        self.n_sigma = monte_carlo.get("n_sigma", 5.0)
        self.chunk_size = monte_carlo.get("chunk_size")
        self.threads = threads
        self.logger = logging.getLogger(__name__)

    def run(self, d: int, suite: str = "all", samples: Optional[int] = None,
            seed: int = 0) -> VerificationReport:
        """Main verification orchestration method"""
        d = int(Dimension(d))
        suites = list(SUITES) if suite == "all" else [suite]
        unknown = [name for name in suites if name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        samples = samples or self.verify_config["samples"]
        report = VerificationReport(d=d, seed=seed, samples=samples, suites=suites)

        runners: Dict[str, Callable[[int, int, int], List[VerificationCheck]]] = {
            "closedform": self._closedform_suite,
            "mc": self._mc_suite,
            "povm": self._povm_suite,
            "optimality": self._optimality_suite,
        }
        for name in suites:
            self.logger.info(f"Running {name} suite for d={d}")
            try:
                report.checks.extend(runners[name](d, samples, seed))
            except Exception as e:
                self.logger.error(f"{name} suite failed: {e}")
                report.checks.append(VerificationCheck(suite=name, name="suite", passed=False,
                                                       detail=f"{type(e).__name__}: {e}"))

        self.logger.info(f"Verification complete: {len(report.checks) - len(report.failures)}"
                         f"/{len(report.checks)} checks passed")
        return report

    def _closedform_suite(self, d: int, samples: int, seed: int) -> List[VerificationCheck]:
        checks = []
        if d <= self.verify_config["max_exact_dimension"]:
            T0 = eval_T(d, 0, EvalMode.EXACT)
            A0 = eval_A(d, 0, EvalMode.EXACT)
            checks.append(VerificationCheck("closedform", f"T_{d}(0) exact", T0 == 1,
                                            measured=str(T0), expected="1"))
            checks.append(VerificationCheck("closedform", f"A_{d}(0) exact", A0 == harmonic(d) / d,
                                            measured=str(A0), expected=str(harmonic(d) / d)))
            p0 = boundary_point(d, 0, EvalMode.EXACT).p
            checks.append(VerificationCheck("closedform", "visibility at eta=1",
                                            p0 == unit_efficiency_visibility(d),
                                            measured=str(p0), expected=str(unit_efficiency_visibility(d))))

            worst = 0.0
            for sample in export_curve(d, 21):
                exact = boundary_point(d, Fraction(float(sample.t)), EvalMode.EXACT)
                worst = max(worst, abs(sample.eta - float(exact.eta)), abs(sample.p - float(exact.p)))
            checks.append(VerificationCheck("closedform", "float64 vs exact curve", worst <= 1e-8,
                                            measured=f"{worst:.3g}", expected="<= 1e-08"))

        curve = export_curve(d, 51)
        invariant = all(sample.satisfies_invariant(d) for sample in curve)
        checks.append(VerificationCheck("closedform", "boundary invariant", invariant,
                                        detail=f"{len(curve)} samples"))

        worst = 0.0
        for t in np.linspace(0.51, 0.99, 25):
            sample = boundary_point(d, float(t))
            expected = simple_regime_eta(d, float(t))
            worst = max(worst, abs(sample.p - t) / t, abs(sample.eta - expected) / max(expected, 1e-300))
        checks.append(VerificationCheck("closedform", "simple-regime identity", worst <= 1e-12,
                                        measured=f"{worst:.3g}", expected="<= 1e-12 relative"))

        worst = 0.0
        valid = True
        for t in self.verify_config["povm_t_grid"]:
            analytic = analytic_simulated_povm(d, t)
            noisy = make_noisy_pvm(d, np.eye(d), analytic.params)
            worst = max(worst, analytic.max_norm_distance(noisy))
            valid = valid and validate_povm(analytic.elements)
        checks.append(VerificationCheck("closedform", "simulated POVM = noisy PVM",
                                        worst <= TOLERANCES["algebraic"] and valid,
                                        measured=f"{worst:.3g}", expected="<= 1e-10"))
        return checks

    def _mc_suite(self, d: int, samples: int, seed: int) -> List[VerificationCheck]:
        from analyzers.mc_oracle import estimate_A, estimate_T

        checks = []
        for t in self.verify_config["mc_t_grid"]:
            for label, estimator, closed_form in (("T", estimate_T, eval_T), ("A", estimate_A, eval_A)):
                estimate = estimator(d, t, samples, seed, threads=self.threads,
                                     chunk_size=self.chunk_size)
                expected = closed_form(d, t)
                checks.append(VerificationCheck(
                    "mc", f"{label}_{d}({t:g})", estimate.agrees_with(expected, self.n_sigma),
                    measured=f"{estimate.mean:.6g}", expected=f"{expected:.6g}",
                    std_error=estimate.std_error))
        return checks

    def _povm_suite(self, d: int, samples: int, seed: int) -> List[VerificationCheck]:
        from analyzers.mc_oracle import reconstruct_simulated_povm

        checks = []
        identity = np.eye(d)
        for t in self.verify_config["povm_t_grid"]:
            reconstruction = reconstruct_simulated_povm(d, t, samples, seed, threads=self.threads,
                                                        chunk_size=self.chunk_size)
            analytic = analytic_simulated_povm(d, t)
            for index, (estimate, element) in enumerate(zip(reconstruction, analytic.elements)):
                label = "ø" if index == d else str(index)
                checks.append(VerificationCheck(
                    "povm", f"N_{label} at t={t:g}", estimate.agrees_with(element.entries, self.n_sigma),
                    measured=f"{estimate.max_sigmas(element.entries):.3g} sigma", expected="<= 5 sigma"))
            total = reconstruction.total
            checks.append(VerificationCheck(
                "povm", f"sum of elements at t={t:g}", total.agrees_with(identity, self.n_sigma),
                measured=f"{total.max_sigmas(identity):.3g} sigma", expected="<= 5 sigma"))
        return checks

    def _optimality_suite(self, d: int, samples: int, seed: int) -> List[VerificationCheck]:
        from analyzers.optimality_analyzer import misassignment_check, optimality_probe

        t = self.verify_config["optimality_t"].get(str(d), 0.6)
        n = min(samples, self.verify_config["samples"])
        report = optimality_probe(d, t, n, self.verify_config["optimality_trials"], seed,
                                  threads=self.threads)
        worst = report.worst
        checks = [VerificationCheck(
            "optimality", f"max visibility gap at t={t:g}", report.passes(self.n_sigma),
            measured=f"{report.worst_gap:.3g}", expected=f"<= {self.n_sigma:g} sigma",
            std_error=worst.std_error if worst else None,
            detail=f"{len(report.kept)} kept, {len(report.discarded)} discarded")]

        sensitivity = misassignment_check(d, t, n, seed)
        checks.append(VerificationCheck(
            "optimality", "cap misassignment loses visibility",
            not sensitivity.discarded and sensitivity.gap < -self.n_sigma * sensitivity.std_error,
            measured=f"{sensitivity.gap:.3g}", expected=f"< -{self.n_sigma:g} sigma",
            std_error=sensitivity.std_error, detail=sensitivity.family))
        return checks
