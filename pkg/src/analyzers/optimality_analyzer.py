# File: src/analyzers/optimality_analyzer.py
"""Empirical probe that no efficiency-preserving response beats the threshold rule.

Each trial draws one sample, applies a perturbed response family and compares its
visibility with the threshold rule clicking on equally many samples (the ones with
the largest max_k |z_k|^2). Passing trials are evidence, not proof: only a finite
family of perturbations is explored.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional
import json
import logging

import numpy as np

from analyzers.sphere_sampler import SphereSampler
from core.closed_form import eval_T, visibility
from core.data_models import Dimension, Threshold
from core.errors import CalibrationError
from responses.base_response import NO_CLICK_INDEX, BaseResponse
from responses.response_factory import ResponseFactory
from utils.config_manager import get_config, resolve_threads

logger = logging.getLogger(__name__)

MIN_TRIALS = 10
CALIBRATION_SIGMAS = 3.0

MAIN_STREAM = 1
CALIBRATION_STREAM = 2
FAMILY_STREAM = 3


@dataclass
class TrialResult:
    """Outcome of one perturbation trial"""
    family: str
    gap: float = 0.0
    std_error: float = 0.0
    visibility: float = 0.0
    visibility_error: float = 0.0
    efficiency: float = 0.0
    discarded: bool = False
    reason: str = ""

    def within(self, n_sigma: float) -> bool:
        return self.discarded or self.gap <= n_sigma * self.std_error

    def sigmas(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.gap == 0 else float(np.sign(self.gap) * np.inf)
        return self.gap / self.std_error


@dataclass
class OptimalityReport:
    """Per-trial visibility gaps for one (d, t)"""
    d: int
    t: float
    eta: float
    p: float
    n_samples: int
    trials: List[TrialResult] = field(default_factory=list)

    @property
    def kept(self) -> List[TrialResult]:
        return [trial for trial in self.trials if not trial.discarded]

    @property
    def discarded(self) -> List[TrialResult]:
        return [trial for trial in self.trials if trial.discarded]

    @property
    def worst(self) -> Optional[TrialResult]:
        kept = self.kept
        return max(kept, key=lambda trial: trial.gap) if kept else None

    @property
    def worst_gap(self) -> float:
        worst = self.worst
        return worst.gap if worst else float("nan")

    def passes(self, n_sigma: Optional[float] = None) -> bool:
        n_sigma = get_config()["monte_carlo"]["n_sigma"] if n_sigma is None else n_sigma
        return bool(self.kept) and all(trial.within(n_sigma) for trial in self.kept)

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result["worst_gap"] = self.worst_gap
        result["n_discarded"] = len(self.discarded)
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def run_trial(family: BaseResponse, d: int, t: float, n_samples: int, seed: int,
              trial_index: int) -> TrialResult:
    """Visibility gap of one response family against the matched threshold rule"""
    target_eta = float(eval_T(d, t))
    result = TrialResult(family=family.describe())

    if family.needs_calibration:
        calibration = SphereSampler(d, seed, chunk_index=trial_index, stream=CALIBRATION_STREAM)
        try:
            family.calibrate(target_eta, calibration.draw(n_samples))
        except CalibrationError as e:
            result.discarded, result.reason = True, str(e)
            return result

    Z = SphereSampler(d, seed, chunk_index=trial_index, stream=MAIN_STREAM).draw(n_samples)
    family_rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence([int(seed), FAMILY_STREAM, trial_index])))
    outcomes = family.assign(Z, rng=family_rng)

    moduli = np.abs(Z) ** 2
    clicks = outcomes != NO_CLICK_INDEX
    n_clicks = int(clicks.sum())
    eta = n_clicks / n_samples
    eta_error = np.sqrt(eta * (1.0 - eta) / n_samples)
    result.efficiency = eta
    missed = family.needs_calibration and \
        abs(eta - target_eta) > CALIBRATION_SIGMAS * eta_error + 1e-12
    if n_clicks == 0 or missed:
        result.discarded = True
        result.reason = f"efficiency {eta:.6g} misses target {target_eta:.6g}"
        return result

    rows = np.arange(n_samples)
    perturbed = np.where(clicks, moduli[rows, np.where(clicks, outcomes, 0)], 0.0)

    # Reference: threshold rule clicking on the n_clicks largest overlaps
    top = moduli.max(axis=1)
    reference = np.zeros(n_samples)
    chosen = np.argpartition(top, n_samples - n_clicks)[n_samples - n_clicks:]
    reference[chosen] = top[chosen]

    scale = d / ((d - 1) * eta)
    difference = perturbed - reference
    result.gap = float(scale * difference.mean())
    result.std_error = float(scale * difference.std(ddof=1) / np.sqrt(n_samples))
    result.visibility = float((d * perturbed.mean() / eta - 1.0) / (d - 1))
    result.visibility_error = float(scale * perturbed.std(ddof=1) / np.sqrt(n_samples))
    return result


def optimality_probe(d: int, t, n_samples: int, n_trials: int, seed: int,
                     threads: Optional[int] = None) -> OptimalityReport:
    """Trial 0 is the unperturbed rule; the rest are random perturbations"""
    d = int(Dimension(d))
    t = float(Threshold.of(t))
    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_TRIALS}, got {n_trials}")
    required = get_config()["monte_carlo"]["min_samples"]
    if n_samples < required:
        raise ValueError(f"n_samples must be >= {required}, got {n_samples}")

    report = OptimalityReport(d=d, t=t, eta=float(eval_T(d, t)), p=float(visibility(d, t)),
                              n_samples=n_samples)
    factory_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), 0])))
    families = [ResponseFactory.create("identity", d, t)]
    families += [ResponseFactory.random_perturbation(d, t, factory_rng) for _ in range(n_trials - 1)]

    def run(index: int) -> TrialResult:
        return run_trial(families[index], d, t, n_samples, seed, index)

    with ThreadPoolExecutor(max_workers=min(resolve_threads(threads), n_trials)) as executor:
        report.trials = list(executor.map(run, range(n_trials)))

    for trial in report.discarded:
        logger.warning(f"Discarded optimality trial {trial.family}: {trial.reason}")
    logger.info(f"Optimality probe d={d}, t={t:.4g}: worst gap {report.worst_gap:.3g} "
                f"over {len(report.kept)} trials")
    return report


def misassignment_check(d: int, t, n_samples: int, seed: int,
                        cap_measure: float = 0.1) -> TrialResult:
    """Cyclically relabelled clicks on a cap must lose visibility"""
    d = int(Dimension(d))
    t = float(Threshold.of(t))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), 0])))
    family = ResponseFactory.create("cap-permutation", d, t, rng, cap_measure=cap_measure)
    return run_trial(family, d, t, n_samples, seed, 0)
