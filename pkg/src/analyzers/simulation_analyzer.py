# File: src/analyzers/simulation_analyzer.py
"""Classical hidden-variable simulation of noisy PVMs on arbitrary states"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
import logging

import numpy as np
from scipy import stats

from analyzers.sphere_sampler import SphereSampler, run_chunked
from core.data_models import (NO_CLICK_LABEL, ComplexUnitVector, ExportedCounts,
                              OperatorMatrix, Threshold)
from core.errors import DimensionMismatchError
from core.measurement import (MatrixLike, QuantumState, make_noisy_pvm,
                              outcome_distribution, simulated_params)
from responses.base_response import NO_CLICK_INDEX
from responses.threshold_response import ThresholdResponse
from utils.config_manager import get_config

logger = logging.getLogger(__name__)

SIMULATION_STREAM = 4
ZERO_PROBABILITY = 1e-15


def _simulation_config():
    return get_config()["simulation"]


def sample_parent_outcomes(state: QuantumState, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws from the density d <z|rho|z> w.r.t. the invariant measure.

    Picks eigenvector v_i with probability lambda_i, then draws the overlaps
    |<v_j|z>|^2 from a Dirichlet law with weight 2 on coordinate i and uniform
    phases; the mixture has density d sum_i lambda_i |<v_i|z>|^2.
    """
    probabilities, vectors = state.eigensystem
    d = state.dim
    favoured = rng.choice(d, size=n, p=probabilities)
    weights = rng.standard_exponential((n, d))
    weights[np.arange(n), favoured] += rng.standard_exponential(n)
    moduli = weights / weights.sum(axis=1, keepdims=True)
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(n, d)))
    coordinates = np.sqrt(moduli) * phases
    return coordinates @ vectors.T


def sample_parent_outcome(state: QuantumState, seed: int) -> ComplexUnitVector:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed)])))
    return ComplexUnitVector(sample_parent_outcomes(state, 1, rng)[0])


def expected_distribution(state: QuantumState, U: MatrixLike, t) -> np.ndarray:
    """Born probabilities of the noisy PVM the simulation should reproduce"""
    return outcome_distribution(make_noisy_pvm(state.dim, U, simulated_params(state.dim, t)), state)


def chi_square_test(counts: Sequence[int], probabilities: Sequence[float],
                    min_expected: Optional[float] = None) -> Tuple[float, float]:
    """Goodness of fit with low-expectation outcomes pooled.

    Outcomes of zero probability are left out; a single count there is an
    outright rejection.
    """
    min_expected = _simulation_config()["min_expected_count"] if min_expected is None else min_expected
    counts = np.asarray(counts, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    impossible = probabilities <= ZERO_PROBABILITY
    if counts[impossible].sum() > 0:
        logger.warning("Observed counts on zero-probability outcomes")
        return float("inf"), 0.0

    expected = counts.sum() * probabilities
    small = ~impossible & (expected < min_expected)
    large = ~impossible & ~small
    observed_bins = list(counts[large])
    expected_bins = list(expected[large])
    if small.any():
        pooled_observed, pooled_expected = counts[small].sum(), expected[small].sum()
        if pooled_expected < min_expected and expected_bins:
            largest = int(np.argmax(expected_bins))
            observed_bins[largest] += pooled_observed
            expected_bins[largest] += pooled_expected
        else:
            observed_bins.append(pooled_observed)
            expected_bins.append(pooled_expected)
        logger.debug(f"Pooled {int(small.sum())} outcomes with expected count < {min_expected}")

    if len(observed_bins) < 2:
        return 0.0, 1.0
    observed_bins = np.asarray(observed_bins)
    expected_bins = np.asarray(expected_bins)
    expected_bins *= observed_bins.sum() / expected_bins.sum()
    chi2, pvalue = stats.chisquare(observed_bins, f_exp=expected_bins)
    return float(chi2), float(pvalue)


def compare_counts(counts_a: Sequence[int], counts_b: Sequence[int],
                   min_expected: Optional[float] = None) -> Tuple[float, float]:
    """Two-sample homogeneity test on outcome counts"""
    min_expected = _simulation_config()["min_expected_count"] if min_expected is None else min_expected
    if len(counts_a) != len(counts_b):
        raise DimensionMismatchError("count vectors differ in length")
    table = np.vstack([np.asarray(counts_a), np.asarray(counts_b)]).astype(float)
    totals = table.sum(axis=0)
    table = table[:, totals > 0]
    totals = totals[totals > 0]
    sparse = totals < 2 * min_expected
    if sparse.any():
        pooled = table[:, sparse].sum(axis=1, keepdims=True)
        table = np.hstack([table[:, ~sparse], pooled])
    if table.shape[1] < 2:
        return 0.0, 1.0
    chi2, pvalue, _, _ = stats.chi2_contingency(table, correction=False)
    return float(chi2), float(pvalue)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Counts per outcome (no-click last) with the Born prediction"""
    d: int
    t: float
    shots: int
    counts: np.ndarray
    expected: np.ndarray
    chi2: float
    pvalue: float

    def passes(self, significance: Optional[float] = None) -> bool:
        significance = _simulation_config()["significance"] if significance is None else significance
        return self.pvalue > significance

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(str(k) for k in range(self.d)) + (NO_CLICK_LABEL,)

    def to_exported(self) -> ExportedCounts:
        return ExportedCounts(
            d=self.d, t=self.t, shots=self.shots,
            counts={label: int(count) for label, count in zip(self.labels, self.counts)},
            expected={label: float(p) for label, p in zip(self.labels, self.expected)},
            chi2=self.chi2, pvalue=self.pvalue,
        )


def simulate_measurement(state: QuantumState, U: MatrixLike, t, n_shots: int, seed: int,
                         threads: Optional[int] = None,
                         chunk_size: Optional[int] = None) -> SimulationResult:
    """Parent sampling followed by the threshold response in basis U"""
    d = state.dim
    unitary = OperatorMatrix.unitary(U)
    if unitary.dim != d:
        raise DimensionMismatchError(f"basis is {unitary.dim}-dimensional, state is {d}-dimensional")
    t = float(Threshold.of(t))
    if n_shots < 1:
        raise ValueError(f"n_shots must be positive, got {n_shots}")
    rule = ThresholdResponse(d, t)

    def task(sampler: SphereSampler, size: int) -> np.ndarray:
        Z = sample_parent_outcomes(state, size, sampler.generator)
        outcomes = rule.assign(Z, unitary)
        return np.bincount(np.where(outcomes == NO_CLICK_INDEX, d, outcomes), minlength=d + 1)

    chunks = run_chunked(task, d, n_shots, seed, stream=SIMULATION_STREAM,
                         threads=threads, chunk_size=chunk_size)
    counts = np.sum(chunks, axis=0)
    expected = expected_distribution(state, unitary, t)
    if n_shots * expected[expected > ZERO_PROBABILITY].min() < _simulation_config()["min_expected_count"]:
        logger.warning(f"{n_shots} shots leave outcomes below the minimum expected count")
    chi2, pvalue = chi_square_test(counts, expected)
    logger.info(f"Simulated {n_shots} shots d={d}, t={t:.4g}: chi2={chi2:.4g}, p-value={pvalue:.4g}")
    return SimulationResult(d=d, t=t, shots=n_shots, counts=counts, expected=expected,
                            chi2=chi2, pvalue=pvalue)
