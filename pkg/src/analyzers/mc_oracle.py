# File: src/analyzers/mc_oracle.py
"""Monte-Carlo estimates of T_d(t), A_d(t) and the simulated POVM"""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union
import logging

import numpy as np

from analyzers.sphere_sampler import SphereSampler, run_chunked
from core.data_models import Dimension, Threshold
from responses.base_response import NO_CLICK_INDEX
from responses.threshold_response import ThresholdResponse
from utils.config_manager import get_config

logger = logging.getLogger(__name__)

Value = Union[float, np.ndarray]


def min_samples() -> int:
    return int(get_config()["monte_carlo"]["min_samples"])


def default_n_sigma() -> float:
    return float(get_config()["monte_carlo"]["n_sigma"])


@dataclass(frozen=True, eq=False)
class McEstimate:
    """Sample mean with its standard error (scalars or d x d matrices)

    resolution is the shift a single sample can cause (bound on |x| over n).
    Rare events with few or no hits have a sample error below it, so
    comparisons never use less than the resolution.
    """
    mean: Value
    std_error: Value
    n_samples: int
    resolution: float = 0.0

    def __post_init__(self):
        required = min_samples()
        if self.n_samples < required:
            raise ValueError(f"an estimate needs >= {required} samples, got {self.n_samples}")
        if np.any(np.asarray(self.std_error) < 0):
            raise ValueError("standard error must be non-negative")
        if self.resolution < 0:
            raise ValueError("resolution must be non-negative")

    @property
    def effective_error(self) -> Value:
        """Standard error floored at the single-sample resolution"""
        return np.maximum(np.asarray(self.std_error, dtype=float), self.resolution)

    def deviation(self, expected: Value) -> Value:
        return np.abs(np.asarray(self.mean) - np.asarray(expected))

    def agrees_with(self, expected: Value, n_sigma: Optional[float] = None,
                    atol: float = 1e-12) -> bool:
        """|mean - expected| <= n_sigma * effective_error (entrywise)"""
        n_sigma = default_n_sigma() if n_sigma is None else n_sigma
        return bool(np.all(self.deviation(expected) <= n_sigma * self.effective_error + atol))

    def max_sigmas(self, expected: Value) -> float:
        """Largest deviation in units of the effective error"""
        deviation = np.atleast_1d(self.deviation(expected))
        error = np.atleast_1d(self.effective_error)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(error > 0, deviation / np.where(error > 0, error, 1.0),
                             np.where(deviation > 1e-12, np.inf, 0.0))
        return float(np.max(ratio))


@dataclass
class _Sums:
    """Running sum, sum of |x|^2 and count; reduction is associative"""
    total: Value
    total_sq: Value
    count: int

    def __add__(self, other: '_Sums') -> '_Sums':
        return _Sums(self.total + other.total, self.total_sq + other.total_sq,
                     self.count + other.count)


def _estimate(sums: _Sums, bound: float) -> McEstimate:
    """bound: largest |x| a single sample can contribute"""
    n = sums.count
    mean = sums.total / n
    variance = np.maximum(sums.total_sq / n - np.abs(mean) ** 2, 0.0)
    if n > 1:
        variance = variance * n / (n - 1)
    std_error = np.sqrt(variance / n)
    resolution = float(bound) / n
    if np.ndim(mean) == 0:
        return McEstimate(float(np.real_if_close(mean)), float(std_error), n, resolution)
    return McEstimate(mean, std_error, n, resolution)


def _reduce(parts) -> _Sums:
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def _check_inputs(d: int, t, n_samples: int) -> Tuple[int, float]:
    d = Dimension(d)
    t = float(Threshold.of(t))
    required = min_samples()
    if n_samples < required:
        raise ValueError(f"n_samples must be >= {required}, got {n_samples}")
    return int(d), t


def _scalar_estimate(d: int, t, n_samples: int, seed: int, weighted: bool,
                     threads: Optional[int], chunk_size: Optional[int]) -> McEstimate:
    d, t = _check_inputs(d, t, n_samples)
    rule = ThresholdResponse(d, t)

    def task(sampler: SphereSampler, size: int) -> _Sums:
        Z = sampler.draw(size)
        moduli = np.abs(Z) ** 2
        values = d * (rule._assign(Z, moduli, None) == 0).astype(float)
        if weighted:
            values *= moduli[:, 0]
        return _Sums(float(values.sum()), float(np.dot(values, values)), size)

    return _estimate(_reduce(run_chunked(task, d, n_samples, seed, threads=threads,
                                         chunk_size=chunk_size)), bound=d)


def estimate_T(d: int, t, n_samples: int, seed: int, threads: Optional[int] = None,
               chunk_size: Optional[int] = None) -> McEstimate:
    """Mean of d * Theta_0^t(z) over the invariant measure"""
    estimate = _scalar_estimate(d, t, n_samples, seed, False, threads, chunk_size)
    logger.debug(f"MC T_{d}({float(t):.4g}) = {estimate.mean:.6g} +- {estimate.std_error:.2g}")
    return estimate


def estimate_A(d: int, t, n_samples: int, seed: int, threads: Optional[int] = None,
               chunk_size: Optional[int] = None) -> McEstimate:
    """Mean of d * Theta_0^t(z) |z_0|^2 over the invariant measure"""
    estimate = _scalar_estimate(d, t, n_samples, seed, True, threads, chunk_size)
    logger.debug(f"MC A_{d}({float(t):.4g}) = {estimate.mean:.6g} +- {estimate.std_error:.2g}")
    return estimate


@dataclass(frozen=True, eq=False)
class PovmReconstruction:
    """Estimates of N_0..N_{d-1}, N_no-click and of their sum"""
    elements: Tuple[McEstimate, ...]
    total: McEstimate

    def __iter__(self) -> Iterator[McEstimate]:
        return iter(self.elements)

    def __getitem__(self, index: int) -> McEstimate:
        return self.elements[index]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def no_click(self) -> McEstimate:
        return self.elements[-1]


def reconstruct_simulated_povm(d: int, t, n_samples: int, seed: int,
                               threads: Optional[int] = None,
                               chunk_size: Optional[int] = None) -> PovmReconstruction:
    """N_a = d E[Theta_a^t(z) |z><z|] for every outcome, entrywise errors"""
    d, t = _check_inputs(d, t, n_samples)
    if n_samples < 10 * min_samples():
        raise ValueError(f"POVM reconstruction needs >= {10 * min_samples()} samples")
    rule = ThresholdResponse(d, t)

    def task(sampler: SphereSampler, size: int):
        Z = sampler.draw(size)
        moduli = np.abs(Z) ** 2
        outcomes = rule._assign(Z, moduli, None)
        parts = []
        for label in list(range(d)) + [NO_CLICK_INDEX]:
            mask = outcomes == label
            Zm, Mm = Z[mask], moduli[mask]
            parts.append(_Sums(d * (Zm.T @ Zm.conj()), d * d * (Mm.T @ Mm), size))
        parts.append(_Sums(d * (Z.T @ Z.conj()), d * d * (moduli.T @ moduli), size))
        return parts

    chunks = run_chunked(task, d, n_samples, seed, threads=threads, chunk_size=chunk_size)
    estimates = [_estimate(_reduce([chunk[i] for chunk in chunks]), bound=d) for i in range(d + 2)]
    logger.info(f"Reconstructed simulated POVM d={d}, t={t:.4g} from {n_samples} samples")
    return PovmReconstruction(elements=tuple(estimates[:-1]), total=estimates[-1])
