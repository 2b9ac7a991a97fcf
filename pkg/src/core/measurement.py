# File: src/core/measurement.py
"""Noisified PVMs, the analytic simulated POVM and quantum states"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union
import logging

import numpy as np

from core.closed_form import boundary_point, eval_A, eval_T
from core.data_models import (Dimension, NoiseParams, OperatorMatrix, Outcome, Threshold,
                              validate_povm)
from core.errors import DegenerateEndpointError, DimensionMismatchError
from utils.config_manager import TOLERANCES

logger = logging.getLogger(__name__)

MatrixLike = Union[OperatorMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density operator: Hermitian, PSD, unit trace"""
    rho: OperatorMatrix

    def __post_init__(self):
        rho = self.rho if isinstance(self.rho, OperatorMatrix) else OperatorMatrix(self.rho)
        if not rho.is_hermitian():
            raise ValueError("density operator must be Hermitian")
        if not rho.is_psd():
            raise ValueError("density operator must be positive semidefinite")
        trace = np.trace(rho.entries)
        if abs(trace - 1.0) > TOLERANCES["trace"]:
            raise ValueError(f"density operator must have unit trace, got {trace.real!r}")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.dim

    @cached_property
    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """(probabilities, eigenvectors as columns), negatives clipped"""
        hermitian_part = 0.5 * (self.rho.entries + self.rho.entries.conj().T)
        values, vectors = np.linalg.eigh(hermitian_part)
        values = np.clip(values.real, 0.0, None)
        return values / values.sum(), vectors

    @classmethod
    def maximally_mixed(cls, d: int) -> 'QuantumState':
        d = Dimension(d)
        return cls(OperatorMatrix(np.eye(d, dtype=complex) / d))

    @classmethod
    def pure(cls, vector) -> 'QuantumState':
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls(OperatorMatrix(np.outer(vector, vector.conj())))

    @classmethod
    def basis(cls, k: int, d: int) -> 'QuantumState':
        vector = np.zeros(Dimension(d), dtype=complex)
        vector[k] = 1.0
        return cls.pure(vector)

    def rotated(self, unitary: MatrixLike) -> 'QuantumState':
        """U rho U^dagger"""
        U = OperatorMatrix.unitary(unitary).entries
        return QuantumState(OperatorMatrix(U @ self.rho.entries @ U.conj().T))


@dataclass(frozen=True, eq=False)
class NoisyPvm:
    """d click elements followed by the no-click element"""
    d: int
    U: OperatorMatrix
    params: NoiseParams
    elements: Tuple[OperatorMatrix, ...]

    def __post_init__(self):
        if len(self.elements) != self.d + 1:
            raise DimensionMismatchError(
                f"expected {self.d + 1} elements, got {len(self.elements)}")

    def element(self, outcome: Outcome) -> OperatorMatrix:
        return self.elements[self.d if outcome.is_no_click else outcome.index]

    @property
    def no_click(self) -> OperatorMatrix:
        return self.elements[self.d]

    def max_norm_distance(self, other: 'NoisyPvm') -> float:
        if other.d != self.d:
            raise DimensionMismatchError(f"dimensions {self.d} and {other.d} differ")
        return max(a.max_norm_distance(b) for a, b in zip(self.elements, other.elements))


def basis_projectors(U: MatrixLike) -> np.ndarray:
    """Stack of M_{a|U} = U^dagger |a><a| U"""
    entries = OperatorMatrix.unitary(U).entries
    return np.einsum("ai,aj->aij", entries.conj(), entries)


def make_noisy_pvm(d: int, U: MatrixLike, params: NoiseParams) -> NoisyPvm:
    """eta p M_{a|U} + eta (1-p) 1/d for clicks, (1-eta) 1 for no click"""
    d = Dimension(d)
    unitary = OperatorMatrix.unitary(U)
    if unitary.dim != d:
        raise DimensionMismatchError(f"basis unitary is {unitary.dim}x{unitary.dim}, expected d={d}")
    identity = np.eye(d, dtype=complex)
    eta, p = params.eta, params.p
    clicks = [eta * p * projector + eta * (1 - p) * identity / d
              for projector in basis_projectors(unitary)]
    elements = tuple(OperatorMatrix.positive(m) for m in clicks)
    elements += (OperatorMatrix.positive((1 - eta) * identity),)
    return NoisyPvm(d=int(d), U=unitary, params=params, elements=elements)


def simulated_params(d: int, t) -> NoiseParams:
    """(eta, p) reached by threshold t; t = 1 never clicks"""
    try:
        sample = boundary_point(d, t)
    except DegenerateEndpointError:
        return NoiseParams(0.0, 0.0)
    return NoiseParams(min(max(float(sample.eta), 0.0), 1.0), min(max(float(sample.p), 0.0), 1.0))


def analytic_simulated_povm(d: int, t) -> NoisyPvm:
    """N_k = A|k><k| + B(1 - |k><k|)/(d-1), N_no-click = (1 - T) 1; t in [0, 1)"""
    d = Dimension(d)
    if float(Threshold.of(t)) == 1.0:
        raise DegenerateEndpointError("t = 1 never clicks; the simulated POVM is degenerate")
    params = simulated_params(d, t)
    T = eval_T(d, t)
    A = eval_A(d, t)
    B = T - A
    identity = np.eye(d, dtype=complex)
    elements = []
    for k in range(d):
        projector = np.zeros((d, d), dtype=complex)
        projector[k, k] = 1.0
        elements.append(OperatorMatrix.positive(A * projector + B * (identity - projector) / (d - 1)))
    elements.append(OperatorMatrix.positive((1 - T) * identity))
    return NoisyPvm(d=int(d), U=OperatorMatrix.identity(d), params=params, elements=tuple(elements))


def outcome_distribution(pvm: NoisyPvm, state: QuantumState) -> np.ndarray:
    """Born probabilities tr(rho M_a), no-click last"""
    if state.dim != pvm.d:
        raise DimensionMismatchError(f"state dimension {state.dim} != measurement dimension {pvm.d}")
    rho = state.rho.entries
    probabilities = np.array([np.trace(rho @ element.entries).real for element in pvm.elements])
    if abs(probabilities.sum() - 1.0) > TOLERANCES["algebraic"]:
        logger.warning(f"outcome probabilities sum to {probabilities.sum()!r}")
    return probabilities


def is_valid_pvm(pvm: NoisyPvm) -> bool:
    return validate_povm(pvm.elements)


def haar_unitary(d: int, rng: np.random.Generator) -> OperatorMatrix:
    """QR of a complex Ginibre matrix with the phases of R's diagonal fixed"""
    d = Dimension(d)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return OperatorMatrix.unitary(q * phases)


def random_state(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> QuantumState:
    """Normalized Wishart state, full rank by default"""
    d = Dimension(d)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return QuantumState(OperatorMatrix(rho / np.trace(rho).real))
