# File: src/core/data_models.py
"""Immutable value types shared by every module"""

from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, Optional, Sequence, Union
import json

import numpy as np

from core.errors import DimensionMismatchError
from utils.config_manager import TOLERANCES

Real = Union[int, float, Fraction]

NO_CLICK_LABEL = "ø"


class Dimension(int):
    """Hilbert-space dimension d >= 2 (d = 1 has no incompatibility)"""

    def __new__(cls, value: int) -> 'Dimension':
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"dimension must be an integer, got {value!r}")
        if value < 2:
            raise ValueError(f"dimension must be >= 2, got {value}")
        return super().__new__(cls, int(value))


def _check_unit_interval(name: str, value: Real):
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class NoiseParams:
    """Efficiency eta and visibility p of a noisified measurement"""
    eta: float
    p: float

    def __post_init__(self):
        _check_unit_interval("eta", self.eta)
        _check_unit_interval("p", self.p)

    def to_dict(self) -> Dict[str, float]:
        return {"eta": float(self.eta), "p": float(self.p)}


@dataclass(frozen=True)
class Threshold:
    """Click threshold t in [0, 1] of the response rule"""
    t: Real

    def __post_init__(self):
        _check_unit_interval("t", self.t)

    @classmethod
    def of(cls, value: Union['Threshold', Real]) -> 'Threshold':
        return value if isinstance(value, cls) else cls(value)

    def __float__(self) -> float:
        return float(self.t)


def _frozen_array(values, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ComplexUnitVector:
    """Point z of the complex unit sphere, the parent-POVM outcome"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen_array(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.size < 2:
            raise ValueError("amplitudes must be a vector of length >= 2")
        norm_sq = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm_sq - 1.0) > TOLERANCES["normalization"]:
            raise ValueError(f"vector is not normalized: |z|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, values: Iterable[complex]) -> 'ComplexUnitVector':
        """Normalizing constructor"""
        array = np.asarray(list(values), dtype=complex)
        norm = np.linalg.norm(array)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(array / norm)

    @classmethod
    def basis(cls, k: int, d: int) -> 'ComplexUnitVector':
        vector = np.zeros(Dimension(d), dtype=complex)
        vector[k] = 1.0
        return cls(vector)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def moduli_squared(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


HERMITIAN = "hermitian"
PSD = "psd"
UNITARY = "unitary"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """d x d complex matrix, optionally tagged hermitian / psd / unitary.

    Tags are checked once at construction, so a tagged instance is a
    certificate of the property.
    """
    entries: np.ndarray
    tags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        entries = _frozen_array(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "tags", frozenset(self.tags))
        if HERMITIAN in self.tags and not self.is_hermitian():
            raise ValueError("operator tagged hermitian is not hermitian")
        if PSD in self.tags and not self.is_psd():
            raise ValueError("operator tagged psd has a negative eigenvalue")
        if UNITARY in self.tags and not self.is_unitary():
            raise ValueError("operator tagged unitary is not unitary")

    @classmethod
    def hermitian(cls, entries) -> 'OperatorMatrix':
        return cls(entries, frozenset({HERMITIAN}))

    @classmethod
    def positive(cls, entries) -> 'OperatorMatrix':
        return cls(entries, frozenset({HERMITIAN, PSD}))

    @classmethod
    def unitary(cls, entries) -> 'OperatorMatrix':
        if isinstance(entries, OperatorMatrix):
            if UNITARY in entries.tags:
                return entries
            entries = entries.entries
        return cls(entries, frozenset({UNITARY}))

    @classmethod
    def identity(cls, d: int) -> 'OperatorMatrix':
        return cls(np.eye(Dimension(d), dtype=complex), frozenset({HERMITIAN, PSD, UNITARY}))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES["hermitian"] if tol is None else tol
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def is_psd(self, tol: Optional[float] = None) -> bool:
        """Smallest eigenvalue of the Hermitian part"""
        tol = TOLERANCES["psd"] if tol is None else tol
        hermitian_part = 0.5 * (self.entries + self.entries.conj().T)
        return bool(np.linalg.eigvalsh(hermitian_part)[0] >= -tol)

    def is_unitary(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES["unitary"] if tol is None else tol
        product = self.entries @ self.entries.conj().T
        return bool(np.max(np.abs(product - np.eye(self.dim))) <= tol)

    def max_norm_distance(self, other: Union['OperatorMatrix', np.ndarray]) -> float:
        other_entries = other.entries if isinstance(other, OperatorMatrix) else np.asarray(other)
        if other_entries.shape != self.entries.shape:
            raise DimensionMismatchError(
                f"shapes {self.entries.shape} and {other_entries.shape} differ")
        return float(np.max(np.abs(self.entries - other_entries)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class Outcome:
    """Click index in {0..d-1}, or None for the no-click symbol"""
    index: Optional[int] = None

    def __post_init__(self):
        if self.index is not None and self.index < 0:
            raise ValueError(f"outcome index must be >= 0, got {self.index}")

    @classmethod
    def click(cls, index: int, d: int) -> 'Outcome':
        if not 0 <= index < d:
            raise ValueError(f"outcome {index} out of range for d={d}")
        return cls(int(index))

    @property
    def is_no_click(self) -> bool:
        return self.index is None

    @property
    def label(self) -> str:
        return NO_CLICK_LABEL if self.index is None else str(self.index)


NO_CLICK = Outcome(None)


@dataclass(frozen=True)
class BoundarySample:
    """Point (t, eta, p) of the boundary curve"""
    t: Any
    eta: Any
    p: Any

    def satisfies_invariant(self, d: int, tol: Optional[float] = None) -> bool:
        """eta = T_d(t) and p = (d A_d(t) - T_d(t)) / ((d-1) T_d(t))"""
        from core.closed_form import eval_A, eval_T

        tol = TOLERANCES["algebraic"] if tol is None else tol
        t = float(self.t)
        T = eval_T(d, t)
        if T <= 0:
            return False
        A = eval_A(d, t)
        p = (d * A - T) / ((d - 1) * T)
        return abs(float(self.eta) - T) <= tol and abs(float(self.p) - p) <= tol

    def to_dict(self) -> Dict[str, float]:
        return {"t": float(self.t), "eta": float(self.eta), "p": float(self.p)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BoundarySample':
        return cls(t=float(data["t"]), eta=float(data["eta"]), p=float(data["p"]))


def _as_entries(element) -> np.ndarray:
    if isinstance(element, OperatorMatrix):
        return element.entries
    return np.asarray(element, dtype=complex)


def validate_povm(elements: Sequence[Union[OperatorMatrix, np.ndarray]]) -> bool:
    """True iff every element is PSD and the elements sum to the identity"""
    if not elements:
        raise ValueError("a POVM needs at least one element")
    matrices = [_as_entries(element) for element in elements]
    shape = matrices[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatchError(f"POVM elements must be square, got {shape}")
    for matrix in matrices[1:]:
        if matrix.shape != shape:
            raise DimensionMismatchError(
                f"POVM elements have mismatched shapes {shape} and {matrix.shape}")

    for matrix in matrices:
        if not OperatorMatrix(matrix).is_psd(TOLERANCES["psd"]):
            return False
    total = np.sum(matrices, axis=0)
    return bool(np.max(np.abs(total - np.eye(shape[0]))) <= TOLERANCES["povm_sum"])


@dataclass
class ExportedCounts:
    """Empirical outcome counts of a simulation run, JSON-serializable"""
    d: int
    t: float
    shots: int
    counts: Dict[str, int]
    expected: Dict[str, float]
    chi2: float
    pvalue: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def save(self, filepath: str):
        """Save counts to file"""
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.to_json())
