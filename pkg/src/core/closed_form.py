# File: src/core/closed_form.py
"""Closed-form A_d(t), T_d(t) and the boundary curve of JM_d.

    T_d(t) = d   sum_m C(d-1,m) (-1)^(d-1-m) (t(m+1)-1)^(d-1) / (m+1)
    A_d(t) =     sum_m C(d-1,m) (-1)^(d-1-m) ((d-1)t(m+1)+1) (t(m+1)-1)^(d-1) / (m+1)^2

with m running from 0 to min(floor(1/t - 1), d - 1) (d - 1 when t = 0).

The sums alternate and the binomials reach ~1e8 for d = 30, so naive double
summation loses most digits.  Three modes are offered:

* float64   - double-double error-free transformations, one final rounding
* extended  - mpmath at a configurable number of decimal digits
* exact     - fractions.Fraction (ground truth)
"""

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional, Tuple, Union
import logging

import mpmath

from core.data_models import BoundarySample, Dimension, Threshold
from core.double_double import DoubleDouble, dd_sum, two_prod
from core.errors import DegenerateEndpointError
from utils.config_manager import get_config

logger = logging.getLogger(__name__)


def _working_dps(dps: Optional[int]) -> int:
    return int(get_config()["closed_form"]["extended_dps"]) if dps is None else int(dps)


class EvalMode(Enum):
    FLOAT64 = "float64"
    EXTENDED = "extended"
    EXACT = "exact"

    @classmethod
    def of(cls, value: Union['EvalMode', str]) -> 'EvalMode':
        return value if isinstance(value, cls) else cls(value)


ThresholdLike = Union[Threshold, float, int, Fraction, str]


def _exact_threshold(t: ThresholdLike, mode: EvalMode) -> Fraction:
    """Exact rational value of the given threshold"""
    if isinstance(t, Threshold):
        t = t.t
    if isinstance(t, bool):
        raise TypeError("threshold must be numeric")
    if isinstance(t, float):
        if mode is EvalMode.EXACT:
            raise ValueError("exact mode needs t as a ratio of integers; "
                             "pass Fraction(t) to use the binary value of a float")
        t_exact = Fraction(t)
    elif isinstance(t, (int, Fraction, str)):
        t_exact = Fraction(t)
    elif isinstance(t, mpmath.mpf):
        mantissa, exponent = t.man_exp
        t_exact = Fraction(mantissa) * Fraction(2) ** exponent
    else:
        t_exact = Fraction(float(t))
    if not 0 <= t_exact <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return t_exact


def upper_limit(d: int, t: Fraction) -> int:
    """min(floor(1/t - 1), d - 1), or d - 1 at t = 0"""
    if t == 0:
        return d - 1
    return min((t.denominator - t.numerator) // t.numerator, d - 1)


def _sign(d: int, m: int) -> int:
    return -1 if (d - 1 - m) % 2 else 1


@lru_cache(maxsize=65536)
def _float64_terms(d: int, t: float, m_max: int) -> Tuple[DoubleDouble, DoubleDouble]:
    """(T, A) as double-doubles"""
    terms_T = []
    terms_A = []
    for m in range(m_max + 1):
        k = m + 1
        base = DoubleDouble(*two_prod(t, float(k))) - 1.0
        power = base ** (d - 1)
        coefficient = DoubleDouble.from_int(_sign(d, m) * comb(d - 1, m))
        scaled = coefficient * power
        weight = DoubleDouble(*two_prod(t, float((d - 1) * k))) + 1.0
        terms_T.append(scaled / float(k))
        terms_A.append(scaled * weight / float(k * k))
    return dd_sum(terms_T) * float(d), dd_sum(terms_A)


def _extended_terms(d: int, t: Fraction, m_max: int, dps: int):
    with mpmath.workdps(dps):
        tt = mpmath.mpf(t.numerator) / t.denominator
        terms_T = []
        terms_A = []
        for m in range(m_max + 1):
            k = m + 1
            power = (tt * k - 1) ** (d - 1)
            scaled = _sign(d, m) * comb(d - 1, m) * power
            terms_T.append(scaled / k)
            terms_A.append(scaled * ((d - 1) * tt * k + 1) / (k * k))
        return d * mpmath.fsum(terms_T), mpmath.fsum(terms_A)


@lru_cache(maxsize=4096)
def _exact_terms(d: int, t: Fraction, m_max: int) -> Tuple[Fraction, Fraction]:
    T = Fraction(0)
    A = Fraction(0)
    for m in range(m_max + 1):
        k = m + 1
        scaled = _sign(d, m) * comb(d - 1, m) * (t * k - 1) ** (d - 1)
        T += scaled / k
        A += scaled * ((d - 1) * t * k + 1) / (k * k)
    return d * T, A


def _raw_pair(d: int, t: ThresholdLike, mode: EvalMode, dps: Optional[int]):
    """(T, A) in the mode's native number type (DoubleDouble for float64)"""
    d = Dimension(d)
    t_exact = _exact_threshold(t, mode)
    m_max = upper_limit(d, t_exact)
    if mode is EvalMode.FLOAT64:
        return _float64_terms(int(d), float(t_exact), m_max)
    if mode is EvalMode.EXTENDED:
        return _extended_terms(int(d), t_exact, m_max, _working_dps(dps))
    return _exact_terms(int(d), t_exact, m_max)


def _finish(value, mode: EvalMode):
    return float(value) if mode is EvalMode.FLOAT64 else value


def eval_T(d: int, t: ThresholdLike, mode: Union[EvalMode, str] = EvalMode.FLOAT64,
           dps: Optional[int] = None):
    """Total click weight T_d(t) = A_d(t) + B_d(t), the efficiency at threshold t"""
    mode = EvalMode.of(mode)
    return _finish(_raw_pair(d, t, mode, dps)[0], mode)


def eval_A(d: int, t: ThresholdLike, mode: Union[EvalMode, str] = EvalMode.FLOAT64,
           dps: Optional[int] = None):
    """Weight A_d(t) = tr N_k |k><k| of the correct click"""
    mode = EvalMode.of(mode)
    return _finish(_raw_pair(d, t, mode, dps)[1], mode)


def eval_B(d: int, t: ThresholdLike, mode: Union[EvalMode, str] = EvalMode.FLOAT64,
           dps: Optional[int] = None):
    mode = EvalMode.of(mode)
    T, A = _raw_pair(d, t, mode, dps)
    return _finish(T - A, mode)


def _visibility_from(d: int, T, A, mode: EvalMode, dps: int):
    if mode is EvalMode.EXTENDED:
        with mpmath.workdps(dps):
            return (d * A - T) / ((d - 1) * T)
    if mode is EvalMode.FLOAT64:
        return float((A * float(d) - T) / (T * float(d - 1)))
    return (d * A - T) / ((d - 1) * T)


def _native_threshold(t: ThresholdLike, mode: EvalMode, dps: int):
    t_exact = _exact_threshold(t, mode)
    if mode is EvalMode.FLOAT64:
        return float(t_exact)
    if mode is EvalMode.EXTENDED:
        with mpmath.workdps(dps):
            return mpmath.mpf(t_exact.numerator) / t_exact.denominator
    return t_exact


def boundary_point(d: int, t: ThresholdLike, mode: Union[EvalMode, str] = EvalMode.FLOAT64,
                   dps: Optional[int] = None) -> BoundarySample:
    """(t, eta, p) on the boundary of JM_d"""
    mode = EvalMode.of(mode)
    dps = _working_dps(dps)
    d = Dimension(d)
    if _exact_threshold(t, mode) == 1:
        raise DegenerateEndpointError("t = 1 gives eta = 0 and an undefined visibility")
    T, A = _raw_pair(d, t, mode, dps)
    if float(T) <= 0:
        raise DegenerateEndpointError(f"T_{d}({t}) = 0, visibility undefined")
    p = _visibility_from(d, T, A, mode, dps)
    return BoundarySample(t=_native_threshold(t, mode, dps), eta=_finish(T, mode), p=p)


def visibility(d: int, t: ThresholdLike, mode: Union[EvalMode, str] = EvalMode.FLOAT64,
               dps: Optional[int] = None):
    """p(t) of the boundary curve"""
    return boundary_point(d, t, mode, dps).p


def simple_regime_eta(d: int, p: float) -> float:
    """d (1-p)^(d-1), the boundary efficiency for p > 1/2"""
    d = Dimension(d)
    if not 0.5 < p <= 1:
        raise ValueError(f"simple regime needs 1/2 < p <= 1, got {p}")
    return d * (1.0 - p) ** (d - 1)


def povm_bound_eta(d: int, p: float) -> float:
    """(1-p)^d: sufficient-only compatibility bound for all POVMs"""
    d = Dimension(d)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return (1.0 - p) ** d


@lru_cache(maxsize=None)
def harmonic(d: int) -> Fraction:
    """Exact harmonic number H_d"""
    if d < 1:
        raise ValueError(f"harmonic number needs d >= 1, got {d}")
    return sum((Fraction(1, k) for k in range(1, d + 1)), Fraction(0))


def unit_efficiency_visibility(d: int) -> Fraction:
    """p0(d) = (H_d - 1)/(d - 1), the visibility of the eta = 1 corner"""
    d = Dimension(d)
    return (harmonic(d) - 1) / (d - 1)
