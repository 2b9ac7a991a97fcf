# File: src/core/double_double.py
"""Double-double arithmetic built on error-free transformations.

A value is the unevaluated sum hi + lo of two doubles with |lo| <= ulp(hi)/2,
giving roughly 106 bits of significand.  Used by the float64 evaluation
mode to survive the alternating binomial sums.
"""

import math
from typing import Tuple

_SPLITTER = 134217729.0  # 2^27 + 1


def split(a: float) -> Tuple[float, float]:
    """Dekker split: a -> (hi, lo), each with <= 27 significant bits"""
    c = _SPLITTER * a
    big = c - a
    hi = c - big
    return hi, a - hi


def two_sum(a: float, b: float) -> Tuple[float, float]:
    """(s, err) with s + err == a + b exactly"""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: float, b: float) -> Tuple[float, float]:
    """two_sum assuming |a| >= |b|"""
    s = a + b
    return s, b - (s - a)


if hasattr(math, "fma"):
    def two_prod(a: float, b: float) -> Tuple[float, float]:
        """(p, err) with p + err == a * b exactly"""
        p = a * b
        return p, math.fma(a, b, -p)
else:
    def two_prod(a: float, b: float) -> Tuple[float, float]:
        """(p, err) with p + err == a * b exactly"""
        p = a * b
        ahi, alo = split(a)
        bhi, blo = split(b)
        err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
        return p, err


class DoubleDouble(tuple):
    """(hi, lo) pair; immutable"""
    __slots__ = ()

    def __new__(cls, hi: float, lo: float = 0.0) -> 'DoubleDouble':
        return super().__new__(cls, (float(hi), float(lo)))

    @classmethod
    def from_int(cls, n: int) -> 'DoubleDouble':
        """Round an integer to the nearest double-double (exact below 2^106)"""
        hi = float(n)
        return cls(hi, float(n - int(hi)))

    @property
    def hi(self) -> float:
        return self[0]

    @property
    def lo(self) -> float:
        return self[1]

    def __add__(self, other) -> 'DoubleDouble':
        if not isinstance(other, DoubleDouble):
            other = DoubleDouble(other)
        s, e = two_sum(self[0], other[0])
        t, f = two_sum(self[1], other[1])
        e += t
        s, e = quick_two_sum(s, e)
        e += f
        return DoubleDouble(*quick_two_sum(s, e))

    __radd__ = __add__

    def __neg__(self) -> 'DoubleDouble':
        return DoubleDouble(-self[0], -self[1])

    def __sub__(self, other) -> 'DoubleDouble':
        if not isinstance(other, DoubleDouble):
            other = DoubleDouble(other)
        return self + (-other)

    def __mul__(self, other) -> 'DoubleDouble':
        if not isinstance(other, DoubleDouble):
            other = DoubleDouble(other)
        p, e = two_prod(self[0], other[0])
        e += self[0] * other[1] + self[1] * other[0]
        return DoubleDouble(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'DoubleDouble':
        if not isinstance(other, DoubleDouble):
            other = DoubleDouble(other)
        q1 = self[0] / other[0]
        r = self - other * DoubleDouble(q1)
        q2 = r[0] / other[0]
        r = r - other * DoubleDouble(q2)
        q3 = r[0] / other[0]
        s, e = quick_two_sum(q1, q2)
        return DoubleDouble(s, e) + q3

    def __pow__(self, exponent: int) -> 'DoubleDouble':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = DoubleDouble(1.0)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __float__(self) -> float:
        return self[0] + self[1]

    def __repr__(self) -> str:
        return f"DoubleDouble(hi={self[0]:.17g}, lo={self[1]:.17g})"


def dd_sum(values) -> DoubleDouble:
    """Compensated sum of double-double terms"""
    total = DoubleDouble(0.0)
    for value in values:
        total = total + value
    return total
