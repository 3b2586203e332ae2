"""Rational functions of x with numpy Polynomial numerator and denominator."""

from __future__ import annotations

from typing import Union

import numpy as np
from numpy.polynomial import Polynomial

Number = Union[int, float]
Operand = Union["RationalFn", Polynomial, Number]

# Leading coefficients of a sum below this multiple of eps times the operand
# scale are cancellation residue.
LEADING_TRIM = 64 * np.finfo(float).eps


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return Polynomial(value.coef)
    return Polynomial(np.atleast_1d(np.asarray(value, dtype=float)))


def _max_abs(poly: Polynomial) -> float:
    return float(np.max(np.abs(poly.coef)))


def _trim_leading(poly: Polynomial, scale: float) -> Polynomial:
    """Drop high-order coefficients lost to cancellation; lower ones stay as computed."""
    coef = poly.coef
    top = len(coef)
    while top > 1 and abs(coef[top - 1]) <= LEADING_TRIM * scale:
        top -= 1
    return Polynomial(coef[:top])


def _is_zero(poly: Polynomial) -> bool:
    return not np.any(poly.coef)


class RationalFn:
    """
    N(x)/D(x) kept with a monic denominator.

    Normalization cancels powers of x whose coefficients are exactly zero in
    both parts; no general gcd is taken, so equal functions may have different
    representations. Use `equals` to compare.
    """

    def __init__(self, numerator, denominator=1.0, normalize: bool = True):
        num = _as_poly(numerator)
        den = _as_poly(denominator)
        if _is_zero(den):
            raise ZeroDivisionError("RationalFn denominator is identically zero")
        if normalize:
            num, den = self._normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
        if _is_zero(num):
            return Polynomial([0.0]), Polynomial([1.0])
        num, den = num.trim(), den.trim()

        num_coef, den_coef = num.coef, den.coef
        shift = 0
        while (
            shift < len(num_coef) - 1
            and shift < len(den_coef) - 1
            and num_coef[shift] == 0.0
            and den_coef[shift] == 0.0
        ):
            shift += 1
        num_coef, den_coef = num_coef[shift:], den_coef[shift:]

        lead = den_coef[-1]
        return Polynomial(num_coef / lead), Polynomial(den_coef / lead)

    @classmethod
    def constant(cls, value: Number) -> "RationalFn":
        return cls([float(value)])

    @classmethod
    def x(cls) -> "RationalFn":
        return cls([0.0, 1.0])

    @staticmethod
    def _coerce(other: Operand) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        return RationalFn(other)

    def is_zero(self) -> bool:
        return _is_zero(self.num)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.num.degree(), self.den.degree()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        result = self.num(x) / self.den(x)
        return result if np.ndim(result) else float(result)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den, normalize=False)

    def __add__(self, other: Operand) -> "RationalFn":
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if len(self.den.coef) == len(other.den.coef) and np.array_equal(self.den.coef, other.den.coef):
            left, right, den = self.num, other.num, self.den
        else:
            left, right, den = self.num * other.den, other.num * self.den, self.den * other.den
        scale = max(_max_abs(left), _max_abs(right))
        return RationalFn(_trim_leading(left + right, scale), den)

    def __radd__(self, other: Operand) -> "RationalFn":
        return self.__add__(other)

    def __sub__(self, other: Operand) -> "RationalFn":
        return self.__add__(-self._coerce(other))

    def __rsub__(self, other: Operand) -> "RationalFn":
        return self._coerce(other).__add__(-self)

    def __mul__(self, other: Operand) -> "RationalFn":
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalFn.constant(0.0)
        return RationalFn(self.num * other.num, self.den * other.den)

    def __rmul__(self, other: Operand) -> "RationalFn":
        return self.__mul__(other)

    def __truediv__(self, other: Operand) -> "RationalFn":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("Division by an identically zero RationalFn")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Operand) -> "RationalFn":
        return self._coerce(other).__truediv__(self)

    def deriv(self) -> "RationalFn":
        """Quotient rule (N'D - ND') / D^2."""
        left, right = self.num.deriv() * self.den, self.num * self.den.deriv()
        scale = max(_max_abs(left), _max_abs(right))
        return RationalFn(_trim_leading(left - right, scale), self.den * self.den)

    def log_derivative(self) -> "RationalFn":
        """f'/f = (N'D - ND') / (N D) without forming D^2."""
        if self.is_zero():
            raise ZeroDivisionError("Logarithmic derivative of the zero function")
        left, right = self.num.deriv() * self.den, self.num * self.den.deriv()
        scale = max(_max_abs(left), _max_abs(right))
        return RationalFn(_trim_leading(left - right, scale), self.num * self.den)

    def poles(self) -> np.ndarray:
        """Real roots of the denominator, ascending."""
        if self.den.degree() == 0:
            return np.zeros(0)
        roots = self.den.roots()
        real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots))].real
        return np.sort(real)

    def rescaled(self) -> tuple[np.ndarray, np.ndarray]:
        """Numerator and denominator divided by one common factor, max |coefficient| = 1."""
        scale = max(_max_abs(self.num), _max_abs(self.den))
        return self.num.coef / scale, self.den.coef / scale

    def mismatch(self, other: Operand) -> float:
        """max |coef(N1 D2 - N2 D1)| relative to the larger cross product."""
        other = self._coerce(other)
        n1, d1 = (Polynomial(c) for c in self.rescaled())
        n2, d2 = (Polynomial(c) for c in other.rescaled())
        lhs, rhs = n1 * d2, n2 * d1
        scale = max(_max_abs(lhs), _max_abs(rhs))
        if scale == 0:
            return 0.0
        size = max(len(lhs.coef), len(rhs.coef))
        diff = np.pad(lhs.coef, (0, size - len(lhs.coef))) - np.pad(rhs.coef, (0, size - len(rhs.coef)))
        return float(np.max(np.abs(diff)) / scale)

    def equals(self, other: Operand, rtol: float = 1e-8) -> bool:
        return self.mismatch(other) <= rtol

    def __repr__(self) -> str:
        return f"RationalFn(num={self.num.coef.tolist()}, den={self.den.coef.tolist()})"
