"""Scalar coefficients: exact Gaussian rationals and complex doubles.

The exact backend stores real scalars as :class:`fractions.Fraction` and
promotes to :class:`GaussianRational` only when an imaginary part appears;
a Gaussian rational whose imaginary part cancels collapses back to a
``Fraction``.  The numeric backend stores everything as ``complex``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

EXACT = "exact"
NUMERIC = "numeric"
BACKENDS = (EXACT, NUMERIC)


class GaussianRational:
    """``re + im*i`` with rational parts.  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def make(re, im):
        """Build a value, collapsing to ``Fraction`` when ``im == 0``."""
        if im == 0:
            return Fraction(re)
        return GaussianRational(re, im)

    def _parts(self):
        return self.re, self.im

    def __add__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        return GaussianRational.make(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        return GaussianRational.make(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        return GaussianRational.make(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = o
        return GaussianRational.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        c, d = o
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero")
        a, b = self.re, self.im
        return GaussianRational.make((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        o = _gauss_parts(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o[0], o[1]) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** -k)
        result = Fraction(1)
        base = self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __abs__(self):
        return math.hypot(self.re, self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        o = _gauss_parts(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_exact(self)


def _gauss_parts(x):
    if isinstance(x, GaussianRational):
        return x.re, x.im
    if isinstance(x, (int, Fraction)):
        return Fraction(x), Fraction(0)
    if isinstance(x, Rational):
        return Fraction(x), Fraction(0)
    return None


Coefficient = Union[Fraction, GaussianRational, complex]


def is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, GaussianRational))


def to_exact(x) -> Fraction | GaussianRational:
    """Coerce ints, strings, Fractions and Gaussian rationals to the exact backend."""
    if isinstance(x, GaussianRational):
        return GaussianRational.make(x.re, x.im)
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, (int, Fraction, str)):
        return Fraction(x)
    if isinstance(x, float):
        # Exact binary value of the float; callers wanting decimal semantics pass a str.
        return Fraction(x)
    if isinstance(x, complex):
        return GaussianRational.make(Fraction(x.real), Fraction(x.imag))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact coefficient")


def to_numeric(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(x)


def coerce(x, backend: str):
    if backend == EXACT:
        return to_exact(x)
    if backend == NUMERIC:
        return to_numeric(x)
    raise ValueError(f"unknown backend {backend!r}")


def backend_of(c) -> str:
    return EXACT if is_exact(c) else NUMERIC


def real_part(c):
    if isinstance(c, GaussianRational):
        return c.re
    if isinstance(c, complex):
        return c.real
    return c


def imag_part(c):
    if isinstance(c, GaussianRational):
        return c.im
    if isinstance(c, complex):
        return c.imag
    return Fraction(0) if is_exact(c) else 0.0


def is_real(c, tol: float = 0.0) -> bool:
    im = imag_part(c)
    if tol and not is_exact(c):
        return abs(im) <= tol
    return im == 0


def magnitude(c) -> float:
    return float(abs(c))


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_exact(c) -> str:
    if isinstance(c, GaussianRational):
        re, im = c.re, c.im
        if re == 0:
            return f"{format_rational(im)}i"
        sign = "-" if im < 0 else "+"
        return f"{format_rational(re)}{sign}{format_rational(abs(im))}i"
    return format_rational(c)


def format_coefficient(c) -> str:
    if is_exact(c):
        return format_exact(c)
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c)


def encode(c) -> tuple:
    """``(re, im)`` as strings on the exact backend, floats on the numeric one."""
    if is_exact(c):
        return format_rational(real_part(c)), format_rational(imag_part(c))
    c = complex(c)
    return c.real, c.imag


def decode(re, im=0):
    """Inverse of :func:`encode`.  String parts select the exact backend."""
    if isinstance(re, str) or isinstance(im, str):
        if not isinstance(re, (str, int)) or not isinstance(im, (str, int)):
            raise ValueError("mixed exact/float coefficient parts")
        return GaussianRational.make(Fraction(re), Fraction(im))
    if isinstance(re, bool) or isinstance(im, bool):
        raise ValueError("bool is not a coefficient")
    if isinstance(re, int) and isinstance(im, int):
        return GaussianRational.make(Fraction(re), Fraction(im))
    return complex(float(re), float(im))
