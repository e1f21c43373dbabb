"""Dense univariate polynomials over a field of scalars."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coefficients import format_coefficient, is_exact


class Poly:
    """Coefficients stored lowest degree first; trailing zeros stripped.

    Coefficients may be any field elements (``Fraction``,
    ``GaussianRational``, ``complex``).  Division is exact only over an exact
    field.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = ()):
        c = [Fraction(a) if isinstance(a, int) and not isinstance(a, bool) else a for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, a):
        return cls([a])

    @classmethod
    def t(cls):
        return cls([Fraction(0), Fraction(1)])

    @classmethod
    def linear_root(cls, lam):
        """``t - lam``."""
        return cls([-lam, Fraction(1)])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lead(self):
        return self.c[-1] if self.c else Fraction(0)

    def __getitem__(self, k):
        return self.c[k] if 0 <= k < len(self.c) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if other == 0:
            return not self.c
        return self.c == (other,)

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        n = max(len(self.c), len(other.c))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([a * other for a in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly([Fraction(1)])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dq = other.degree
        lc = other.lead()
        if len(rem) - 1 < dq:
            return Poly(), Poly(rem)
        quot = [0] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            q = rem[k + dq] / lc
            quot[k] = q
            if q != 0:
                for j, b in enumerate(other.c):
                    rem[k + j] -= q * b
        return Poly(quot), Poly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "Poly":
        if not self.c:
            return self
        lc = self.lead()
        return Poly([a / lc for a in self.c])

    def derivative(self) -> "Poly":
        return Poly([k * a for k, a in enumerate(self.c)][1:])

    def __call__(self, x):
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def __repr__(self):
        return f"Poly({list(self.c)!r})"

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if a == 0:
                continue
            cs = format_coefficient(a)
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if mono and cs == "1":
                parts.append(mono)
            elif mono and cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(cs + ("*" + mono if mono else ""))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def xgcd(a: Poly, b: Poly):
    """Return ``(g, u, v)`` with ``u*a + v*b == g`` and ``g`` monic (or zero).

    Each remainder is normalized to be monic before the next division step,
    which keeps the rational coefficients from growing needlessly.
    """
    r0, r1 = a, b
    u0, u1 = Poly([Fraction(1)]), Poly()
    v0, v1 = Poly(), Poly([Fraction(1)])
    if not r0.is_zero():
        lc = r0.lead()
        r0, u0, v0 = r0 * (1 / lc), u0 * (1 / lc), v0 * (1 / lc)
    while not r1.is_zero():
        lc = r1.lead()
        r1, u1, v1 = r1 * (1 / lc), u1 * (1 / lc), v1 * (1 / lc)
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    return r0, u0, v0


def gcd(a: Poly, b: Poly) -> Poly:
    return xgcd(a, b)[0]


def squarefree_part(p: Poly) -> Poly:
    g = gcd(p, p.derivative())
    return p.exact_div(g).monic() if g.degree > 0 else p.monic()


def sturm_real_root_count(p: Poly) -> int:
    """Number of distinct real roots of ``p`` (exact rational coefficients)."""
    if p.degree <= 0:
        return 0
    p = squarefree_part(p)
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r)

    def sign_changes(values):
        signs = [v > 0 for v in values if v != 0]
        return sum(1 for x, y in zip(signs, signs[1:]) if x != y)

    # Sign pattern at -inf / +inf from leading terms.
    at_pos = [q.lead() for q in seq]
    at_neg = [q.lead() * (-1 if q.degree % 2 else 1) for q in seq]
    return sign_changes(at_neg) - sign_changes(at_pos)


def rational_roots(p: Poly) -> list:
    """Distinct rational roots of a polynomial with rational coefficients."""
    if p.degree <= 0:
        return []
    if not all(isinstance(a, (int, Fraction)) for a in p.c):
        raise TypeError("rational_roots needs rational coefficients")
    from math import gcd as igcd, isqrt

    den = 1
    for a in p.c:
        den = den * Fraction(a).denominator // igcd(den, Fraction(a).denominator)
    ints = [int(Fraction(a) * den) for a in p.c]
    roots = []
    # Strip zero roots first.
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.append(Fraction(0))
    ints = ints[k:]
    a0, an = abs(ints[0]), abs(ints[-1])
    if len(ints) == 1:
        return roots

    def divisors(n):
        out = set()
        for d in range(1, isqrt(n) + 1):
            if n % d == 0:
                out.add(d)
                out.add(n // d)
        return out

    q = Poly([Fraction(x) for x in ints])
    for num in sorted(divisors(a0)):
        for dd in sorted(divisors(an)):
            for cand in (Fraction(num, dd), Fraction(-num, dd)):
                if cand not in roots and q(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def root_multiplicity(p: Poly, lam) -> int:
    lin = Poly.linear_root(lam)
    k = 0
    while not p.is_zero() and p(lam) == 0:
        p = p.exact_div(lin)
        k += 1
    return k


def is_exact_poly(p: Poly) -> bool:
    return all(is_exact(a) for a in p.c)
