"""Grassmann algebras over the Gaussian rationals (or complex doubles).

An element is a finite sum of monomials ``c * θ^{i1}...θ^{ik}`` with
``i1 < ... < ik``.  Monomials are keyed by bitmask (bit ``i-1`` for
generator ``θ^i``) and products are signed by counting inversions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .coefficients import (
    EXACT,
    NUMERIC,
    backend_of,
    coerce,
    decode,
    encode,
    format_coefficient,
    is_exact,
    magnitude,
)
from .errors import StructuralError

ANTICOMMUTE = "anticommute"
COMMUTE = "commute"
MAX_GENERATORS = 63

EVEN = "even"
ODD = "odd"
MIXED = "mixed"


@dataclass(frozen=True)
class Signature:
    """Generator count plus the cross-factor rule of a product algebra.

    ``split`` marks where the second factor's generators start.  Under the
    ``commute`` convention generators from different factors commute; inside
    a factor they always anticommute.  For a plain Grassmann algebra ``split``
    is ``None`` and the convention is irrelevant.
    """

    s: int
    split: int | None = None
    convention: str = ANTICOMMUTE

    def __post_init__(self):
        if not 0 <= self.s <= MAX_GENERATORS:
            raise StructuralError(f"generator count must be in [0, {MAX_GENERATORS}], got {self.s}")
        if self.convention not in (ANTICOMMUTE, COMMUTE):
            raise StructuralError(f"unknown merge convention {self.convention!r}")
        if self.split is not None and not 0 <= self.split <= self.s:
            raise StructuralError("split out of range")

    @property
    def full_mask(self) -> int:
        return (1 << self.s) - 1

    def _low_mask(self) -> int | None:
        if self.split is None or self.convention == ANTICOMMUTE:
            return None
        return (1 << self.split) - 1

    def sign(self, a: int, b: int) -> int:
        """Sign picked up when reordering monomial ``a`` followed by ``b``."""
        return _sign(a, b, self._low_mask())


def plain(s: int) -> Signature:
    return Signature(s)


def _inversions(a: int, b: int) -> int:
    count = 0
    while b:
        low = b & -b
        j = low.bit_length()  # bit index + 1
        count += bin(a >> j).count("1")
        b ^= low
    return count


@lru_cache(maxsize=1 << 16)
def _sign(a: int, b: int, low: int | None) -> int:
    if low is None:
        n = _inversions(a, b)
    else:
        high = ~low
        n = _inversions(a & low, b & low) + _inversions(a & high, b & high)
    return -1 if n & 1 else 1


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of 1-based generator indices; repeated indices are rejected."""
    m = 0
    for i in indices:
        if i < 1:
            raise StructuralError(f"generator index must be >= 1, got {i}")
        bit = 1 << (i - 1)
        if m & bit:
            raise StructuralError(f"repeated generator index {i}")
        m |= bit
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _term_order(mask: int):
    return (bin(mask).count("1"), indices_of(mask))


def mul_terms_into(acc: dict, ta: Mapping[int, object], tb: Mapping[int, object], sig: Signature) -> None:
    """``acc += ta * tb`` on raw term dictionaries.  Zero entries may remain."""
    low = sig._low_mask()
    for ma, ca in ta.items():
        for mb, cb in tb.items():
            if ma & mb:
                continue
            c = ca * cb
            if _sign(ma, mb, low) < 0:
                c = -c
            m = ma | mb
            prev = acc.get(m)
            acc[m] = c if prev is None else prev + c


def prune(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if c != 0}


class GrassmannElement:
    """Immutable element of a Grassmann algebra.

    >>> t1, t2 = GrassmannElement.generator(2, 1), GrassmannElement.generator(2, 2)
    >>> str(t2 * t1)
    '-θ1θ2'
    """

    __slots__ = ("sig", "terms", "backend", "_hash")

    def __init__(self, sig: Signature | int, terms: Mapping | None = None, backend: str = EXACT):
        if isinstance(sig, int):
            sig = Signature(sig)
        if backend not in (EXACT, NUMERIC):
            raise ValueError(f"unknown backend {backend!r}")
        clean = {}
        full = sig.full_mask
        for key, c in (terms or {}).items():
            m = key if isinstance(key, int) else mask_of(key)
            if m & ~full:
                raise StructuralError(f"monomial {indices_of(m)} exceeds s={sig.s}")
            c = coerce(c, backend)
            if c != 0:
                clean[m] = clean.get(m, 0) + c
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "terms", prune(clean))
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, sig: Signature, terms: dict, backend: str) -> "GrassmannElement":
        # Trusted constructor: terms already canonical and coerced.
        obj = cls.__new__(cls)
        object.__setattr__(obj, "sig", sig)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "backend", backend)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GrassmannElement is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, sig, backend: str = EXACT):
        return cls(sig, {}, backend)

    @classmethod
    def scalar(cls, sig, c, backend: str | None = None):
        backend = backend or backend_of(c)
        return cls(sig, {0: c}, backend)

    @classmethod
    def one(cls, sig, backend: str = EXACT):
        return cls(sig, {0: 1}, backend)

    @classmethod
    def generator(cls, sig, i: int, backend: str = EXACT):
        return cls(sig, {(i,): 1}, backend)

    # -- structure ------------------------------------------------------

    @property
    def s(self) -> int:
        return self.sig.s

    def body(self):
        return self.terms.get(0, coerce(0, self.backend))

    def soul(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.sig, {m: c for m, c in self.terms.items() if m}, self.backend)

    def body_soul(self):
        return self.body(), self.soul()

    def parity(self) -> str:
        parities = {bin(m).count("1") & 1 for m in self.terms}
        if not parities or parities == {0}:
            return EVEN
        if parities == {1}:
            return ODD
        return MIXED

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.sig, {m: c for m, c in self.terms.items() if not bin(m).count("1") & 1}, self.backend
        )

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.sig, {m: c for m, c in self.terms.items() if bin(m).count("1") & 1}, self.backend
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def max_abs(self) -> float:
        return max((magnitude(c) for c in self.terms.values()), default=0.0)

    def to_numeric(self) -> "GrassmannElement":
        if self.backend == NUMERIC:
            return self
        return GrassmannElement(self.sig, self.terms, NUMERIC)

    def with_signature(self, sig: Signature) -> "GrassmannElement":
        if sig.s < self.sig.s and any(m >> sig.s for m in self.terms):
            raise StructuralError("element uses generators beyond the target signature")
        return GrassmannElement._raw(sig, dict(self.terms), self.backend)

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: "GrassmannElement"):
        if self.sig != other.sig:
            raise StructuralError(f"signature mismatch: {self.sig} vs {other.sig}")
        if self.backend != other.backend:
            raise StructuralError(f"backend mismatch: {self.backend} vs {other.backend}")

    def _lift(self, other) -> "GrassmannElement | None":
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        if isinstance(other, (int, float, complex)) or is_exact(other):
            return GrassmannElement(self.sig, {0: other}, self.backend)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return GrassmannElement._raw(self.sig, prune(terms), self.backend)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement._raw(self.sig, {m: -c for m, c in self.terms.items()}, self.backend)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "GrassmannElement":
        c = coerce(c, self.backend)
        if c == 0:
            return GrassmannElement._raw(self.sig, {}, self.backend)
        return GrassmannElement._raw(self.sig, {m: v * c for m, v in self.terms.items()}, self.backend)

    def __mul__(self, other):
        if not isinstance(other, GrassmannElement):
            if isinstance(other, (int, float, complex)) or is_exact(other):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        acc: dict = {}
        mul_terms_into(acc, self.terms, other.terms, self.sig)
        return GrassmannElement._raw(self.sig, prune(acc), self.backend)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)) or is_exact(other):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = GrassmannElement.one(self.sig, self.backend)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, GrassmannElement):
            return self.sig == other.sig and self.backend == other.backend and self.terms == other.terms
        if isinstance(other, (int, float, complex)) or is_exact(other):
            if other == 0:
                return not self.terms
            return set(self.terms) == {0} and self.terms[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.sig, self.backend, frozenset(self.terms.items()))))
        return self._hash

    # -- display and serialization -------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _term_order(mc[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "".join(f"θ{i}" for i in indices_of(m))
            cs = format_coefficient(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                if any(ch in cs[1:] for ch in "+-") or "j" in cs or "i" in cs:
                    cs = f"({cs})"
                parts.append(cs + mono)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"GrassmannElement(s={self.s}, {self})"

    def to_json(self) -> list:
        out = []
        for m, c in self.sorted_terms():
            re, im = encode(c)
            out.append({"subset": list(indices_of(m)), "re": re, "im": im})
        return out

    @classmethod
    def from_json(cls, data, sig, backend: str | None = None) -> "GrassmannElement":
        """Decode a term list; ``backend`` (if given) coerces every coefficient."""
        if isinstance(sig, int):
            sig = Signature(sig)
        if not isinstance(data, list):
            raise StructuralError("a Grassmann element is encoded as a list of terms")
        terms: dict = {}
        seen_backend = None
        for t in data:
            m = mask_of(t["subset"])
            if list(indices_of(m)) != list(t["subset"]):
                raise StructuralError(f"subset {t['subset']} is not strictly ascending")
            c = decode(t.get("re", 0), t.get("im", 0))
            seen_backend = seen_backend or backend_of(c)
            terms[m] = terms.get(m, 0) + c
        backend = backend or seen_backend or EXACT
        return cls(sig, terms, backend)


def product_signature(s1: int, s2: int, convention: str = ANTICOMMUTE) -> Signature:
    return Signature(s1 + s2, split=s1, convention=convention)


def embed(a: GrassmannElement, sig: Signature, offset: int = 0) -> GrassmannElement:
    """Re-index ``a`` into ``sig`` with its generators shifted by ``offset``."""
    if a.s + offset > sig.s:
        raise StructuralError("target signature too small")
    return GrassmannElement._raw(sig, {m << offset: c for m, c in a.terms.items()}, a.backend)


def merge(a: GrassmannElement, b: GrassmannElement, convention: str = ANTICOMMUTE) -> GrassmannElement:
    """Product ``a ⊗ b`` in the algebra generated by both factors' generators.

    ``b``'s generators are placed after ``a``'s.
    """
    if a.backend != b.backend:
        raise StructuralError("backend mismatch")
    sig = product_signature(a.s, b.s, convention)
    return embed(a, sig) * embed(b, sig, a.s)
