"""Square matrices over a Grassmann algebra, i.e. endomorphisms of a free module."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .coefficients import EXACT, NUMERIC, coerce, format_coefficient
from .errors import NotInvertibleError, StructuralError
from .grassmann import EVEN, MIXED, ODD, GrassmannElement, Signature, mul_terms_into, prune
from .polynomial import Poly

COMMUTE = "commute"
ANTICOMMUTE = "anticommute"
NEITHER = "neither"


class SuperMatrix:
    """Immutable ``r x r`` matrix with Grassmann-algebra entries.

    All entries share one :class:`Signature` and one backend.
    """

    __slots__ = ("rows", "sig", "backend", "_hash")

    def __init__(self, rows: Sequence[Sequence[GrassmannElement]]):
        rows = tuple(tuple(row) for row in rows)
        r = len(rows)
        if r == 0:
            raise StructuralError("empty matrix")
        if any(len(row) != r for row in rows):
            raise StructuralError("matrix must be square")
        first = rows[0][0]
        for row in rows:
            for e in row:
                if not isinstance(e, GrassmannElement):
                    raise StructuralError("entries must be GrassmannElement")
                if e.sig != first.sig or e.backend != first.backend:
                    raise StructuralError("entries disagree on signature or backend")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "sig", first.sig)
        object.__setattr__(self, "backend", first.backend)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("SuperMatrix is immutable")

    @classmethod
    def _from_terms(cls, term_rows, sig, backend) -> "SuperMatrix":
        return cls([[GrassmannElement._raw(sig, t, backend) for t in row] for row in term_rows])

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, r: int, sig, backend: str = EXACT) -> "SuperMatrix":
        return cls.from_body(linalg.identity(r), sig, backend)

    @classmethod
    def zero(cls, r: int, sig, backend: str = EXACT) -> "SuperMatrix":
        sig = Signature(sig) if isinstance(sig, int) else sig
        return cls([[GrassmannElement.zero(sig, backend)] * r for _ in range(r)])

    @classmethod
    def from_body(cls, body, sig, backend: str = EXACT) -> "SuperMatrix":
        sig = Signature(sig) if isinstance(sig, int) else sig
        return cls([[GrassmannElement(sig, {0: x}, backend) for x in row] for row in body])

    @classmethod
    def from_entries(cls, rows, sig, backend: str = EXACT) -> "SuperMatrix":
        """Entries may be GrassmannElements or plain scalars (placed in the body)."""
        sig = Signature(sig) if isinstance(sig, int) else sig
        out = []
        for row in rows:
            out.append(
                [e if isinstance(e, GrassmannElement) else GrassmannElement(sig, {0: e}, backend) for e in row]
            )
        return cls(out)

    @classmethod
    def scalar(cls, r: int, c: GrassmannElement) -> "SuperMatrix":
        """``c * I`` for a Grassmann scalar ``c``."""
        z = GrassmannElement.zero(c.sig, c.backend)
        return cls([[c if i == j else z for j in range(r)] for i in range(r)])

    # -- structure ----------------------------------------------------------

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def s(self) -> int:
        return self.sig.s

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def body(self):
        return [[e.body() for e in row] for row in self.rows]

    def soul(self) -> "SuperMatrix":
        return SuperMatrix([[e.soul() for e in row] for row in self.rows])

    def body_soul(self):
        return self.body(), self.soul()

    def parity(self) -> str:
        ps = {e.parity() for row in self.rows for e in row if not e.is_zero()}
        if not ps or ps == {EVEN}:
            return EVEN
        if ps == {ODD}:
            return ODD
        return MIXED

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def max_abs(self) -> float:
        return max(e.max_abs() for row in self.rows for e in row)

    def to_numeric(self) -> "SuperMatrix":
        if self.backend == NUMERIC:
            return self
        return SuperMatrix([[e.to_numeric() for e in row] for row in self.rows])

    def with_signature(self, sig: Signature) -> "SuperMatrix":
        return SuperMatrix([[e.with_signature(sig) for e in row] for row in self.rows])

    def transpose(self) -> "SuperMatrix":
        return SuperMatrix(list(zip(*self.rows)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        """Rectangular slice as a nested list of GrassmannElements."""
        return [[self.rows[i][j] for j in cols] for i in rows]

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "SuperMatrix"):
        if not isinstance(other, SuperMatrix):
            raise StructuralError("expected a SuperMatrix")
        if self.r != other.r:
            raise StructuralError(f"shape mismatch: {self.r} vs {other.r}")
        if self.sig != other.sig or self.backend != other.backend:
            raise StructuralError("signature or backend mismatch")

    def __add__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        self._check(other)
        return SuperMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        self._check(other)
        return SuperMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return SuperMatrix([[-a for a in row] for row in self.rows])

    def scale(self, c) -> "SuperMatrix":
        """Multiply every entry by a scalar coefficient or, on the left, by a Grassmann scalar."""
        if isinstance(c, GrassmannElement):
            return SuperMatrix([[c * a for a in row] for row in self.rows])
        return SuperMatrix([[a.scale(c) for a in row] for row in self.rows])

    def shift(self, lam) -> "SuperMatrix":
        """``self - lam*I`` for a scalar ``lam``."""
        lam = coerce(lam, self.backend)
        return SuperMatrix(
            [[a - lam if i == j else a for j, a in enumerate(row)] for i, row in enumerate(self.rows)]
        )

    def __mul__(self, other):
        if not isinstance(other, SuperMatrix):
            if isinstance(other, GrassmannElement):
                return SuperMatrix([[a * other for a in row] for row in self.rows])
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        r = self.r
        sig = self.sig
        a_terms = [[e.terms for e in row] for row in self.rows]
        b_terms = [[e.terms for e in row] for row in other.rows]
        out = []
        for i in range(r):
            row = []
            ai = a_terms[i]
            for j in range(r):
                acc: dict = {}
                for k in range(r):
                    ta, tb = ai[k], b_terms[k][j]
                    if ta and tb:
                        mul_terms_into(acc, ta, tb, sig)
                row.append(prune(acc))
            out.append(row)
        return SuperMatrix._from_terms(out, sig, self.backend)

    def __rmul__(self, other):
        if isinstance(other, GrassmannElement):
            return SuperMatrix([[other * a for a in row] for row in self.rows])
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = SuperMatrix.identity(self.r, self.sig, self.backend)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.rows))
        return self._hash

    def apply_to_vector(self, v: Sequence) -> list:
        """``self @ v`` for a column of scalars or Grassmann elements."""
        col = [
            x if isinstance(x, GrassmannElement) else GrassmannElement(self.sig, {0: x}, self.backend) for x in v
        ]
        out = []
        for row in self.rows:
            acc: dict = {}
            for a, b in zip(row, col):
                mul_terms_into(acc, a.terms, b.terms, self.sig)
            out.append(GrassmannElement._raw(self.sig, prune(acc), self.backend))
        return out

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[GrassmannElement]]) -> "SuperMatrix":
        return cls([list(r) for r in zip(*cols)])

    # -- algebra from the structure theory ------------------------------------------

    def invert(self) -> "SuperMatrix":
        """Two-sided inverse, which exists iff the body is invertible.

        With ``m = b + n`` (body ``b``, soul ``n``) the inverse is
        ``b^-1 - b^-1 n b^-1 (1 - x + x^2 - ... + (-1)^s x^s)`` where
        ``x = n b^-1``; the series stops because ``x^(s+1) = 0``.
        """
        b = self.body()
        try:
            binv_body = linalg.inverse(b)
        except NotInvertibleError as exc:
            d = linalg.det(b)
            raise NotInvertibleError(
                f"body is singular (det = {format_coefficient(d)}); not invertible", d
            ) from exc
        binv = SuperMatrix.from_body(binv_body, self.sig, self.backend)
        n = self.soul()
        if n.is_zero():
            return binv
        x = n * binv
        series = SuperMatrix.identity(self.r, self.sig, self.backend)
        power = series
        for k in range(1, self.s + 1):
            power = power * x
            if power.is_zero():
                break
            series = series - power if k % 2 else series + power
        return binv - binv * n * binv * series

    def charpoly(self) -> "CharPoly":
        body_poly = linalg.charpoly(self.body())
        return CharPoly(body_poly ** (self.s + 1), body_poly, self.s)

    def poly_eval(self, p: Poly) -> "SuperMatrix":
        """``p(self)`` by Horner's scheme."""
        one = SuperMatrix.identity(self.r, self.sig, self.backend)
        if p.is_zero():
            return SuperMatrix.zero(self.r, self.sig, self.backend)
        acc = one.scale(p.c[-1])
        for a in reversed(p.c[:-1]):
            acc = (acc * self).shift(-a) if a != 0 else acc * self
        return acc

    def commutator_class(self, other: "SuperMatrix") -> str:
        self._check(other)
        ab, ba = self * other, other * self
        if ab == ba:
            return COMMUTE
        if (ab + ba).is_zero():
            return ANTICOMMUTE
        return NEITHER

    # -- display / serialization --------------------------------------------

    def __str__(self):
        cells = [[str(e) for e in row] for row in self.rows]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[" + ", ".join(c.rjust(width) for c in row) + "]" for row in cells)

    def __repr__(self):
        return f"SuperMatrix(r={self.r}, s={self.s}, {[[str(e) for e in row] for row in self.rows]})"

    def to_json(self) -> dict:
        return {"r": self.r, "s": self.s, "entries": [e.to_json() for row in self.rows for e in row]}

    @classmethod
    def from_json(cls, data: dict, backend: str | None = None, sig: Signature | None = None) -> "SuperMatrix":
        """Decode ``{r, s, entries}``.  Entries may also be bare scalars ("p/q" or numbers)."""
        r, s = data["r"], data["s"]
        entries = data["entries"]
        if len(entries) != r * r:
            raise StructuralError(f"expected {r * r} entries, got {len(entries)}")
        sig = sig or Signature(s)
        if sig.s != s:
            raise StructuralError("signature does not match s")
        decoded = []
        for e in entries:
            if isinstance(e, list):
                decoded.append(GrassmannElement.from_json(e, sig, backend))
            else:
                val = e if isinstance(e, (str, int)) and not isinstance(e, bool) else float(e)
                if isinstance(val, str):
                    val = Fraction(val)
                b = backend or (EXACT if isinstance(val, (int, Fraction)) else NUMERIC)
                decoded.append(GrassmannElement(sig, {0: val}, b))
        if backend is None:
            # A file mixing exact and float literals is promoted to numeric.
            if any(e.backend == NUMERIC for e in decoded):
                decoded = [e.to_numeric() for e in decoded]
        return cls([decoded[i * r:(i + 1) * r] for i in range(r)])


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial ``chi = (chi_body)^(s+1)`` of a SuperMatrix."""

    poly: Poly
    body_poly: Poly
    s: int
    factors: tuple | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree

    def factored(self, eigen) -> "CharPoly":
        """Attach the factorization ``prod (t - lam)^((s+1)d)`` from eigen data."""
        facs = tuple((lam, (self.s + 1) * d) for lam, d in zip(eigen.eigenvalues, eigen.multiplicities))
        return CharPoly(self.poly, self.body_poly, self.s, facs)

    def __str__(self):
        if self.factors:
            return " ".join(
                f"(t - {format_coefficient(lam)})^{k}" if lam != 0 else f"t^{k}" for lam, k in self.factors
            )
        return str(self.poly)


def invert(m: SuperMatrix) -> SuperMatrix:
    return m.invert()


def charpoly(m: SuperMatrix) -> CharPoly:
    return m.charpoly()


def commutator_class(a: SuperMatrix, b: SuperMatrix) -> str:
    return a.commutator_class(b)
