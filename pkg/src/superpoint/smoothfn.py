"""Smooth functions on R^n (as jet oracles) and super-functions on R^{n|s}.

A :class:`SmoothFunction` answers ``jet(idx, point)``: the partial
derivative ``∂^idx f`` at a point.  Three kinds exist:

* ``polynomial`` -- exact multivariate coefficients, exact jets;
* ``elementary`` -- an expression tree over exp/log/sin/cos/powers, jets by
  symbolic differentiation evaluated in floating point;
* ``oracle`` -- a user callback ``(idx, point) -> value``, trusted as is.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

from . import expr as ex
from .coefficients import format_coefficient, is_exact, is_real, real_part, to_exact
from .errors import DomainError, ExpressionError, StructuralError
from .grassmann import Signature, indices_of, mask_of

POLYNOMIAL = "polynomial"
ELEMENTARY = "elementary"
ORACLE = "oracle"


def multi_indices(k: int, d: int):
    """All ``k``-tuples of nonnegative integers summing to ``d`` (lexicographically descending)."""
    if k == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in multi_indices(k - 1, d - first):
            yield (first,) + rest


def index_factorial(idx: Sequence[int]) -> int:
    out = 1
    for d in idx:
        out *= factorial(d)
    return out


class MultiPoly:
    """Multivariate polynomial ``{exponent tuple: coefficient}`` in ``n`` variables."""

    __slots__ = ("n", "terms", "_h")

    def __init__(self, n: int, terms: Mapping[tuple, object] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(k < 0 for k in e):
                raise StructuralError(f"bad exponent {e} for arity {n}")
            if isinstance(c, int):
                c = Fraction(c)
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})
        object.__setattr__(self, "_h", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    @classmethod
    def const(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return MultiPoly(self.n, t)

    def __neg__(self):
        return MultiPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.n, {e: c * other for e, c in self.terms.items()})
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MultiPoly(self.n, t)

    def __pow__(self, k: int):
        out = MultiPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._h is None:
            object.__setattr__(self, "_h", hash((self.n, frozenset(self.terms.items()))))
        return self._h

    def derivative(self, idx: Sequence[int]) -> "MultiPoly":
        t = {}
        for e, c in self.terms.items():
            if any(a < d for a, d in zip(e, idx)):
                continue
            w = 1
            for a, d in zip(e, idx):
                for k in range(d):
                    w *= a - k
            t[tuple(a - d for a, d in zip(e, idx))] = c * w
        return MultiPoly(self.n, t)

    def __call__(self, point):
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def compose(self, args: Sequence["MultiPoly"]) -> "MultiPoly":
        m = args[0].n if args else 0
        out = MultiPoly(m)
        for e, c in self.terms.items():
            term = MultiPoly.const(m, c)
            for a, k in zip(args, e):
                if k:
                    term = term * (a ** k)
            out = out + term
        return out

    def to_expr(self) -> ex.Node:
        terms = []
        for e, c in sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), tuple(-k for k in ec[0]))):
            factors = [ex.Const(c)] + [ex.power(ex.var(i), k) for i, k in enumerate(e) if k]
            terms.append(ex.mul(*factors))
        return ex.add(*terms)

    def __repr__(self):
        return f"MultiPoly({self.n}, {ex.to_text(self.to_expr())})"


def _expr_to_poly(node: ex.Node, n: int) -> MultiPoly | None:
    """Exact polynomial form of a tree, or ``None`` if it is not polynomial."""
    if isinstance(node, ex.Const):
        if not isinstance(node.value, Fraction):
            return None
        return MultiPoly.const(n, node.value)
    if isinstance(node, ex.Var):
        return MultiPoly.var(n, node.index)
    if isinstance(node, ex.Add):
        out = MultiPoly(n)
        for a in node.args:
            p = _expr_to_poly(a, n)
            if p is None:
                return None
            out = out + p
        return out
    if isinstance(node, ex.Mul):
        out = MultiPoly.const(n, 1)
        for a in node.args:
            p = _expr_to_poly(a, n)
            if p is None:
                return None
            out = out * p
        return out
    if isinstance(node, ex.Pow):
        e = node.exponent
        if isinstance(e, Fraction) and e.denominator == 1 and e >= 0:
            p = _expr_to_poly(node.base, n)
            return None if p is None else p ** int(e)
        return None
    return None


class SmoothFunction:
    """Element of C^∞(R^n) exposed through its jets."""

    __slots__ = ("n", "kind", "poly", "expr", "callback", "real_domain", "label")

    def __init__(self, n, kind, poly=None, expr=None, callback=None, real_domain=True, label=None):
        self.n = n
        self.kind = kind
        self.poly = poly
        self.expr = expr
        self.callback = callback
        self.real_domain = real_domain
        self.label = label

    # -- constructors -------------------------------------------------------

    @classmethod
    def polynomial(cls, n: int, terms: Mapping[tuple, object] | MultiPoly) -> "SmoothFunction":
        p = terms if isinstance(terms, MultiPoly) else MultiPoly(n, terms)
        return cls(n, POLYNOMIAL, poly=p, real_domain=False)

    @classmethod
    def from_expr(cls, node: ex.Node, n: int) -> "SmoothFunction":
        if ex.max_var(node) >= n:
            raise StructuralError(f"expression uses a variable beyond arity {n}")
        p = _expr_to_poly(node, n)
        if p is not None:
            return cls.polynomial(n, p)
        return cls(n, ELEMENTARY, expr=node, real_domain=True)

    @classmethod
    def parse(cls, text: str, n: int) -> "SmoothFunction":
        return cls.from_expr(ex.parse(text, n), n)

    @classmethod
    def constant(cls, n: int, c) -> "SmoothFunction":
        return cls.polynomial(n, MultiPoly.const(n, to_exact(c) if isinstance(c, (int, str)) else c))

    @classmethod
    def coordinate(cls, n: int, i: int) -> "SmoothFunction":
        """The projection ``y -> y_i`` (``i`` is 1-based)."""
        return cls.polynomial(n, MultiPoly.var(n, i - 1))

    @classmethod
    def from_callback(cls, n: int, callback: Callable, real_domain: bool = True, label: str = "oracle"):
        """Wrap ``callback(idx, point)``; no smoothness check is made."""
        return cls(n, ORACLE, callback=callback, real_domain=real_domain, label=label)

    # -- queries ---------------------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return self.kind == POLYNOMIAL

    def as_expr(self) -> ex.Node:
        if self.kind == POLYNOMIAL:
            return self.poly.to_expr()
        if self.kind == ELEMENTARY:
            return self.expr
        raise StructuralError("oracle functions have no expression form")

    @property
    def text(self) -> str:
        if self.kind == ORACLE:
            return f"<{self.label}>"
        return ex.to_text(self.as_expr())

    def __repr__(self):
        return f"SmoothFunction(n={self.n}, {self.kind}, {self.text})"

    def jet(self, idx: Sequence[int], point: Sequence) -> object:
        """``(∂^idx f)(point)``; exact for polynomials, float otherwise."""
        idx = tuple(idx)
        if len(idx) != self.n or len(point) != self.n:
            raise StructuralError(f"arity mismatch: function has {self.n} variables")
        if any(d < 0 for d in idx):
            raise StructuralError("multi-index must be nonnegative")
        if self.kind == POLYNOMIAL:
            return self.poly.derivative(idx)(point)
        if self.real_domain and not all(is_real(x) for x in point):
            raise DomainError(f"non-real point {tuple(format_coefficient(x) for x in point)} for a real function")
        real_pt = [real_part(x) for x in point]
        if self.kind == ELEMENTARY:
            if any(idx):
                # derivatives can be finite where f is undefined (d/dy log y at y < 0)
                ex.evaluate(self.expr, real_pt)
            return ex.evaluate(ex.partial(self.expr, idx), real_pt)
        return self.callback(idx, tuple(real_pt))

    def __call__(self, *point):
        return self.jet((0,) * self.n, point)

    # -- arithmetic -------------------------------------------------------------

    def _binary(self, other, poly_op, expr_op):
        if not isinstance(other, SmoothFunction):
            other = SmoothFunction.constant(self.n, other)
        if other.n != self.n:
            raise StructuralError("arity mismatch")
        if self.kind == POLYNOMIAL and other.kind == POLYNOMIAL:
            return SmoothFunction.polynomial(self.n, poly_op(self.poly, other.poly))
        return SmoothFunction.from_expr(expr_op(self.as_expr(), other.as_expr()), self.n)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, ex.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, ex.sub)

    def __rsub__(self, other):
        return SmoothFunction.constant(self.n, other) - self

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b, ex.mul)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __pow__(self, k: int):
        out = SmoothFunction.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def compose(self, inner: Sequence["SmoothFunction"]) -> "SmoothFunction":
        """``self ∘ (inner_1, ..., inner_m)``."""
        if len(inner) != self.n:
            raise StructuralError(f"need {self.n} inner functions, got {len(inner)}")
        if not inner:
            raise StructuralError("cannot compose a nullary function")
        m = inner[0].n
        if any(f.n != m for f in inner):
            raise StructuralError("inner functions disagree on arity")
        if self.kind == POLYNOMIAL and all(f.kind == POLYNOMIAL for f in inner):
            return SmoothFunction.polynomial(m, self.poly.compose([f.poly for f in inner]))
        return SmoothFunction.from_expr(ex.substitute(self.as_expr(), [f.as_expr() for f in inner]), m)

    def exact_equals(self, other: "SmoothFunction") -> bool:
        if self.kind == POLYNOMIAL and other.kind == POLYNOMIAL:
            return self.poly == other.poly
        if self.kind == ELEMENTARY and other.kind == ELEMENTARY:
            return self.expr == other.expr
        return False


def jet(f: SmoothFunction, idx, point):
    return f.jet(idx, point)


def taylor_coefficients(f: SmoothFunction, q: Sequence, degree: int) -> dict:
    """``{idx: ∂^idx f(q) / idx!}`` for ``|idx| <= degree`` (zero entries dropped).

    The factorial weights are exact integers on every backend.
    """
    out = {}
    for d in range(degree + 1):
        for idx in multi_indices(f.n, d):
            v = f.jet(idx, q)
            if v != 0:
                out[idx] = v / index_factorial(idx) if not is_exact(v) else Fraction(1, index_factorial(idx)) * v
    return out


def taylor_poly(f: SmoothFunction, q: Sequence, degree: int) -> SmoothFunction:
    """Taylor polynomial of ``f`` at ``q`` through total degree ``degree``, expanded in ``y``."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    n = f.n
    shifted = [MultiPoly(n, {tuple(int(i == k) for i in range(n)): 1, (0,) * n: -q[k]}) for k in range(n)]
    out = MultiPoly(n)
    for idx, c in taylor_coefficients(f, q, degree).items():
        term = MultiPoly.const(n, c)
        for k, d in enumerate(idx):
            if d:
                term = term * shifted[k] ** d
        out = out + term
    return SmoothFunction.polynomial(n, out)


class SuperFunction:
    """``F = Σ_I f_I ϑ^I`` with ``I`` an ascending subset of ``{1..s2}``."""

    __slots__ = ("n", "s2", "components")

    def __init__(self, n: int, s2: int, components: Mapping | None = None):
        comps = {}
        for key, f in (components or {}).items():
            m = key if isinstance(key, int) else mask_of(key)
            if m >> s2:
                raise StructuralError(f"odd monomial {indices_of(m)} exceeds s2={s2}")
            if f.n != n:
                raise StructuralError("component arity mismatch")
            if f.kind == POLYNOMIAL and not f.poly.terms:
                continue
            comps[m] = comps[m] + f if m in comps else f
        self.n = n
        self.s2 = s2
        self.components = {m: f for m, f in comps.items() if not (f.kind == POLYNOMIAL and not f.poly.terms)}

    @classmethod
    def even(cls, f: SmoothFunction, s2: int = 0) -> "SuperFunction":
        return cls(f.n, s2, {0: f})

    @classmethod
    def coordinate(cls, n: int, s2: int, i: int) -> "SuperFunction":
        return cls(n, s2, {0: SmoothFunction.coordinate(n, i)})

    @classmethod
    def odd_coordinate(cls, n: int, s2: int, l: int) -> "SuperFunction":
        return cls(n, s2, {(l,): SmoothFunction.constant(n, 1)})

    @classmethod
    def constant(cls, n: int, s2: int, c) -> "SuperFunction":
        return cls(n, s2, {0: SmoothFunction.constant(n, c)})

    @property
    def sig(self) -> Signature:
        return Signature(self.s2)

    @property
    def is_polynomial(self) -> bool:
        return all(f.kind == POLYNOMIAL for f in self.components.values())

    def _check(self, other):
        if not isinstance(other, SuperFunction) or (self.n, self.s2) != (other.n, other.s2):
            raise StructuralError("super-functions live on different super-spaces")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for m, f in other.components.items():
            comps[m] = comps[m] + f if m in comps else f
        return SuperFunction(self.n, self.s2, comps)

    def __neg__(self):
        return SuperFunction(self.n, self.s2, {m: -f for m, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SuperFunction):
            return SuperFunction(self.n, self.s2, {m: f * other for m, f in self.components.items()})
        self._check(other)
        sig = self.sig
        comps: dict = {}
        for m1, f1 in self.components.items():
            for m2, f2 in other.components.items():
                if m1 & m2:
                    continue
                g = f1 * f2
                if sig.sign(m1, m2) < 0:
                    g = -g
                m = m1 | m2
                comps[m] = comps[m] + g if m in comps else g
        return SuperFunction(self.n, self.s2, comps)

    def even_part(self) -> "SuperFunction":
        return SuperFunction(
            self.n, self.s2, {m: f for m, f in self.components.items() if not bin(m).count("1") & 1}
        )

    def odd_part(self) -> "SuperFunction":
        return SuperFunction(self.n, self.s2, {m: f for m, f in self.components.items() if bin(m).count("1") & 1})

    def sorted_components(self):
        return sorted(self.components.items(), key=lambda mf: (bin(mf[0]).count("1"), indices_of(mf[0])))

    def exact_equals(self, other: "SuperFunction") -> bool:
        return (
            (self.n, self.s2) == (other.n, other.s2)
            and self.components.keys() == other.components.keys()
            and all(f.exact_equals(other.components[m]) for m, f in self.components.items())
        )

    def __repr__(self):
        parts = [f"({f.text})" + "".join(f"ϑ{i}" for i in indices_of(m)) for m, f in self.sorted_components()]
        return f"SuperFunction(n={self.n}, s2={self.s2}, {' + '.join(parts) or '0'})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "s2": self.s2,
            "components": [
                {"odd_monomial": list(indices_of(m)), "coefficient_expr": f.text} for m, f in self.sorted_components()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping, n: int | None = None, s2: int | None = None) -> "SuperFunction":
        n = data.get("n", n)
        s2 = data.get("s2", s2)
        if n is None or s2 is None:
            raise StructuralError("super-function needs n and s2")
        comps: dict = {}
        for k, comp in enumerate(data["components"]):
            mono = comp.get("odd_monomial", [])
            if list(mono) != sorted(set(mono)):
                raise StructuralError(f"components[{k}].odd_monomial must be strictly ascending")
            try:
                f = SmoothFunction.parse(comp["coefficient_expr"], n)
            except ExpressionError as exc:
                raise ExpressionError(f"components[{k}].coefficient_expr: {exc}") from None
            m = mask_of(mono)
            comps[m] = comps[m] + f if m in comps else f
        return cls(n, s2, comps)


def sf_mul(f: SuperFunction, g: SuperFunction) -> SuperFunction:
    return f * g
