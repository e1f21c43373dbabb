"""Elementary-function expression trees with symbolic differentiation.

Nodes are immutable and hash-consed enough for memoization: equal trees
compare and hash equal.  Constructors (`add`, `mul`, `power`, `func`) fold
constants and merge like terms so repeated differentiation stays small.
"""
from __future__ import annotations

import ast
import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, ExpressionError

FUNCTIONS = ("exp", "log", "sin", "cos")


class Node:
    __slots__ = ("_key", "_h")

    def __init__(self, key):
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_h", hash((type(self).__name__, key)))

    def __setattr__(self, name, value):
        raise AttributeError("expression nodes are immutable")

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        return type(self) is type(other) and self._h == other._h and self._key == other._key

    def __repr__(self):
        return to_text(self)


class Const(Node):
    __slots__ = ()

    def __init__(self, value):
        if isinstance(value, int) and not isinstance(value, bool):
            value = Fraction(value)
        super().__init__(value)

    @property
    def value(self):
        return self._key


class Var(Node):
    """0-based variable index; rendered as ``y{index+1}``."""

    __slots__ = ()

    @property
    def index(self) -> int:
        return self._key


class Add(Node):
    __slots__ = ()

    @property
    def args(self):
        return self._key


class Mul(Node):
    __slots__ = ()

    @property
    def args(self):
        return self._key


class Pow(Node):
    """``base ** exponent`` with a constant exponent."""

    __slots__ = ()

    def __init__(self, base, exponent):
        if isinstance(exponent, int) and not isinstance(exponent, bool):
            exponent = Fraction(exponent)
        super().__init__((base, exponent))

    @property
    def base(self):
        return self._key[0]

    @property
    def exponent(self):
        return self._key[1]


class Func(Node):
    __slots__ = ()

    def __init__(self, name, arg):
        super().__init__((name, arg))

    @property
    def name(self):
        return self._key[0]

    @property
    def arg(self):
        return self._key[1]


ZERO = Const(0)
ONE = Const(1)


def const(v) -> Const:
    return Const(v)


def var(i: int) -> Var:
    return Var(i)


def _split_coeff(node):
    """``node == coeff * rest`` with ``coeff`` a constant value."""
    if isinstance(node, Const):
        return node.value, ONE
    if isinstance(node, Mul) and isinstance(node.args[0], Const):
        rest = node.args[1:]
        return node.args[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), node


def add(*xs) -> Node:
    terms: dict = {}
    total = Fraction(0)
    stack = list(xs)
    flat = []
    while stack:
        x = stack.pop(0)
        if isinstance(x, Add):
            stack[:0] = list(x.args)
        else:
            flat.append(x)
    for x in flat:
        c, rest = _split_coeff(x)
        if rest is ONE or rest == ONE:
            total = total + c
        else:
            terms[rest] = terms.get(rest, 0) + c
    out = []
    for rest, c in terms.items():
        if c == 0:
            continue
        out.append(rest if c == 1 else mul(Const(c), rest))
    if total != 0:
        out.insert(0, Const(total))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def mul(*xs) -> Node:
    coeff = Fraction(1)
    bases: dict = {}
    stack = list(xs)
    while stack:
        x = stack.pop(0)
        if isinstance(x, Mul):
            stack[:0] = list(x.args)
        elif isinstance(x, Const):
            coeff = coeff * x.value
        elif isinstance(x, Pow):
            bases[x.base] = bases.get(x.base, Fraction(0)) + x.exponent
        else:
            bases[x] = bases.get(x, Fraction(0)) + 1
    if coeff == 0:
        return ZERO
    factors = []
    for b, e in bases.items():
        if e == 0:
            continue
        factors.append(b if e == 1 else Pow(b, e))
    if not factors:
        return Const(coeff)
    if coeff != 1:
        factors.insert(0, Const(coeff))
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))


def neg(x) -> Node:
    return mul(Const(-1), x)


def sub(a, b) -> Node:
    return add(a, neg(b))


def power(base, exponent) -> Node:
    if isinstance(exponent, Node):
        if not isinstance(exponent, Const):
            # a ** b with non-constant b is exp(b log a)
            return func("exp", mul(exponent, func("log", base)))
        exponent = exponent.value
    if isinstance(exponent, int):
        exponent = Fraction(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        b = base.value
        if isinstance(exponent, Fraction) and exponent.denominator == 1 and isinstance(b, Fraction):
            if b == 0 and exponent < 0:
                raise DomainError("0 raised to a negative power")
            return Const(b ** int(exponent))
        if b == 1:
            return ONE
    if isinstance(base, Pow) and isinstance(exponent, Fraction) and exponent.denominator == 1:
        return power(base.base, base.exponent * exponent)
    if isinstance(base, Mul) and isinstance(exponent, Fraction) and exponent.denominator == 1:
        return mul(*(power(f, exponent) for f in base.args))
    return Pow(base, exponent)


def func(name: str, arg) -> Node:
    if name not in FUNCTIONS:
        raise ExpressionError(f"unknown function {name!r}")
    if isinstance(arg, Const) and arg.value == 0:
        if name == "exp" or name == "cos":
            return ONE
        if name == "sin":
            return ZERO
    if isinstance(arg, Const) and arg.value == 1 and name == "log":
        return ZERO
    return Func(name, arg)


# -- differentiation --------------------------------------------------------


@lru_cache(maxsize=None)
def diff(node: Node, i: int) -> Node:
    """Partial derivative with respect to variable ``i`` (0-based)."""
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.index == i else ZERO
    if isinstance(node, Add):
        return add(*(diff(a, i) for a in node.args))
    if isinstance(node, Mul):
        terms = []
        args = node.args
        for k, a in enumerate(args):
            da = diff(a, i)
            if da == ZERO:
                continue
            terms.append(mul(*args[:k], da, *args[k + 1:]))
        return add(*terms)
    if isinstance(node, Pow):
        db = diff(node.base, i)
        if db == ZERO:
            return ZERO
        e = node.exponent
        return mul(Const(e), power(node.base, e - 1), db)
    if isinstance(node, Func):
        da = diff(node.arg, i)
        if da == ZERO:
            return ZERO
        a = node.arg
        if node.name == "exp":
            return mul(node, da)
        if node.name == "log":
            return mul(da, power(a, -1))
        if node.name == "sin":
            return mul(func("cos", a), da)
        if node.name == "cos":
            return mul(Const(-1), func("sin", a), da)
    raise TypeError(f"cannot differentiate {node!r}")


@lru_cache(maxsize=None)
def partial(node: Node, idx: tuple) -> Node:
    """Mixed partial ``∂^idx``; memoized per (expression, multi-index)."""
    for i, d in enumerate(idx):
        if d:
            lower = idx[:i] + (d - 1,) + idx[i + 1:]
            return diff(partial(node, lower), i)
    return node


def partial_in_order(node: Node, order) -> Node:
    """Differentiate along an explicit sequence of variables (for symmetry checks)."""
    for i in order:
        node = diff(node, i)
    return node


# -- evaluation ----------------------------------------------------------------


def evaluate(node: Node, point) -> float:
    """Numeric value at a real point (floats)."""
    memo: dict = {}
    pt = [float(x) for x in point]

    def ev(n):
        v = memo.get(n)
        if v is not None:
            return v
        if isinstance(n, Const):
            v = float(n.value)
        elif isinstance(n, Var):
            v = pt[n.index]
        elif isinstance(n, Add):
            v = math.fsum(ev(a) for a in n.args)
        elif isinstance(n, Mul):
            v = 1.0
            for a in n.args:
                v *= ev(a)
        elif isinstance(n, Pow):
            b, e = ev(n.base), n.exponent
            if isinstance(e, Fraction) and e.denominator == 1:
                if b == 0 and e < 0:
                    raise DomainError("division by zero (negative power of 0)")
                v = b ** int(e)
            else:
                if b < 0 or (b == 0 and e <= 1):
                    # Non-integer powers are only smooth on the open half-line; at 0 the
                    # derivatives of order > e blow up, so 0 is excluded conservatively.
                    raise DomainError(f"power {e} undefined or not smooth at {b}")
                v = b ** float(e)
        elif isinstance(n, Func):
            a = ev(n.arg)
            if n.name == "exp":
                v = math.exp(a)
            elif n.name == "log":
                if a <= 0:
                    raise DomainError(f"log of nonpositive value {a}")
                v = math.log(a)
            elif n.name == "sin":
                v = math.sin(a)
            else:
                v = math.cos(a)
        else:
            raise TypeError(f"cannot evaluate {n!r}")
        memo[n] = v
        return v

    return ev(node)


def substitute(node: Node, args) -> Node:
    """Replace ``Var(i)`` by ``args[i]``."""
    memo: dict = {}

    def sb(n):
        if n in memo:
            return memo[n]
        if isinstance(n, Const):
            out = n
        elif isinstance(n, Var):
            out = args[n.index]
        elif isinstance(n, Add):
            out = add(*(sb(a) for a in n.args))
        elif isinstance(n, Mul):
            out = mul(*(sb(a) for a in n.args))
        elif isinstance(n, Pow):
            out = power(sb(n.base), n.exponent)
        else:
            out = func(n.name, sb(n.arg))
        memo[n] = out
        return out

    return sb(node)


def max_var(node: Node) -> int:
    """Largest variable index used, or -1."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Add, Mul)):
        return max((max_var(a) for a in node.args), default=-1)
    if isinstance(node, Pow):
        return max_var(node.base)
    if isinstance(node, Func):
        return max_var(node.arg)
    return -1


# -- text form ------------------------------------------------------------------


def _const_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def to_text(node: Node, prec: int = 0) -> str:
    """Render as a string that :func:`parse` reads back to an equal tree."""
    if isinstance(node, Const):
        s = _const_text(node.value)
        needs = prec > 0 and ("/" in s or s.startswith("-"))
        return f"({s})" if needs else s
    if isinstance(node, Var):
        return f"y{node.index + 1}"
    if isinstance(node, Add):
        s = " + ".join(to_text(a, 1) for a in node.args)
        return f"({s})" if prec > 0 else s
    if isinstance(node, Mul):
        s = "*".join(to_text(a, 2) for a in node.args)
        return f"({s})" if prec > 1 else s
    if isinstance(node, Pow):
        return f"{to_text(node.base, 3)}**{_const_text(node.exponent) if node.exponent >= 0 and isinstance(node.exponent, Fraction) and node.exponent.denominator == 1 else '(' + _const_text(node.exponent) + ')'}"
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    raise TypeError(node)


# -- parsing -----------------------------------------------------------------------


def parse(text: str, n: int | None = None) -> Node:
    """Parse an infix expression over ``y1..yn``.

    Supports ``+ - * / **`` (``^`` is accepted as a power), unary minus,
    ``exp log sin cos sqrt`` and numeric literals, which are read exactly
    (``0.1`` is ``1/10``).
    """
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    # Python's ``^`` binds looser than ``-``, so rewrite it to ``**`` and keep
    # a map from rewritten columns back to the user's text.
    src, cols = [], []
    for k, ch in enumerate(stripped):
        if ch == "^":
            src.append("**")
            cols.extend((k, k))
        else:
            src.append(ch)
            cols.append(k)
    src = "".join(src)
    cols.append(len(stripped))

    def column(offset0):
        if offset0 is None or offset0 < 0:
            return None
        return cols[min(offset0, len(cols) - 1)] + lead + 1

    if not stripped:
        raise ExpressionError("empty expression", text, lead + 1)
    if stripped[-1] in "+-*/^(,":
        raise ExpressionError("expression ends with an operator", text, lead + len(stripped) + 1)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"syntax error: {exc.msg}", text, column((exc.offset or 1) - 1)) from None

    def fail(msg, node):
        raise ExpressionError(msg, text, column(getattr(node, "col_offset", -1)))

    def conv(node):
        if isinstance(node, ast.Expression):
            return conv(node.body)
        if isinstance(node, ast.Constant):
            v = node.value
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                fail(f"unsupported literal {v!r}", node)
            if isinstance(v, float):
                seg = ast.get_source_segment(src, node)
                return Const(Fraction(seg) if seg else Fraction(repr(v)))
            return Const(Fraction(v))
        if isinstance(node, ast.Name):
            name = node.id
            if name == "pi":
                return Const(math.pi)
            if name.startswith("y") and name[1:].isdigit() and int(name[1:]) >= 1:
                i = int(name[1:])
                if n is not None and i > n:
                    fail(f"variable {name} exceeds arity {n}", node)
                return Var(i - 1)
            fail(f"unknown name {name!r}", node)
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.USub):
                return neg(conv(node.operand))
            if isinstance(node.op, ast.UAdd):
                return conv(node.operand)
            fail("unsupported unary operator", node)
        if isinstance(node, ast.BinOp):
            a, b = conv(node.left), conv(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return add(a, b)
            if isinstance(op, ast.Sub):
                return sub(a, b)
            if isinstance(op, ast.Mult):
                return mul(a, b)
            if isinstance(op, ast.Div):
                if isinstance(b, Const) and b.value == 0:
                    fail("division by zero", node)
                return mul(a, power(b, -1))
            if isinstance(op, (ast.Pow, ast.BitXor)):
                return power(a, b)
            fail("unsupported operator", node)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or len(node.args) != 1 or node.keywords:
                fail("only one-argument calls of exp, log, sin, cos, sqrt are supported", node)
            name = node.func.id
            arg = conv(node.args[0])
            if name == "sqrt":
                return power(arg, Fraction(1, 2))
            if name not in FUNCTIONS:
                fail(f"unknown function {name!r}", node)
            return func(name, arg)
        fail(f"unsupported syntax {type(node).__name__}", node)

    return conv(tree)
