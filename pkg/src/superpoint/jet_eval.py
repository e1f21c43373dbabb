"""Evaluate smooth functions at even Grassmann arguments.

For ``a_i = r_i + n_i`` (body ``r_i``, nilpotent soul ``n_i``)::

    h(a_1, ..., a_k) = Σ_α  (∂^α h)(r_1, ..., r_k) / α!  ·  n_1^α_1 ⋯ n_k^α_k

The sum is finite because products of souls eventually vanish.  Summation
stops at the first total degree whose soul monomials are all zero, and
never goes past ``k*s``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coefficients import EXACT, NUMERIC, format_coefficient, is_exact, is_real
from .errors import DomainError, ParityError, StructuralError
from .grassmann import EVEN, GrassmannElement
from .smoothfn import POLYNOMIAL, SmoothFunction, index_factorial, multi_indices


def _uses_exact_path(h: SmoothFunction, args: Sequence[GrassmannElement]) -> bool:
    return h.kind == POLYNOMIAL and h.poly.is_exact() and all(a.backend == EXACT for a in args)


def weighted_jet(value, idx):
    w = index_factorial(idx)
    if is_exact(value):
        return Fraction(1, w) * value if w != 1 else value
    return value / w


def eval_even(h: SmoothFunction, args: Sequence[GrassmannElement]) -> GrassmannElement:
    """``h(args)`` in the even part of a Grassmann algebra.

    Arguments must be even.  Polynomial ``h`` with exact arguments gives an
    exact result; anything else runs in complex doubles with exact
    factorial weights.
    """
    k = h.n
    if len(args) != k:
        raise StructuralError(f"{k}-ary function given {len(args)} arguments")
    if k == 0:
        raise StructuralError("nullary functions have no Grassmann evaluation")
    sig = args[0].sig
    for i, a in enumerate(args):
        if a.sig != sig:
            raise StructuralError("arguments live in different Grassmann algebras")
        p = a.parity()
        if p != EVEN:
            raise ParityError(f"argument {i + 1} is {p}; evaluation needs even arguments")

    exact = _uses_exact_path(h, args)
    backend = EXACT if exact else NUMERIC
    if not exact:
        args = [a.to_numeric() for a in args]
    bodies = [a.body() for a in args]
    souls = [a.soul() for a in args]
    if h.real_domain and not all(is_real(b) for b in bodies):
        raise DomainError(
            "non-real body " + str(tuple(format_coefficient(b) for b in bodies)) + " for a real-domain function"
        )

    one = GrassmannElement.one(sig, backend)
    result = one.scale(h.jet((0,) * k, bodies))
    monomials = {(0,) * k: one}
    for d in range(1, k * sig.s + 1):
        current = {}
        for idx in multi_indices(k, d):
            i = next(j for j, e in enumerate(idx) if e)
            parent = idx[:i] + (idx[i] - 1,) + idx[i + 1:]
            pm = monomials.get(parent)
            if pm is None:
                continue
            mono = pm * souls[i]
            if mono.is_zero():
                continue
            current[idx] = mono
        if not current:
            break
        for idx, mono in current.items():
            c = h.jet(idx, bodies)
            if c != 0:
                result = result + mono.scale(weighted_jet(c, idx))
        monomials = current
    return result


def eval_even_composition_check(
    g: SmoothFunction, inner: Sequence[SmoothFunction], args: Sequence[GrassmannElement]
) -> GrassmannElement:
    """``(g∘inner)(args) - g(inner_1(args), ..., inner_m(args))``.

    Zero exactly on the polynomial/exact path; a small residual otherwise.
    """
    lhs = eval_even(g.compose(inner), args)
    rhs = eval_even(g, [eval_even(f, args) for f in inner])
    if lhs.backend != rhs.backend:
        lhs, rhs = lhs.to_numeric(), rhs.to_numeric()
    return lhs - rhs
