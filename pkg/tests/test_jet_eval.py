from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from generators import random_even
from superpoint.coefficients import GaussianRational
from superpoint.errors import DomainError, ParityError, StructuralError
from superpoint.grassmann import GrassmannElement, Signature
from superpoint.jet_eval import eval_even, eval_even_composition_check
from superpoint.smoothfn import SmoothFunction

S4 = Signature(4)


def th(i, sig=S4):
    return GrassmannElement.generator(sig, i)


def substitute(f: SmoothFunction, args):
    """Direct expansion of a polynomial at Grassmann arguments (no Taylor weights)."""
    sig = args[0].sig
    acc = GrassmannElement.zero(sig)
    for exps, c in f.poly.terms.items():
        term = GrassmannElement.scalar(sig, c)
        for a, k in zip(args, exps):
            term = term * a ** k
        acc = acc + term
    return acc


def sympy_univariate(name: str, arg: GrassmannElement) -> GrassmannElement:
    """``h(r + n) = Σ h^(k)(r) n^k / k!`` with derivatives taken by sympy."""
    x = sympy.Symbol("x")
    h = {"exp": sympy.exp(x), "sin": sympy.sin(x), "sin_sq": sympy.sin(x**2)}[name]
    r, n = arg.body(), arg.soul()
    out = GrassmannElement.zero(arg.sig).to_numeric()
    power = GrassmannElement.one(arg.sig)
    k = 0
    while not power.is_zero():
        c = complex(sympy.N(sympy.diff(h, x, k).subs(x, sympy.Rational(r.numerator, r.denominator)) / sympy.factorial(k), 30))
        out = out + power.to_numeric().scale(c)
        power = power * n
        k += 1
    return out


class TestExamples:
    def test_square(self):
        got = eval_even(SmoothFunction.parse("y1^2", 1), [3 + th(1) * th(2)])
        assert got == 9 + 6 * th(1) * th(2)

    def test_projection(self):
        a = 1 + th(1) * th(2)
        b = -2 + th(3) * th(4) + th(1) * th(3)
        assert eval_even(SmoothFunction.coordinate(2, 2), [a, b]) == b

    def test_exp_of_two_forms(self):
        got = eval_even(SmoothFunction.parse("exp(y1)", 1), [th(1) * th(2) + th(3) * th(4)])
        want = (1 + th(1) * th(2) + th(3) * th(4) + th(1) * th(2) * th(3) * th(4)).to_numeric()
        assert (got - want).max_abs() <= 1e-15

    def test_zero_soul(self):
        got = eval_even(SmoothFunction.parse("sin(y1) + y2", 2), [GrassmannElement.scalar(S4, 1), GrassmannElement.scalar(S4, 2)])
        assert got.soul().is_zero()
        assert got.body() == pytest.approx(0.8414709848078965 + 2)


class TestErrors:
    def test_odd_argument(self):
        with pytest.raises(ParityError):
            eval_even(SmoothFunction.parse("y1", 1), [th(1)])

    def test_mixed_argument(self):
        with pytest.raises(ParityError):
            eval_even(SmoothFunction.parse("y1", 1), [1 + th(1)])

    def test_arity(self):
        with pytest.raises(StructuralError):
            eval_even(SmoothFunction.parse("y1", 1), [th(1) * th(2), th(1) * th(2)])

    def test_complex_body_real_function(self):
        arg = GrassmannElement.scalar(S4, 1j)
        with pytest.raises(DomainError):
            eval_even(SmoothFunction.parse("exp(y1)", 1), [arg])

    def test_complex_body_polynomial_allowed(self):
        i = GaussianRational.make(Fraction(0), Fraction(1))
        arg = GrassmannElement(S4, {0: i, 0b11: Fraction(1)})
        assert eval_even(SmoothFunction.parse("y1^2", 1), [arg]) == GrassmannElement(S4, {0: Fraction(-1), 0b11: 2 * i})

    def test_log_nonpositive_body(self):
        with pytest.raises(DomainError):
            eval_even(SmoothFunction.parse("log(y1)", 1), [-1 + th(1) * th(2)])


class TestPolynomialConsistency:
    def test_random_against_substitution(self):
        rng = random.Random(21)
        for _ in range(60):
            k = rng.randint(1, 3)
            s = rng.randint(0, 4)
            sig = Signature(s)
            terms = {}
            for _ in range(rng.randint(1, 5)):
                e = tuple(rng.randint(0, 3) for _ in range(k))
                terms[e] = Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3]))
            f = SmoothFunction.polynomial(k, terms)
            args = [random_even(rng, sig) for _ in range(k)]
            assert eval_even(f, args) == substitute(f, args)

    def test_multiplicative(self):
        rng = random.Random(22)
        f = SmoothFunction.parse("y1^2*y2 - y2^3/2 + 1", 2)
        g = SmoothFunction.parse("y1 - 3*y2^2", 2)
        for _ in range(20):
            args = [random_even(rng, S4) for _ in range(2)]
            assert eval_even(f * g, args) == eval_even(f, args) * eval_even(g, args)
            assert eval_even(f + g, args) == eval_even(f, args) + eval_even(g, args)


class TestElementary:
    @pytest.mark.parametrize("name,text", [("exp", "exp(y1)"), ("sin", "sin(y1)"), ("sin_sq", "sin(y1^2)")])
    def test_against_sympy_series(self, name, text):
        rng = random.Random(23)
        f = SmoothFunction.parse(text, 1)
        for _ in range(10):
            arg = random_even(rng, S4)
            assert (eval_even(f, [arg]) - sympy_univariate(name, arg)).max_abs() <= 1e-10

    def test_exp_inverse(self):
        rng = random.Random(24)
        f, g = SmoothFunction.parse("exp(y1)", 1), SmoothFunction.parse("exp(-y1)", 1)
        one = GrassmannElement.one(S4).to_numeric()
        for _ in range(10):
            arg = random_even(rng, S4)
            assert (eval_even(f, [arg]) * eval_even(g, [arg]) - one).max_abs() <= 1e-12


class TestComposition:
    def test_polynomial_exact_zero(self):
        res = eval_even_composition_check(
            SmoothFunction.parse("y1^2", 1), [SmoothFunction.parse("y1 + 1", 1)], [th(1) * th(2)]
        )
        assert res.is_zero() and res.backend == "exact"

    def test_exp_of_double(self):
        res = eval_even_composition_check(
            SmoothFunction.parse("exp(y1)", 1), [SmoothFunction.parse("2*y1", 1)], [1 + th(1) * th(2)]
        )
        assert res.max_abs() <= 1e-10

    def test_identity_outer(self):
        inner = SmoothFunction.parse("sin(y1)*y2", 2)
        args = [1 + th(1) * th(2), 2 + th(3) * th(4)]
        assert eval_even_composition_check(SmoothFunction.coordinate(1, 1), [inner], args).max_abs() == 0
