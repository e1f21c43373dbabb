from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from generators import random_singular, random_supermatrix
from superpoint.errors import NotInvertibleError, StructuralError
from superpoint.grassmann import EVEN, MIXED, ODD, GrassmannElement, Signature
from superpoint.linalg import det, matmul
from superpoint.polynomial import Poly
from superpoint.spectral import eigen_extract
from superpoint.supermatrix import ANTICOMMUTE, COMMUTE, NEITHER, SuperMatrix

S1 = Signature(1)
S2 = Signature(2)


def g(sig, i):
    return GrassmannElement.generator(sig, i)


def sm(rows, sig=S2):
    return SuperMatrix.from_entries(rows, sig)


class TestArithmetic:
    def test_identity_is_neutral(self):
        a = sm([[1, g(S2, 1)], [g(S2, 2), 3]])
        one = SuperMatrix.identity(2, S2)
        assert one * a == a == a * one

    def test_odd_scalar_squares_to_zero(self):
        t = SuperMatrix.scalar(2, g(S2, 1))
        assert (t * t).is_zero()

    def test_strictly_upper_product(self):
        a = sm([[0, g(S2, 1)], [0, 0]])
        b = sm([[0, g(S2, 2)], [0, 0]])
        assert (a * b).is_zero()

    def test_shape_mismatch(self):
        with pytest.raises(StructuralError):
            SuperMatrix.identity(2, S2) * SuperMatrix.identity(3, S2)

    def test_body_is_multiplicative(self):
        rng = random.Random(5)
        for _ in range(20):
            a, b = random_supermatrix(rng, 3, 2), random_supermatrix(rng, 3, 2)
            assert (a * b).body() == matmul(a.body(), b.body())

    def test_associativity(self):
        rng = random.Random(6)
        for _ in range(10):
            a, b, c = (random_supermatrix(rng, 3, 3) for _ in range(3))
            assert (a * b) * c == a * (b * c)

    def test_parity(self):
        assert sm([[1, g(S2, 1) * g(S2, 2)], [0, 1]]).parity() == EVEN
        assert sm([[g(S2, 1), 0], [0, g(S2, 2)]]).parity() == ODD
        assert sm([[1, g(S2, 1)], [0, 1]]).parity() == MIXED


class TestInverse:
    def test_identity(self):
        one = SuperMatrix.identity(3, S2)
        assert one.invert() == one

    def test_unipotent(self):
        m = sm([[1, g(S1, 1)], [0, 1]], S1)
        assert m.invert() == sm([[1, -g(S1, 1)], [0, 1]], S1)

    def test_singular_body(self):
        m = sm([[g(S1, 1), 0], [0, 1]], S1)
        with pytest.raises(NotInvertibleError) as exc:
            m.invert()
        assert exc.value.body_determinant == 0
        assert "det = 0" in str(exc.value)

    def test_two_sided_random(self):
        rng = random.Random(7)
        for _ in range(30):
            m = random_supermatrix(rng, rng.randint(1, 4), rng.randint(0, 3), body=None)
            try:
                inv = m.invert()
            except NotInvertibleError:
                assert det(m.body()) == 0
                continue
            one = SuperMatrix.identity(m.r, m.sig)
            assert m * inv == one and inv * m == one

    def test_invertible_iff_body_invertible(self):
        rng = random.Random(8)
        for _ in range(20):
            with pytest.raises(NotInvertibleError):
                random_singular(rng, rng.randint(1, 4), rng.randint(0, 3)).invert()

    def test_numeric_inverse(self):
        m = sm([[2, g(S2, 1) * g(S2, 2)], [1, 3]]).to_numeric()
        one = SuperMatrix.identity(2, S2).to_numeric()
        assert (m * m.invert() - one).max_abs() < 1e-14


class TestCharPoly:
    def test_diagonal(self):
        m = SuperMatrix.from_body([[1, 0], [0, 2]], S1)
        cp = m.charpoly()
        assert cp.poly == (Poly.linear_root(1) * Poly.linear_root(2)) ** 2
        assert cp.degree == 4

    def test_two_form(self):
        m = sm([[g(S2, 1) * g(S2, 2)]])
        assert m.charpoly().poly == Poly.t() ** 3
        assert (m ** 3).is_zero()

    def test_nilpotent_body(self):
        m = SuperMatrix.from_body([[0, 1], [0, 0]], Signature(0))
        assert m.charpoly().poly == Poly.t() ** 2
        assert (m * m).is_zero()

    def test_body_charpoly_matches_sympy(self):
        rng = random.Random(9)
        tt = sympy.Symbol("t")
        for _ in range(20):
            m = random_supermatrix(rng, rng.randint(1, 4), 1)
            ref = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.body()])
            coeffs = sympy.Poly(ref.charpoly(tt).as_expr(), tt).all_coeffs()[::-1]
            assert m.charpoly().body_poly == Poly([Fraction(int(c.p), int(c.q)) for c in coeffs])

    def test_annihilation(self):
        rng = random.Random(10)
        for _ in range(30):
            m = random_supermatrix(rng, rng.randint(1, 4), rng.randint(0, 3))
            assert m.poly_eval(m.charpoly().poly).is_zero()

    def test_factored_display(self):
        m = SuperMatrix.from_body([[1, 0], [0, 0]], S1)
        assert str(m.charpoly().factored(eigen_extract(m))) == "t^2 (t - 1)^2"

    def test_horner_matches_powers(self):
        m = sm([[1, g(S2, 1) * g(S2, 2)], [2, 3]])
        p = Poly([5, -1, 0, 2])
        assert m.poly_eval(p) == (m ** 3).scale(2) - m + SuperMatrix.identity(2, S2).scale(5)


class TestCommutator:
    def test_diagonal(self):
        a = SuperMatrix.from_body([[1, 0], [0, 2]], S2)
        b = SuperMatrix.from_body([[3, 0], [0, 4]], S2)
        assert a.commutator_class(b) == COMMUTE

    def test_odd_scalars(self):
        a = SuperMatrix.scalar(2, g(S2, 1))
        b = SuperMatrix.scalar(2, g(S2, 2))
        assert a.commutator_class(b) == ANTICOMMUTE
        assert a * b != b * a

    def test_neither(self):
        a = SuperMatrix.from_body([[0, 1], [0, 0]], S2)
        b = SuperMatrix.from_body([[0, 0], [1, 0]], S2)
        assert a.commutator_class(b) == NEITHER


class TestSerialization:
    def test_round_trip(self):
        rng = random.Random(11)
        for _ in range(10):
            m = random_supermatrix(rng, 3, 2)
            assert SuperMatrix.from_json(m.to_json()) == m
            n = m.to_numeric()
            assert SuperMatrix.from_json(n.to_json()) == n

    def test_scalar_shorthand(self):
        m = SuperMatrix.from_json({"r": 2, "s": 1, "entries": ["1/2", 0, 0, 3]})
        assert m == SuperMatrix.from_body([[Fraction(1, 2), 0], [0, 3]], S1)

    def test_mixed_literals_promote(self):
        m = SuperMatrix.from_json({"r": 1, "s": 0, "entries": [0.5]})
        assert m.backend == "numeric"
