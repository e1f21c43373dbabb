from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpoint.coefficients import EXACT, NUMERIC, GaussianRational
from superpoint.errors import StructuralError
from superpoint.grassmann import (
    ANTICOMMUTE,
    COMMUTE,
    EVEN,
    MIXED,
    ODD,
    GrassmannElement,
    Signature,
    embed,
    merge,
    product_signature,
)

S = 4
SIG = Signature(S)


def th(i, sig=SIG):
    return GrassmannElement.generator(sig, i)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
elements = st.dictionaries(st.integers(0, (1 << S) - 1), coeffs, max_size=6).map(
    lambda t: GrassmannElement(SIG, t)
)


def homogeneous(parity):
    masks = [m for m in range(1 << S) if bin(m).count("1") % 2 == parity]
    return st.dictionaries(st.sampled_from(masks), coeffs, max_size=5).map(lambda t: GrassmannElement(SIG, t))


class TestProduct:
    def test_generator_signs(self):
        assert th(1) * th(2) == GrassmannElement(SIG, {0b11: 1})
        assert th(2) * th(1) == GrassmannElement(SIG, {0b11: -1})

    def test_generator_squares_vanish(self):
        for i in range(1, S + 1):
            assert (th(i) * th(i)).is_zero()

    def test_unit_times_inverse(self):
        a = 1 + th(1) * th(2)
        b = 1 - th(1) * th(2)
        assert a * b == 1

    def test_three_generator_reordering(self):
        assert th(3) * th(1) * th(2) == th(1) * th(2) * th(3)
        assert th(2) * th(1) * th(3) == -(th(1) * th(2) * th(3))

    def test_products_beyond_s_vanish(self):
        top = th(1) * th(2) * th(3) * th(4)
        assert not top.is_zero()
        assert (top * th(2)).is_zero()

    def test_signature_mismatch(self):
        with pytest.raises(StructuralError):
            th(1) * GrassmannElement.generator(Signature(2), 1)

    def test_backend_mismatch(self):
        with pytest.raises(StructuralError):
            th(1) + th(2).to_numeric()

    @settings(max_examples=60, deadline=None)
    @given(elements, elements, elements)
    def test_associative_and_distributive(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) * c == a * c + b * c

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 1), st.integers(0, 1), st.data())
    def test_graded_commutativity(self, pa, pb, data):
        a = data.draw(homogeneous(pa))
        b = data.draw(homogeneous(pb))
        sign = -1 if pa and pb else 1
        assert a * b == (b * a).scale(sign)

    @settings(max_examples=60, deadline=None)
    @given(elements, elements)
    def test_body_is_multiplicative(self, a, b):
        assert (a * b).body() == a.body() * b.body()

    @settings(max_examples=60, deadline=None)
    @given(elements)
    def test_soul_nilpotent(self, a):
        assert (a.soul() ** (S + 1)).is_zero()


class TestBodySoul:
    def test_split(self):
        a = 3 + 2 * th(1) * th(2)
        body, soul = a.body_soul()
        assert body == 3
        assert soul == 2 * th(1) * th(2)

    def test_zero(self):
        body, soul = GrassmannElement.zero(SIG).body_soul()
        assert body == 0 and soul.is_zero()

    def test_pure_soul(self):
        body, soul = th(1).body_soul()
        assert body == 0 and soul == th(1)

    @given(elements)
    def test_recombines(self, a):
        body, soul = a.body_soul()
        assert soul + body == a
        assert 0 not in soul.terms


class TestParity:
    def test_examples(self):
        assert (th(1) * th(2)).parity() == EVEN
        assert (th(1) + th(1) * th(2) * th(3)).parity() == ODD
        assert (1 + th(1)).parity() == MIXED

    def test_zero_is_even(self):
        assert GrassmannElement.zero(SIG).parity() == EVEN


class TestMerge:
    def setup_method(self):
        self.a = GrassmannElement.generator(Signature(1), 1)
        self.b = GrassmannElement.generator(Signature(1), 1)

    def _swapped(self, convention):
        sig = product_signature(1, 1, convention)
        return embed(self.b, sig, 1) * embed(self.a, sig)

    def test_anticommute(self):
        assert self._swapped(ANTICOMMUTE) == -merge(self.a, self.b, ANTICOMMUTE)

    def test_commute(self):
        assert self._swapped(COMMUTE) == merge(self.a, self.b, COMMUTE)

    @pytest.mark.parametrize("convention", [ANTICOMMUTE, COMMUTE])
    def test_identity_factor(self, convention):
        x = 2 + 3 * GrassmannElement.generator(Signature(2), 1) * GrassmannElement.generator(Signature(2), 2)
        one = GrassmannElement.one(Signature(0))
        merged = merge(one, x, convention)
        assert merged == embed(x, merged.sig)

    def test_within_factor_still_anticommutes_under_commute(self):
        sig = product_signature(2, 1, COMMUTE)
        t1, t2 = GrassmannElement.generator(sig, 1), GrassmannElement.generator(sig, 2)
        assert t1 * t2 == -(t2 * t1)


class TestCoefficients:
    def test_gaussian_promotion(self):
        i = GaussianRational.make(Fraction(0), Fraction(1))
        a = GrassmannElement(SIG, {0: i, 1: Fraction(1, 2)})
        sq = a * a
        assert sq.body() == -1
        assert sq.terms[1] == i

    def test_numeric_matches_exact(self):
        a = 1 + Fraction(1, 3) * th(1) * th(2)
        b = 2 - th(1) * th(3) + th(2) * th(4)
        exact = a * b
        num = a.to_numeric() * b.to_numeric()
        assert num.backend == NUMERIC and exact.backend == EXACT
        assert (num - exact.to_numeric()).max_abs() < 1e-15


class TestSerialization:
    def test_format(self):
        a = 3 + Fraction(1, 2) * th(2) * th(4)
        assert a.to_json() == [
            {"subset": [], "re": "3", "im": "0"},
            {"subset": [2, 4], "re": "1/2", "im": "0"},
        ]
        assert GrassmannElement.zero(SIG).to_json() == []

    @given(elements)
    def test_round_trip_exact(self, a):
        assert GrassmannElement.from_json(a.to_json(), SIG) == a

    @given(elements)
    def test_round_trip_numeric(self, a):
        n = a.to_numeric()
        # an empty term list carries no backend of its own
        back = GrassmannElement.from_json(n.to_json(), SIG, None if n.terms else NUMERIC)
        assert back.backend == NUMERIC and back == n

    def test_rejects_unsorted_subset(self):
        with pytest.raises(StructuralError):
            GrassmannElement.from_json([{"subset": [2, 1], "re": "1"}], SIG)

    def test_str(self):
        assert str(3 + 2 * th(1) * th(2)) == "3 + 2θ1θ2"
