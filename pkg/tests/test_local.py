"""Hilbert symbols, local squares and conic solvability."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chatelet.local import (
    REAL,
    Place,
    conic_solvable_global,
    conic_solvable_local,
    finite_place,
    hilbert_bruteforce_oracle,
    hilbert_symbol,
    inv_from_symbol,
    is_local_square,
    product_formula_check,
    support_places,
)

nonzero = st.integers(min_value=-200, max_value=200).filter(lambda n: n != 0)
small_primes = st.sampled_from([2, 3, 5, 7, 11, 13])
places = st.sampled_from(
    [REAL] + [finite_place(p) for p in (2, 3, 5, 7, 11, 13, 17)])


class TestPlace:
    def test_ordering(self):
        vs = [finite_place(5), REAL, finite_place(2)]
        assert sorted(vs) == [REAL, finite_place(2), finite_place(5)]

    def test_str(self):
        assert str(REAL) == "oo"
        assert str(finite_place(17)) == "17"

    def test_nonprime_rejected(self):
        with pytest.raises(ValueError):
            finite_place(6)


class TestClosedForm:
    def test_real(self):
        assert hilbert_symbol(-1, -1, REAL) == -1
        assert hilbert_symbol(-1, 2, REAL) == 1
        assert hilbert_symbol(3, 5, REAL) == 1

    def test_derived_values(self):
        v17 = finite_place(17)
        assert hilbert_symbol(697, 41, v17) == -1
        assert hilbert_symbol(697, 12, v17) == -1
        assert hilbert_symbol(2, 7, finite_place(2)) == 1

    def test_rational_arguments(self):
        v = finite_place(3)
        assert hilbert_symbol(Fraction(1, 3), 3, v) == \
            hilbert_symbol(3, 3, v)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            hilbert_symbol(0, 1, REAL)


class TestOracleAgreement:
    @given(nonzero, nonzero, small_primes)
    @settings(max_examples=150, deadline=None)
    def test_matches_bruteforce(self, a, b, p):
        assert hilbert_symbol(a, b, finite_place(p)) == \
            hilbert_bruteforce_oracle(a, b, p)

    def test_precision_guard(self):
        with pytest.raises(ValueError):
            hilbert_bruteforce_oracle(8, 8, 2, precision=3)


class TestSymbolProperties:
    @given(nonzero, nonzero, places)
    @settings(max_examples=200, deadline=None)
    def test_symmetry(self, a, b, v):
        assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)

    @given(nonzero, nonzero, nonzero, places)
    @settings(max_examples=200, deadline=None)
    def test_bimultiplicative(self, a, b, c, v):
        assert hilbert_symbol(a * b, c, v) == \
            hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v)

    @given(nonzero, nonzero, st.integers(min_value=1, max_value=30), places)
    @settings(max_examples=150, deadline=None)
    def test_square_class_invariance(self, a, b, s, v):
        assert hilbert_symbol(a * s * s, b, v) == hilbert_symbol(a, b, v)

    @given(nonzero, places)
    @settings(max_examples=100, deadline=None)
    def test_a_minus_a(self, a, v):
        assert hilbert_symbol(a, -a, v) == 1

    @given(nonzero.filter(lambda a: a != 1), places)
    @settings(max_examples=100, deadline=None)
    def test_a_one_minus_a(self, a, v):
        assert hilbert_symbol(a, 1 - a, v) == 1

    @given(nonzero, places)
    @settings(max_examples=100, deadline=None)
    def test_square_second_slot(self, a, v):
        assert hilbert_symbol(a, 1, v) == 1
        assert hilbert_symbol(a, 4, v) == 1


class TestProductFormula:
    @given(st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6),
                        max_denominator=10**6).filter(lambda q: q != 0),
           st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6),
                        max_denominator=10**6).filter(lambda q: q != 0))
    @settings(max_examples=150, deadline=None)
    def test_holds(self, a, b):
        assert product_formula_check(a, b)

    def test_support(self):
        vs = support_places(697, 41)
        assert vs == [REAL, finite_place(2), finite_place(17),
                      finite_place(41)]


class TestLocalSquare:
    def test_real(self):
        assert is_local_square(4, REAL)
        assert not is_local_square(-4, REAL)

    def test_odd(self):
        v = finite_place(7)
        assert is_local_square(2, v)
        assert not is_local_square(3, v)
        assert not is_local_square(7, v)
        assert is_local_square(Fraction(2, 49), v)

    def test_two(self):
        v = finite_place(2)
        assert is_local_square(17, v)
        assert not is_local_square(3, v)
        assert not is_local_square(2, v)

    @given(nonzero, places)
    @settings(max_examples=100, deadline=None)
    def test_square_characterizes_symbol(self, a, v):
        if is_local_square(a, v):
            for b in (-1, 2, 3, 5):
                assert hilbert_symbol(a, b, v) == 1


class TestInv:
    def test_values(self):
        assert inv_from_symbol(1) == 0
        assert inv_from_symbol(-1) == Fraction(1, 2)
        with pytest.raises(ValueError):
            inv_from_symbol(0)


class TestConic:
    def test_local_zero(self):
        assert conic_solvable_local(697, 0, finite_place(17))

    def test_global_examples(self):
        ok, wit = conic_solvable_global(2, 7, want_witness=True)
        assert ok and wit is not None
        y, z = wit
        assert y * y - 2 * z * z == 7
        assert conic_solvable_global(-1, -1)[0] is False
        # the x = 0 fiber of the constructed surface
        assert conic_solvable_global(697, 5916)[0] is False

    @given(nonzero, nonzero)
    @settings(max_examples=100, deadline=None)
    def test_global_iff_everywhere_local(self, alpha, r):
        ok, _ = conic_solvable_global(alpha, r)
        everywhere = all(
            conic_solvable_local(alpha, r, v)
            for v in support_places(alpha, r))
        assert ok == everywhere
