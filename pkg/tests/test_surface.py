"""Construction, local solvability, obstruction and global search."""

import json
import random
from fractions import Fraction

import pytest

from chatelet.local import REAL, finite_place, hilbert_symbol
from chatelet.quartic import Poly4
from chatelet.surface import (
    ChateletParams,
    ChateletSurface,
    InvariantNotConstantError,
    ParamSearchError,
    bad_places,
    brauer_class,
    build_surface,
    eval_invariant,
    eval_invariant_all_reps,
    find_params,
    iskovskikh,
    local_solvable_surface,
    obstruction_report,
    rational_point_search,
    sample_certified_points,
    surface_from_json,
    surface_to_json,
    verify_local_everywhere,
)


@pytest.fixture(scope="module")
def S():
    return build_surface(find_params(100))


class TestParams:
    def test_derived_values(self):
        p = find_params(100)
        assert (p.a, p.b, p.c) == (41, 17, 12)

    def test_bound_too_small(self):
        with pytest.raises(ParamSearchError):
            find_params(16)

    def test_validation(self):
        with pytest.raises(ValueError):
            ChateletParams(a=40, b=17, c=12)  # a not prime
        with pytest.raises(ValueError):
            ChateletParams(a=41, b=17, c=13)  # b does not divide ac+1
        with pytest.raises(ValueError):
            ChateletParams(a=73, b=17, c=12)  # a is a square mod b
        with pytest.raises(ValueError):
            ChateletParams(a=7, b=17, c=12)  # a not 1 mod 8


class TestBuild:
    def test_expansion(self, S):
        assert S.alpha == 697
        assert S.P.coeffs == (5916, 0, 985, 0, 41)

    def test_factorized_form(self, S):
        # P(x) = (x^2 + 12)(41 x^2 + 493)
        for x in (0, 1, Fraction(-5, 3), 7):
            assert S.P(x) == (x * x + 12) * (41 * x * x + 493)

    def test_smooth(self, S):
        assert S.disc() == 3880896
        assert S.is_smooth()

    def test_iskovskikh(self):
        I = iskovskikh()
        assert I.alpha == -1
        assert I.P.coeffs == (-6, 0, 5, 0, -1)
        for x in (0, Fraction(3, 2)):
            assert I.P(x) == (x * x - 2) * (3 - x * x)

    def test_singular_rejected(self):
        S = ChateletSurface(alpha=Fraction(2), P=Poly4((0, 0, 1, 0, 0)),
                            provenance="user")
        with pytest.raises(ValueError):
            S.require_smooth()


class TestBadPlaces:
    def test_constructed(self, S):
        assert [str(v) for v in bad_places(S)] == \
            ["oo", "2", "3", "17", "29", "41"]

    def test_iskovskikh(self):
        assert [str(v) for v in bad_places(iskovskikh())] == \
            ["oo", "2", "3"]


class TestLocalSolvability:
    def test_constructed_everywhere(self, S):
        rep = verify_local_everywhere(S)
        assert rep.all_solvable
        assert rep.uncertified_disc_cofactor == 1
        for r in rep.results:
            assert r.witness is not None

    def test_iskovskikh_everywhere(self):
        rep = verify_local_everywhere(iskovskikh())
        assert rep.all_solvable

    def test_witness_certificates_honest(self, S):
        for v in bad_places(S):
            ok, wit = local_solvable_surface(S, v)
            assert ok
            m, n = wit.x
            value = S.Ptilde.value(n, m)
            if wit.certificate == 1:
                assert value != 0
                if v.is_real:
                    assert S.alpha > 0 or value > 0
                else:
                    assert hilbert_symbol(S.alpha, value, v) == 1

    def test_real_failure_detected(self):
        S = ChateletSurface(alpha=Fraction(-1), P=Poly4((-1, 0, 0, 0, -1)),
                            provenance="user")
        ok, wit = local_solvable_surface(S, REAL)
        assert not ok and wit is None

    def test_padic_failure_detected(self):
        # no Q_3-point: confirmed by exhausting primitive residues mod 3^5
        S = ChateletSurface(alpha=Fraction(3), P=Poly4((-4, 1, 2, -3, 3)),
                            provenance="user")
        ok, _ = local_solvable_surface(S, finite_place(3))
        assert not ok

    def test_matches_sampling(self):
        # decider never says "unsolvable" where sampling finds a fiber
        rng = random.Random(5)
        for _ in range(40):
            coeffs = tuple(rng.randint(-8, 8) for _ in range(5))
            if all(c == 0 for c in coeffs):
                continue
            S = ChateletSurface(alpha=Fraction(rng.choice([-1, 2, 3, -5])),
                                P=Poly4(coeffs), provenance="user")
            if S.disc() == 0:
                continue
            for p in (2, 3, 5):
                v = finite_place(p)
                got, _ = local_solvable_surface(S, v)
                if got:
                    continue
                for m in range(-20, 21):
                    for n in (1, 2, 3):
                        val = S.Ptilde.value(n, m)
                        assert val != 0
                        assert hilbert_symbol(S.alpha, val, v) == -1


class TestBrauer:
    def test_class_fields(self, S):
        A = brauer_class(S)
        assert (A.alpha, A.a, A.b, A.c) == (697, 41, 17, 12)

    def test_requires_constructed(self):
        with pytest.raises(ValueError):
            brauer_class(iskovskikh())

    def test_invariant_constant_and_rep_independent(self, S):
        A = brauer_class(S)
        for v in bad_places(S):
            pts = sample_certified_points(S, v, 25, seed=7)
            invs = set()
            for pt in pts:
                reps = eval_invariant_all_reps(A, pt)
                assert len(set(reps)) == 1
                invs.add(eval_invariant(A, pt))
            assert len(invs) == 1
            expected = Fraction(1, 2) if str(v) == "17" else Fraction(0)
            assert invs == {expected}

    def test_representations_never_both_vanish(self, S):
        # resultant of x^2+c and a x^2+ac+1 is nonzero: f2 - a f1 = n^2
        A = brauer_class(S)
        for m, n in ((1, 0), (0, 1), (3, 2), (-7, 5)):
            f1, f2 = A.rep_values((m, n))
            assert f2 - A.a * f1 == n * n
            assert f1 != 0 or f2 != 0


class TestObstruction:
    def test_report(self, S):
        rep = obstruction_report(S, samples_per_place=15, seed=3)
        assert rep.invariant_sum == Fraction(1, 2)
        assert rep.conclusion == "no-rational-point-certified"
        by_place = {str(r.place): r.invariant for r in rep.records}
        assert by_place["17"] == Fraction(1, 2)
        assert all(inv == 0 for place, inv in by_place.items()
                   if place != "17")

    def test_determinism(self, S):
        a = obstruction_report(S, samples_per_place=10, seed=4)
        b = obstruction_report(S, samples_per_place=10, seed=4)
        assert a == b

    def test_nonconstant_is_hard_failure(self, S, monkeypatch):
        from chatelet import surface as mod

        def bad_reps(A, pt):
            return [Fraction(0), Fraction(1, 2)]

        monkeypatch.setattr(mod, "eval_invariant_all_reps", bad_reps)
        with pytest.raises(InvariantNotConstantError):
            obstruction_report(S, samples_per_place=5, seed=0)


class TestSearch:
    def test_no_point_small_heights(self, S):
        res = rational_point_search(S, 60)
        assert not res.found

    def test_planted_point(self):
        S = ChateletSurface(alpha=Fraction(2), P=Poly4((6, 0, 0, 0, 1)),
                            provenance="user")
        res = rational_point_search(S, 10)
        assert res.found
        m, n = res.x
        value = S.Ptilde.value(n, m)
        y, z = res.witness
        assert y * y - 2 * z * z == value

    def test_degenerate_fiber_found(self):
        # P has the rational root x = 1
        S = ChateletSurface(alpha=Fraction(3), P=Poly4((-1, 0, 0, 0, 1)),
                            provenance="user")
        res = rational_point_search(S, 5)
        assert res.found


class TestSerialization:
    def test_roundtrip(self, S):
        obj = surface_to_json(S)
        assert obj["alpha"] == "697"
        assert obj["P"] == ["5916", "0", "985", "0", "41"]
        T = surface_from_json(json.dumps(obj))
        assert T.alpha == S.alpha
        assert T.P.coeffs == S.P.coeffs

    def test_fraction_coeffs(self):
        S = ChateletSurface(alpha=Fraction(-1, 2),
                            P=Poly4((Fraction(1, 3), 0, 0, 0, 1)),
                            provenance="user")
        obj = surface_to_json(S)
        assert obj["alpha"] == "-1/2"
        T = surface_from_json(obj)
        assert T.P.coeffs == S.P.coeffs
