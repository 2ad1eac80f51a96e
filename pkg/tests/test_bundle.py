"""The surface bundle, bad fibers, pullback and fiber verification."""

import random
from fractions import Fraction

import pytest

from chatelet.bundle import (
    BadFiberSet,
    FiberParam,
    NonarchShrink,
    RealShrink,
    bad_fibers,
    bundle_from_json,
    bundle_to_json,
    default_sample_ts,
    fiber_at,
    good_d_candidates,
    make_bundle,
    pullback,
    pullback_fiber,
    pullback_fiber_param,
    shrink_map,
    standard_g,
    verify_pullback,
)
from chatelet.numbers import squarefree_part
from chatelet.quartic import BinaryQuartic
from chatelet.surface import build_surface, find_params, iskovskikh


@pytest.fixture(scope="module")
def S():
    return build_surface(find_params(100))


@pytest.fixture(scope="module")
def B(S):
    return make_bundle(S)


@pytest.fixture(scope="module")
def F(B):
    return bad_fibers(B)


class TestFiberParam:
    def test_canonicalization(self):
        assert FiberParam.canonical(4, 6) == FiberParam(2, 3)
        assert FiberParam.canonical(-2, -4) == FiberParam(1, 2)
        assert FiberParam.canonical(0, -3) == FiberParam(0, 1)
        assert FiberParam.canonical(Fraction(1, 2), Fraction(1, 3)) == \
            FiberParam(3, 2)

    def test_validation(self):
        with pytest.raises(ValueError):
            FiberParam(0, 0)
        with pytest.raises(ValueError):
            FiberParam(2, 4)
        with pytest.raises(ValueError):
            FiberParam(-1, 2)

    def test_affine(self):
        assert FiberParam(3, 2).affine() == Fraction(3, 2)
        with pytest.raises(ValueError):
            FiberParam(1, 0).affine()


class TestMakeBundle:
    def test_default(self, S, B):
        assert B.Pinf.coeffs == (1, 0, 0, 0, 1)
        assert B.P0 == S.Ptilde
        assert B.alpha == S.alpha

    def test_rejects_reducible(self, S):
        with pytest.raises(ValueError, match="irreducible"):
            make_bundle(S, BinaryQuartic((-1, 0, 0, 0, 1)))

    def test_rejects_proportional(self, S):
        with pytest.raises(ValueError, match="independent"):
            make_bundle(S, S.Ptilde.scale(Fraction(1, 41)))

    def test_rejects_non_constructed(self):
        with pytest.raises(ValueError):
            make_bundle(iskovskikh())


class TestFiberAt:
    def test_special_fiber_exact(self, S, B):
        assert fiber_at(B, FiberParam(0, 1)) is S

    def test_infinity_fiber(self, B):
        T = fiber_at(B, FiberParam(1, 0))
        assert T.Ptilde.coeffs == B.Pinf.coeffs

    def test_one_one(self, S, B):
        T = fiber_at(B, FiberParam(1, 1))
        assert T.Ptilde.coeffs == tuple(
            a + b for a, b in zip(B.Pinf.coeffs, S.Ptilde.coeffs))

    def test_square_scaling_consistency(self, B):
        # (2 : 3) vs the non-canonical (4 : 6): quartics differ by 4
        T = fiber_at(B, FiberParam(2, 3))
        u2, v2 = 16, 36
        scaled = tuple(u2 * ci + v2 * c0
                       for ci, c0 in zip(B.Pinf.coeffs, B.P0.coeffs))
        assert tuple(4 * c for c in T.Ptilde.coeffs) == scaled


class TestBadFibers:
    def test_pencil_degree_and_ends(self, S, B, F):
        assert len(F.R_coeffs) == 13
        assert F.R(1, 0) == 256  # disc of x^4 + w^4
        assert F.R(0, 1) == S.disc()

    def test_roots_exact(self, F):
        for f in F.fibers:
            assert F.R(f.u, f.v) == 0
        assert FiberParam(0, 1) not in F.fibers
        assert FiberParam(1, 0) not in F.fibers

    def test_nonroots_nonzero(self, F):
        rng = random.Random(21)
        checked = 0
        while checked < 20:
            u, v = rng.randint(-50, 50), rng.randint(-50, 50)
            if u == 0 and v == 0:
                continue
            fp = FiberParam.canonical(u, v)
            if fp in F.fibers:
                continue
            assert F.R(fp.u, fp.v) != 0
            checked += 1

    def test_golden_default(self, F):
        # the default bundle's discriminant pencil has no rational roots
        assert F.fibers == ()


class TestGoodD:
    def test_default_list(self, F):
        assert good_d_candidates(F, 6) == [1, 2, 3, 5, 6, 7]

    def test_excludes_square_classes(self):
        F = BadFiberSet(
            fibers=(FiberParam(2, 1), FiberParam(8, 1)),
            R_coeffs=tuple(Fraction(0) for _ in range(13)))
        assert good_d_candidates(F, 5) == [1, 3, 5, 6, 7]

    def test_all_squarefree(self, F):
        for d in good_d_candidates(F, 20):
            assert squarefree_part(d) == d


class TestPullback:
    def test_selected_d_disjoint_from_F(self, B, F):
        d = good_d_candidates(F, 1)[0]
        W = pullback(B, d)
        assert squarefree_part(W.d) == W.d
        assert Fraction(W.d) not in F.affine_classes()

    def test_rejects_bad_d(self, B):
        with pytest.raises(ValueError):
            pullback(B, 4)  # not squarefree
        with pytest.raises(ValueError):
            pullback(B, -3)

    def test_fiber_map(self, S, B):
        W = pullback(B, 2)
        assert pullback_fiber(W, (1, 0)) is S  # t = infinity -> V
        assert pullback_fiber_param(W, (0, 1)) == FiberParam(1, 0)
        assert pullback_fiber_param(W, (3, 1)) == FiberParam(2, 9)
        assert pullback_fiber_param(W, (3, 2)) == FiberParam(8, 9)

    def test_affine_fibers_in_d_class(self, B):
        W = pullback(B, 3)
        for t in [(1, 1), (-2, 1), (5, 3), (7, 2)]:
            fp = pullback_fiber_param(W, t)
            assert squarefree_part(fp.affine()) == 3


class TestShrinkMaps:
    def test_real_image_bound(self):
        rs = shrink_map("real", m=4)
        lo, hi = rs.certify()
        assert (lo, hi) == (0, Fraction(1, 4))
        assert rs(None) == 0
        for t in (Fraction(0), Fraction(1, 3), Fraction(-100)):
            assert lo <= rs(t) <= hi

    def test_real_validation(self):
        with pytest.raises(ValueError):
            RealShrink(m=0)

    def test_standard_g(self):
        g = standard_g(Fraction(1, 2))
        assert g(Fraction(0)) == g(Fraction(1)) == g(None) == Fraction(1, 2)

    def test_nonarch_certificate(self):
        ns = shrink_map("nonarch", p=3, r=1, g=Fraction(1, 2))
        assert ns.M == 6
        assert ns.certify()
        # spot check: units satisfy t^6 = 1 mod 9
        for u in range(1, 9):
            if u % 3:
                assert pow(u, 6, 9) == 1

    def test_nonarch_five(self):
        ns = NonarchShrink(p=5, r=1, g=standard_g(Fraction(2)))
        assert ns.M == 20
        assert ns.certify()

    def test_nonarch_rejects_bad_g(self):
        from chatelet.bundle import RationalMap
        g = RationalMap(num=(Fraction(0), Fraction(1)),
                        den=(Fraction(1), Fraction(0)))  # identity
        with pytest.raises(ValueError):
            NonarchShrink(p=3, r=1, g=g)


@pytest.fixture(scope="module")
def report(B, F):
    W = pullback(B, good_d_candidates(F, 1)[0])
    return verify_pullback(W, default_sample_ts(10), search_H=60)


class TestVerifyPullback:
    def test_special_fiber(self, report):
        assert report.special.invariant_sum == Fraction(1, 2)
        assert report.special.conclusion == "no-rational-point-certified"
        assert not report.special_search.found

    def test_affine_fibers(self, report):
        assert len(report.fibers) == 9
        assert report.all_affine_ok
        for r in report.fibers:
            assert r.smooth
            assert r.irreducible
            assert r.locally_solvable

    def test_sample_must_include_ends(self, B, F):
        W = pullback(B, good_d_candidates(F, 1)[0])
        with pytest.raises(ValueError):
            verify_pullback(W, [(1, 1), (2, 1)])

    def test_default_sample_ts(self):
        ts = default_sample_ts(6)
        assert ts == [(1, 0), (0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1)]


class TestSerialization:
    def test_roundtrip(self, S, B):
        obj = bundle_to_json(B)
        assert obj["Pinf"] == ["1", "0", "0", "0", "1"]
        assert "d" not in obj
        B2 = bundle_from_json(obj, S)
        assert B2.Pinf.coeffs == B.Pinf.coeffs

    def test_pulled_back(self, B):
        obj = bundle_to_json(pullback(B, 2))
        assert obj["d"] == "2"

    def test_p0_mismatch(self, B):
        obj = bundle_to_json(B)
        obj["P0"][0] = "7"
        with pytest.raises(ValueError):
            bundle_from_json(obj, B.source)
