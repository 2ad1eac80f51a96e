"""Chatelet-surface bundles: the family with quartic u^2 Pinf + v^2 P0
over P^1, its bad (non-smooth) fibers, square-class-disjoint base-change
coefficients, the d*t^2 pullback with a single pointless rational fiber,
and fiber-by-fiber verification.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import sympy

from chatelet.local import Place
from chatelet.numbers import squarefree_part
from chatelet.quartic import (
    BinaryQuartic,
    Poly4,
    quartic_disc,
    quartic_irreducible,
)
from chatelet.surface import (
    INFINITY,
    ChateletSurface,
    ObstructionReport,
    SearchResult,
    _bad_places_partial,
    _frac_str,
    obstruction_report,
    rational_point_search,
    verify_local_everywhere,
)

__all__ = [
    "FiberParam", "SurfaceBundle", "BadFiberSet", "PulledBackBundle",
    "FiberRecord", "BundleReport", "RealShrink", "NonarchShrink",
    "make_bundle", "fiber_at", "bad_fibers", "good_d_candidates",
    "pullback", "pullback_fiber", "pullback_fiber_param",
    "shrink_map", "standard_g", "RationalMap", "default_sample_ts",
    "verify_pullback", "bundle_to_json", "bundle_from_json",
]


@dataclass(frozen=True)
class FiberParam:
    """A point (u : v) of P^1(Q) in canonical integer form: coprime,
    first nonzero coordinate positive."""

    u: int
    v: int

    def __post_init__(self):
        if self.u == 0 and self.v == 0:
            raise ValueError("(0, 0) is not a point of P^1")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("coordinates must be coprime")
        first = self.u if self.u != 0 else self.v
        if first < 0:
            raise ValueError("first nonzero coordinate must be positive")

    @classmethod
    def canonical(cls, u: Union[int, Fraction],
                  v: Union[int, Fraction]) -> "FiberParam":
        u, v = Fraction(u), Fraction(v)
        den = math.lcm(u.denominator, v.denominator)
        iu, iv = int(u * den), int(v * den)
        g = math.gcd(iu, iv)
        iu, iv = iu // g, iv // g
        if (iu if iu != 0 else iv) < 0:
            iu, iv = -iu, -iv
        return cls(iu, iv)

    @property
    def is_infinity(self) -> bool:
        return self.v == 0

    def affine(self) -> Fraction:
        if self.is_infinity:
            raise ValueError("(1 : 0) has no affine coordinate")
        return Fraction(self.u, self.v)

    def __str__(self) -> str:
        return "oo" if self.is_infinity else str(self.affine())


@dataclass(frozen=True)
class SurfaceBundle:
    """The bundle over P^1 with fiber quartic u^2 Pinf + v^2 P0 at
    (u : v); the fiber at (0 : 1) is the generating surface."""

    source: ChateletSurface
    Pinf: BinaryQuartic

    @property
    def alpha(self) -> Fraction:
        return self.source.alpha

    @property
    def P0(self) -> BinaryQuartic:
        return self.source.Ptilde


@dataclass(frozen=True)
class BadFiberSet:
    """Rational points of P^1 with a non-smooth bundle fiber: the
    rational roots of the degree-12 discriminant pencil R(u, v)."""

    fibers: tuple[FiberParam, ...]
    # R as coefficients of u^i v^(12-i), i = 0..12
    R_coeffs: tuple[Fraction, ...]

    def R(self, u: Fraction, v: Fraction) -> Fraction:
        u, v = Fraction(u), Fraction(v)
        return sum((c * u**i * v ** (12 - i)
                    for i, c in enumerate(self.R_coeffs)), Fraction(0))

    def affine_classes(self) -> set[Fraction]:
        """Square classes of the nonzero affine bad-fiber coordinates."""
        return {squarefree_part(f.affine()) for f in self.fibers
                if not f.is_infinity and f.u != 0}


@dataclass(frozen=True)
class PulledBackBundle:
    """Base change along t -> d t^2: the fiber over t = (t0 : t1) is the
    base fiber at (d t1^2 : t0^2), putting the pointless fiber at
    t = infinity and a square-class-d coordinate under every affine t."""

    base: SurfaceBundle
    d: int


def make_bundle(S: ChateletSurface,
                Pinf: Optional[BinaryQuartic] = None) -> SurfaceBundle:
    """Bundle generated by a constructed surface; Pinf defaults to the
    irreducible form x^4 + w^4."""
    if S.params is None:
        raise ValueError("bundle requires a constructed generating surface")
    S.require_smooth()
    if Pinf is None:
        Pinf = BinaryQuartic((1, 0, 0, 0, 1))
    if _proportional(Pinf.coeffs, S.Ptilde.coeffs):
        raise ValueError("Pinf must be independent of the generating quartic")
    if not quartic_irreducible(Pinf):
        raise ValueError("Pinf must be irreducible over Q")
    return SurfaceBundle(source=S, Pinf=Pinf)


def _proportional(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> bool:
    for i in range(5):
        for j in range(5):
            if a[i] * b[j] != a[j] * b[i]:
                return False
    return True


def fiber_at(B: SurfaceBundle, t: FiberParam) -> ChateletSurface:
    """The Chatelet surface y^2 - alpha z^2 = u^2 Pinf(x) + v^2 P0(x).

    Well-defined on P^1: other representatives of t scale the quartic by
    a nonzero rational square, an isomorphism of the surface.
    """
    if t == FiberParam(0, 1):
        return B.source
    u2, v2 = Fraction(t.u) ** 2, Fraction(t.v) ** 2
    coeffs = tuple(u2 * ci + v2 * c0
                   for ci, c0 in zip(B.Pinf.coeffs, B.P0.coeffs))
    return ChateletSurface(alpha=B.alpha, P=Poly4(coeffs),
                           provenance="fiber")


_U, _V = sympy.symbols("u v")


def bad_fibers(B: SurfaceBundle) -> BadFiberSet:
    """Discriminant pencil R(u, v) = disc(u^2 Pinf + v^2 P0), a binary
    form of degree 12, with its rational roots."""
    coeffs = tuple(
        _U**2 * sympy.Rational(ci.numerator, ci.denominator)
        + _V**2 * sympy.Rational(c0.numerator, c0.denominator)
        for ci, c0 in zip(B.Pinf.coeffs, B.P0.coeffs))
    disc = sympy.expand(_symbolic_quartic_disc(coeffs))
    poly = sympy.Poly(disc, _U, _V)
    R = [Fraction(0)] * 13
    for (i, j), c in poly.terms():
        assert i + j == 12
        R[i] = Fraction(c.p, c.q)
    # v = 0 is never a root: R(1, 0) = disc(Pinf) != 0 (irreducible form)
    roots = []
    univ = sympy.Poly(disc.subs(_V, 1), _U)
    for root, _mult in univ.ground_roots().items():
        q = Fraction(root.p, root.q)
        roots.append(FiberParam.canonical(q.numerator, q.denominator))
    return BadFiberSet(fibers=tuple(sorted(roots, key=lambda f: (f.v, f.u))),
                       R_coeffs=tuple(R))


def _symbolic_quartic_disc(coeffs):
    e, d, c, b, a = coeffs
    return (
        256 * a**3 * e**3 - 192 * a**2 * b * d * e**2
        - 128 * a**2 * c**2 * e**2 + 144 * a**2 * c * d**2 * e
        - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e
        + 18 * a * b * c * d**3 + 16 * a * c**4 * e
        - 4 * a * c**3 * d**2 - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e - 4 * b**3 * d**3
        - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2
    )


def good_d_candidates(F: BadFiberSet, count: int) -> list[int]:
    """The `count` smallest positive squarefree d whose square class
    avoids every nonzero affine bad-fiber coordinate."""
    banned = F.affine_classes()
    out: list[int] = []
    d = 0
    while len(out) < count:
        d += 1
        if squarefree_part(d) != d:
            continue
        if Fraction(d) in banned:
            continue
        out.append(d)
    return out


def pullback(B: SurfaceBundle, d: int) -> PulledBackBundle:
    if d <= 0 or squarefree_part(d) != d:
        raise ValueError("d must be positive and squarefree")
    if Fraction(d) in bad_fibers(B).affine_classes():
        raise ValueError(
            f"d = {d} shares a square class with a bad fiber")
    return PulledBackBundle(base=B, d=d)


def pullback_fiber_param(W: PulledBackBundle,
                         t: tuple[int, int]) -> FiberParam:
    """(u : v) = (d t1^2 : t0^2) under the fiber of W at t = (t0 : t1)."""
    t0, t1 = t
    return FiberParam.canonical(W.d * t1 * t1, t0 * t0)


def pullback_fiber(W: PulledBackBundle,
                   t: tuple[int, int]) -> ChateletSurface:
    return fiber_at(W.base, pullback_fiber_param(W, t))


# ---------------------------------------------------------------------------
# shrink maps (composition gadgets for the fibration argument)


@dataclass(frozen=True)
class RealShrink:
    """t -> 1 / (t^2 + m): maps all of P^1(R) into [0, 1/m]."""

    m: int

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("m must be a positive integer")

    def __call__(self, t: Optional[Fraction]) -> Fraction:
        if t is None:  # infinity
            return Fraction(0)
        t = Fraction(t)
        return 1 / (t * t + self.m)

    def certify(self) -> tuple[Fraction, Fraction]:
        """Exact image bound [0, 1/m]: t^2 + m >= m for real t, and the
        map is positive; infinity goes to 0."""
        return Fraction(0), Fraction(1, self.m)


@dataclass(frozen=True)
class RationalMap:
    """g = num / den in one variable, both degree <= 3."""

    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...]

    def __call__(self, y: Optional[Fraction]) -> Optional[Fraction]:
        if y is None:
            dn = max(i for i, c in enumerate(self.num) if c != 0)
            dd = max(i for i, c in enumerate(self.den) if c != 0)
            if dn > dd:
                return None
            if dn < dd:
                return Fraction(0)
            return self.num[dn] / self.den[dd]
        n = _horner(self.num, Fraction(y))
        d = _horner(self.den, Fraction(y))
        if d == 0:
            return None
        return n / d


def _horner(coeffs, y):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def standard_g(target: Fraction) -> RationalMap:
    """A degree-3 map with g(0) = g(1) = g(infinity) = target:
    g(y) = target + y(y - 1) / (y^3 + 1)."""
    target = Fraction(target)
    # (target*(y^3+1) + y^2 - y) / (y^3 + 1)
    num = (target, Fraction(-1), Fraction(1), target)
    den = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))
    return RationalMap(num=num, den=den)


@dataclass(frozen=True)
class NonarchShrink:
    """t -> g(t^M) with M = p^r (p - 1): every p-adic unit t has
    t^M in 1 + p^(r+1) Z_p, so units land near g(1) = target, while
    t in p Z_p (resp. 1/t in p Z_p) lands near g(0) (resp. g(infinity))."""

    p: int
    r: int
    g: RationalMap

    def __post_init__(self):
        if self.p == 2 or self.r < 1:
            raise ValueError("need an odd prime p and r >= 1")
        g = self.g
        if not (g(Fraction(0)) == g(Fraction(1)) == g(None)):
            raise ValueError("g must send 0, 1, infinity to one point")

    @property
    def M(self) -> int:
        return self.p**self.r * (self.p - 1)

    def __call__(self, t: Optional[Fraction]) -> Optional[Fraction]:
        if t is None:
            return self.g(None)
        return self.g(Fraction(t) ** self.M)

    def certify(self) -> bool:
        """Exhaustively check u^M = 1 mod p^(r+1) for every unit residue
        u mod p^(r+2); with the valuation trichotomy this pins the image
        of t -> t^M, hence of the composite."""
        mod = self.p ** (self.r + 2)
        target_mod = self.p ** (self.r + 1)
        for u in range(1, mod):
            if u % self.p == 0:
                continue
            if pow(u, self.M, mod) % target_mod != 1:
                return False
        return True


def shrink_map(kind: str, **kw) -> Union[RealShrink, NonarchShrink]:
    """shrink_map("real", m=...) or
    shrink_map("nonarch", p=..., r=..., g=RationalMap-or-target)."""
    if kind == "real":
        return RealShrink(m=kw["m"])
    if kind == "nonarch":
        g = kw["g"]
        if not isinstance(g, RationalMap):
            g = standard_g(Fraction(g))
        return NonarchShrink(p=kw["p"], r=kw["r"], g=g)
    raise ValueError(f"unknown shrink kind: {kind}")


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class FiberRecord:
    t: tuple[int, int]
    fiber_param: FiberParam
    smooth: bool
    irreducible: bool
    locally_solvable: bool
    bad_places: tuple[Place, ...]
    disc_cofactor: int
    point_found: Optional[bool]
    point: Optional[tuple[int, int]]
    note: str = ""


@dataclass(frozen=True)
class BundleReport:
    d: int
    special: ObstructionReport
    special_search: SearchResult
    fibers: tuple[FiberRecord, ...]
    n_solvable: int
    n_points_found: int
    all_affine_ok: bool


def default_sample_ts(count: int) -> list[tuple[int, int]]:
    """infinity, 0, then 1, -1, 2, -2, ... until `count` points."""
    ts: list[tuple[int, int]] = [INFINITY, (0, 1)]
    k = 1
    while len(ts) < count:
        ts.append((k, 1))
        if len(ts) < count:
            ts.append((-k, 1))
        k += 1
    return ts[:count]


def verify_pullback(W: PulledBackBundle,
                    sample_ts: Optional[list[tuple[int, int]]] = None,
                    search_H: int = 100,
                    obstruction_samples: int = 20,
                    seed: int = 0) -> BundleReport:
    """Verify the pulled-back family fiber by fiber.

    The special fiber (t = infinity) must carry a certified obstruction;
    every sampled affine fiber must be smooth (hard failure otherwise)
    and is checked for quartic irreducibility, exact everywhere-local
    solvability, and a height-bounded rational point (diagnostic: the
    Hasse principle guarantees existence on irreducible locally solvable
    fibers, but not within any height bound).
    """
    if sample_ts is None:
        sample_ts = default_sample_ts(52)
    if INFINITY not in sample_ts or (0, 1) not in sample_ts:
        raise ValueError("sample must include t = infinity and t = 0")
    F = bad_fibers(W.base)
    d_class = Fraction(squarefree_part(W.d))
    special = obstruction_report(W.base.source,
                                 samples_per_place=obstruction_samples,
                                 seed=seed)
    if special.conclusion != "no-rational-point-certified":
        raise ArithmeticError("special fiber obstruction not certified")
    special_search = rational_point_search(W.base.source, search_H)
    records = []
    for t in sample_ts:
        if t == INFINITY:
            continue
        fp = pullback_fiber_param(W, t)
        S = pullback_fiber(W, t)
        smooth = S.is_smooth()
        if not smooth:
            raise ArithmeticError(f"sampled affine fiber at t={t} is "
                                  "not smooth")
        if fp in F.fibers:
            raise ArithmeticError(f"sampled fiber {fp} lies in the bad set")
        note = ""
        if t != (0, 1):
            if squarefree_part(fp.affine()) != d_class:
                raise ArithmeticError(
                    f"fiber coordinate {fp} off the square class of d")
        irr = quartic_irreducible(S.Ptilde)
        if not irr:
            note = "thin-set hit: reducible fiber quartic"
        local = verify_local_everywhere(S)
        search = rational_point_search(S, search_H)
        records.append(FiberRecord(
            t=t, fiber_param=fp, smooth=True, irreducible=irr,
            locally_solvable=local.all_solvable,
            bad_places=tuple(r.place for r in local.results),
            disc_cofactor=local.uncertified_disc_cofactor,
            point_found=search.found, point=search.x, note=note))
    return BundleReport(
        d=W.d,
        special=special,
        special_search=special_search,
        fibers=tuple(records),
        n_solvable=sum(r.locally_solvable for r in records),
        n_points_found=sum(bool(r.point_found) for r in records),
        all_affine_ok=all(r.smooth and r.locally_solvable
                          for r in records),
    )


# ---------------------------------------------------------------------------
# serialization


def bundle_to_json(B: Union[SurfaceBundle, PulledBackBundle]) -> dict:
    d = None
    if isinstance(B, PulledBackBundle):
        d = B.d
        B = B.base
    obj = {
        "alpha": _frac_str(B.alpha),
        "P0": [_frac_str(c) for c in B.P0.coeffs],
        "Pinf": [_frac_str(c) for c in B.Pinf.coeffs],
    }
    if d is not None:
        obj["d"] = str(d)
    return obj


def bundle_from_json(obj: Union[str, dict],
                     source: ChateletSurface) -> SurfaceBundle:
    """Rebuild a bundle around its generating surface; P0 must match."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if [_frac_str(c) for c in source.Ptilde.coeffs] != obj["P0"]:
        raise ValueError("P0 does not match the generating surface")
    return make_bundle(
        source,
        BinaryQuartic(tuple(Fraction(c) for c in obj["Pinf"])))
