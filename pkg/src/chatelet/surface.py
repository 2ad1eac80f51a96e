"""Chatelet surfaces y^2 - alpha z^2 = P(x): construction, exact local
solvability, the quaternion Brauer class and its obstruction, and
height-bounded global point search.

The central construction takes primes a, b = 1 mod 8 with a a non-square
mod b and c with b | ac+1, and builds the surface

    y^2 - ab z^2 = (x^2 + c)(a x^2 + ac + 1),

which has points over every completion of Q but no rational point.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import sympy

from chatelet import _kernel
from chatelet.local import (
    REAL,
    Place,
    conic_solvable_global,
    finite_place,
    hilbert_symbol,
    inv_from_symbol,
    is_local_square,
)
from chatelet.numbers import (
    Factorization,
    Rational,
    factorize,
    is_prime,
    legendre,
    mod_inverse,
    partial_factorize,
    squarefree_part,
    valuation,
)
from chatelet.quartic import BinaryQuartic, Poly4, homogenize, quartic_disc

__all__ = [
    "ChateletParams", "ChateletSurface", "CertifiedLocalX", "BrauerClass",
    "LocalPlaceResult", "LocalReport", "ObstructionReport", "SearchResult",
    "find_params", "build_surface", "iskovskikh", "bad_places",
    "local_solvable_surface", "verify_local_everywhere", "brauer_class",
    "eval_invariant", "sample_certified_points", "obstruction_report",
    "rational_point_search", "surface_to_json", "surface_from_json",
    "ParamSearchError", "InsufficientPointsError", "InvariantNotConstantError",
]

ProjectivePoint = tuple[int, int]  # x = (m : n) in P^1(Q); (1, 0) is infinity

INFINITY: ProjectivePoint = (1, 0)


class ParamSearchError(ValueError):
    """No admissible (a, b, c) below the requested bound."""


class InsufficientPointsError(RuntimeError):
    """Fewer certified local points exist in range than were requested."""


class InvariantNotConstantError(RuntimeError):
    """Sampled local invariants disagree at one place; this would
    falsify the obstruction computation and is a hard failure."""


@dataclass(frozen=True)
class ChateletParams:
    """Parameters (a, b, c) of the Hasse-principle counterexample.

    a, b are primes = 1 mod 8 exceeding 5, a is not a square mod b,
    and b divides ac + 1.
    """

    a: int
    b: int
    c: int

    def __post_init__(self):
        if not (is_prime(self.a) and is_prime(self.b)):
            raise ValueError("a and b must be prime")
        if self.a <= 5 or self.b <= 5:
            raise ValueError("a and b must exceed 5")
        if self.a % 8 != 1 or self.b % 8 != 1:
            raise ValueError("a and b must be = 1 mod 8")
        if self.a == self.b:
            raise ValueError("a and b must be distinct")
        if legendre(self.a % self.b, self.b) != -1:
            raise ValueError("a must be a non-square mod b")
        if (self.a * self.c + 1) % self.b != 0:
            raise ValueError("b must divide a*c + 1")


@dataclass(frozen=True)
class ChateletSurface:
    """(alpha, P) for y^2 - alpha z^2 = P(x), with homogenization P~."""

    alpha: Fraction
    P: Poly4
    provenance: str  # "constructed" | "iskovskikh" | "fiber" | "user"
    params: Optional[ChateletParams] = None
    Ptilde: BinaryQuartic = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        object.__setattr__(self, "Ptilde", homogenize(self.P))

    def disc(self) -> Fraction:
        return quartic_disc(self.Ptilde)

    def is_smooth(self) -> bool:
        return self.disc() != 0

    def require_smooth(self) -> None:
        if not self.is_smooth():
            raise ValueError("surface is not smooth (repeated quartic root)")

    def surface_id(self) -> str:
        if self.params is not None:
            p = self.params
            return f"constructed(a={p.a},b={p.b},c={p.c})"
        coeffs = ",".join(str(c) for c in self.P.coeffs)
        return f"{self.provenance}(alpha={self.alpha};P={coeffs})"


@dataclass(frozen=True)
class CertifiedLocalX:
    """An x in P^1(Q) whose fiber conic provably has a Q_v-point.

    certificate is +1 (Hilbert symbol of (alpha, P~(x)) at the place) or
    the string "degenerate" when P~(x) = 0 there (the fiber then contains
    the point (x, 0, 0), possibly after a v-adic Hensel lift).
    """

    x: ProjectivePoint
    place: Place
    certificate: Union[int, str]


@dataclass(frozen=True)
class BrauerClass:
    """The quaternion class (ab, x^2+c) on a constructed surface.

    Carries the three interchangeable second-slot representations
    x^2 + c,  a x^2 + ac + 1,  1 + c/x^2; at every certified local point
    any nonvanishing representation gives the same local invariant.
    """

    alpha: int
    a: int
    b: int
    c: int

    def rep_values(self, x: ProjectivePoint) -> tuple[Fraction, Fraction]:
        """Homogeneous values of x^2 + c and a x^2 + ac + 1 at (m : n).

        Both are homogeneous of even degree, so their square classes are
        well-defined on P^1.
        """
        m, n = x
        f1 = Fraction(m * m + self.c * n * n)
        f2 = Fraction(self.a * m * m + (self.a * self.c + 1) * n * n)
        return f1, f2


# ---------------------------------------------------------------------------
# construction


def find_params(bound: int) -> ChateletParams:
    """Lexicographically least admissible (b, a, c), all below bound."""
    b = next((q for q in range(7, bound + 1)
              if q % 8 == 1 and is_prime(q)), None)
    if b is None:
        raise ParamSearchError(f"not found below bound {bound}")
    a = next((q for q in range(7, bound + 1)
              if q % 8 == 1 and q != b and is_prime(q)
              and legendre(q % b, b) == -1), None)
    if a is None:
        raise ParamSearchError(f"not found below bound {bound}")
    c = (-mod_inverse(a, b)) % b
    if c > bound:
        raise ParamSearchError(f"not found below bound {bound}")
    return ChateletParams(a=a, b=b, c=c)


def build_surface(params: ChateletParams) -> ChateletSurface:
    """The surface y^2 - ab z^2 = (x^2 + c)(a x^2 + ac + 1)."""
    a, c = params.a, params.c
    # expand (x^2 + c)(a x^2 + (ac+1))
    coeffs = (c * (a * c + 1), 0, a * c + (a * c + 1), 0, a)
    surface = ChateletSurface(
        alpha=Fraction(params.a * params.b),
        P=Poly4(coeffs),
        provenance="constructed",
        params=params,
    )
    surface.require_smooth()
    return surface


def iskovskikh() -> ChateletSurface:
    """Iskovskikh's surface y^2 + z^2 = (x^2 - 2)(3 - x^2)."""
    return ChateletSurface(
        alpha=Fraction(-1),
        P=Poly4((-6, 0, 5, 0, -1)),
        provenance="iskovskikh",
    )


# ---------------------------------------------------------------------------
# bad places


def bad_places(S: ChateletSurface) -> list[Place]:
    """Places where local solvability is not forced by the unramified-norm
    argument: the real place, 2, primes of alpha, primes of disc(P~)."""
    S.require_smooth()
    places, cofactor = _bad_places_partial(S)
    if cofactor != 1:
        # complete the factorization or fail loudly; bounded-effort
        # callers use _bad_places_partial directly
        extra = factorize(cofactor)
        places = sorted(set(places) | {finite_place(p)
                                       for p in extra.primes()})
    return places


def _bad_places_partial(S: ChateletSurface) -> tuple[list[Place], int]:
    """Bad places with all primes below 10^6 (and whatever Pollard rho
    splits cheaply); the returned cofactor collects unsplit large prime
    factors of the discriminant, which are provably good places (see
    _large_prime_places_are_good)."""
    primes = {2}
    alpha_support = (Fraction(S.alpha).numerator
                     * Fraction(S.alpha).denominator)
    primes.update(factorize(alpha_support).primes())
    disc = S.disc()
    disc_certified, cofactor = partial_factorize(
        disc.numerator, rho_budget=8)
    primes.update(disc_certified.primes())
    if cofactor != 1:
        _large_prime_places_are_good(S, cofactor, alpha_support)
    places = [REAL] + [finite_place(p) for p in sorted(primes)]
    return places, cofactor


def _large_prime_places_are_good(S: ChateletSurface, cofactor: int,
                                 alpha_support: int) -> None:
    """Certify that every prime q dividing the cofactor is a place where
    the surface trivially has points.

    All such q exceed 10^6 and are odd.  Provided q divides neither alpha
    nor the content of the integer model of P~, some x in P^1(F_q) avoids
    the <= 4 roots of P~ mod q (q + 1 > 4 points available), so P~(x) is
    a q-adic unit and (alpha, P~(x))_q = +1.
    """
    ints = S.Ptilde.integer_square_scaled()
    content = math.gcd(*ints)
    if math.gcd(cofactor, alpha_support * content) != 1:
        raise ArithmeticError(
            "cannot certify large discriminant factors as good places")


# ---------------------------------------------------------------------------
# local solvability


_SYMPY_X = sympy.Symbol("x")


def _chart_polys(S: ChateletSurface) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integer polynomials f_A(x) = P~(1, x) and f_B(w) = P~(w, 1),
    scaled by a common rational square (classes preserved)."""
    ints = S.Ptilde.integer_square_scaled()
    return ints, tuple(reversed(ints))


def _eval_int_poly(coeffs: tuple[int, ...], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass
class _LocalDecider:
    """Exact decision of V(Q_p) != 0 by adaptive residue subdivision.

    A residue class x = x0 mod p^k where the value P~(x) has valuation
    small relative to k has a constant square class, hence a decided
    Hilbert symbol.  Undecided classes are split into their p children;
    classes passing the Newton criterion contain a Q_p-root of P~ (a
    degenerate fiber with an obvious point).  Terminates for smooth
    surfaces: valuations away from roots are bounded, and roots in Q_p
    are simple, so Newton eventually certifies them.
    """

    S: ChateletSurface
    p: int
    max_depth: int = 0

    def __post_init__(self):
        if not self.max_depth:
            alpha = Fraction(self.S.alpha)
            disc = self.S.disc()
            base = (valuation(4 * alpha, self.p)
                    + (valuation(disc, self.p) if disc != 0 else 0))
            self.max_depth = abs(base) + 3 + 64

    def solve(self) -> tuple[bool, Optional[CertifiedLocalX]]:
        f_a, f_b = _chart_polys(self.S)
        # quick pass: exact symbols at six fixed points of P^1(Q).  For
        # p > 5 coprime to alpha and the content these are distinct mod
        # p and at most four can be roots of the quartic, so one gives a
        # unit value and the symbol +1 -- the sweep below never runs at
        # large primes.
        for f, x0, chart in [(f_a, 0, "A"), (f_a, 1, "A"), (f_a, 2, "A"),
                             (f_a, 3, "A"), (f_a, 4, "A"), (f_b, 0, "B")]:
            val = _eval_int_poly(f, x0)
            if val == 0:
                return True, self._certificate(chart, x0, "degenerate")
            if hilbert_symbol(self.S.alpha, Fraction(val),
                              finite_place(self.p)) == 1:
                return True, self._certificate(chart, x0, 1)
        for j in range(self.p):
            found = self._decide(f_a, j, 1, chart="A")
            if found is not None:
                return True, found
        # chart at infinity: w = 0 mod p (units are chart A's territory)
        found = self._decide(f_b, 0, 1, chart="B")
        if found is not None:
            return True, found
        return False, None

    def _certificate(self, chart: str, x0: int,
                     cert: Union[int, str]) -> CertifiedLocalX:
        point = (x0, 1) if chart == "A" else ((1, x0) if x0 else INFINITY)
        return self._make(point, cert)

    def _make(self, point, cert):
        return CertifiedLocalX(x=point, place=finite_place(self.p),
                               certificate=cert)

    def _decide(self, f: tuple[int, ...], x0: int, k: int,
                chart: str) -> Optional[CertifiedLocalX]:
        p = self.p
        val = _eval_int_poly(f, x0)
        if val == 0:
            return self._certificate(chart, x0, "degenerate")
        v = _int_valuation(val, p)
        determined = (v <= k - 3) if p == 2 else (v < k)
        if determined:
            if hilbert_symbol(self.S.alpha, Fraction(val),
                              finite_place(p)) == 1:
                return self._certificate(chart, x0, 1)
            return None
        deriv = _eval_int_poly(_derivative(f), x0)
        if deriv != 0 and v > 2 * _int_valuation(deriv, p):
            # Newton/Hensel: a Q_p-root of the quartic near x0
            return self._certificate(chart, x0, "degenerate")
        if k >= self.max_depth:
            raise ArithmeticError(
                f"local decision at p={p} did not stabilize by depth {k}")
        step = p**k
        for j in range(p):
            found = self._decide(f, x0 + j * step, k + 1, chart)
            if found is not None:
                return found
        return None


def _derivative(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(i * c for i, c in enumerate(coeffs))[1:] or (0,)


def _real_solvable(S: ChateletSurface) -> tuple[bool, Optional[CertifiedLocalX]]:
    alpha = Fraction(S.alpha)
    ints = S.Ptilde.integer_square_scaled()
    if ints[4] == 0:
        # P~ vanishes at infinity: the point (infinity, 0, 0)
        return True, CertifiedLocalX(INFINITY, REAL, "degenerate")
    if alpha > 0:
        for m in range(0, 6):
            if S.Ptilde.value(1, m) != 0:
                return True, CertifiedLocalX((m, 1), REAL, 1)
    # alpha < 0: need P(x) >= 0 somewhere
    poly = sympy.Poly(list(reversed(ints)), _SYMPY_X)
    candidates = {Fraction(0)}
    intervals = poly.intervals()
    endpoints: list[Fraction] = []
    for (lo, hi), _mult in intervals:
        endpoints.extend((Fraction(lo), Fraction(hi)))
    if endpoints:
        endpoints.sort()
        candidates.add(endpoints[0] - 1)
        candidates.add(endpoints[-1] + 1)
        for left, right in zip(endpoints, endpoints[1:]):
            candidates.add((left + right) / 2)
    for x in sorted(candidates):
        value = S.Ptilde.value(1, x)
        if value == 0:
            return True, CertifiedLocalX(
                (x.numerator, x.denominator), REAL, "degenerate")
        if value > 0:
            return True, CertifiedLocalX(
                (x.numerator, x.denominator), REAL, 1)
    # rational roots give degenerate fibers even when P < 0 elsewhere
    for root in poly.ground_roots():
        r = Fraction(sympy.Rational(root))
        return True, CertifiedLocalX((r.numerator, r.denominator),
                                     REAL, "degenerate")
    return False, None


def local_solvable_surface(
    S: ChateletSurface, v: Place,
) -> tuple[bool, Optional[CertifiedLocalX]]:
    """Exact decision of V(Q_v) != 0, with a certified x-coordinate when
    solvable.

    V(Q_v) is nonempty iff some x in P^1(Q_v) has (alpha, P~(x))_v = +1
    or P~(x) = 0.
    """
    S.require_smooth()
    if v.is_real:
        return _real_solvable(S)
    if v.p > 10**5:
        # Feasibility of the residue sweep at huge p rests on the
        # unit-value argument: p odd and coprime to alpha and to the
        # quartic's content guarantees an early +1 fiber (at most 4
        # roots mod p among 6 candidate points).
        ints = S.Ptilde.integer_square_scaled()
        alpha = Fraction(S.alpha)
        if (valuation(alpha, v.p) != 0
                or math.gcd(math.gcd(*ints), v.p) != 1):
            raise ArithmeticError(
                f"place {v} too large for exact residue enumeration")
    if is_local_square(S.alpha, v):
        # every fiber with nonzero value is split
        for m in range(0, 6):
            if S.Ptilde.value(1, m) != 0:
                return True, CertifiedLocalX((m, 1), v, 1)
    return _LocalDecider(S, v.p).solve()


@dataclass(frozen=True)
class LocalPlaceResult:
    place: Place
    solvable: bool
    witness: Optional[CertifiedLocalX]


@dataclass(frozen=True)
class LocalReport:
    """Everywhere-local solvability: exact decisions at the bad places,
    the norm-argument tag for all remaining places."""

    surface_id: str
    results: tuple[LocalPlaceResult, ...]
    good_places_tag: str
    uncertified_disc_cofactor: int
    all_solvable: bool


def verify_local_everywhere(S: ChateletSurface) -> LocalReport:
    S.require_smooth()
    places, cofactor = _bad_places_partial(S)
    results = []
    for v in places:
        ok, wit = local_solvable_surface(S, v)
        results.append(LocalPlaceResult(place=v, solvable=ok, witness=wit))
    tag = "norm-argument"
    if cofactor != 1:
        tag = "norm-argument; unsplit disc cofactor certified by the " \
              "unit-value argument"
    return LocalReport(
        surface_id=S.surface_id(),
        results=tuple(results),
        good_places_tag=tag,
        uncertified_disc_cofactor=cofactor,
        all_solvable=all(r.solvable for r in results),
    )


# ---------------------------------------------------------------------------
# Brauer class and invariants


def brauer_class(S: ChateletSurface) -> BrauerClass:
    """The class (ab, x^2 + c); requires the constructed factorization."""
    if S.params is None:
        raise ValueError(
            "Brauer class is only provided for constructed surfaces")
    p = S.params
    return BrauerClass(alpha=p.a * p.b, a=p.a, b=p.b, c=p.c)


def eval_invariant(A: BrauerClass, pt: CertifiedLocalX) -> Fraction:
    """inv_v(A(P_v)) for a local point over the certified x-fiber.

    Evaluates whichever second-slot representation of A does not vanish;
    at certified points all nonvanishing representations agree.
    """
    f1, f2 = A.rep_values(pt.x)
    value = f1 if f1 != 0 else f2
    if value == 0:
        raise ValueError("all representations vanish; surface not smooth")
    return inv_from_symbol(hilbert_symbol(A.alpha, value, pt.place))


def eval_invariant_all_reps(A: BrauerClass,
                            pt: CertifiedLocalX) -> list[Fraction]:
    """Invariants from every nonvanishing representation (for testing
    representation independence).  Includes 1 + c/x^2, which differs from
    x^2 + c by the square x^2 whenever x != 0, infinity."""
    f1, f2 = A.rep_values(pt.x)
    m, n = pt.x
    values = []
    if f1 != 0:
        values.append(f1)
    if f2 != 0:
        values.append(f2)
    if m != 0 and n != 0 and f1 != 0:
        values.append(f1 / (m * m))  # 1 + c/x^2 up to the square n^2
    return [inv_from_symbol(hilbert_symbol(A.alpha, val, pt.place))
            for val in values]


def sample_certified_points(S: ChateletSurface, v: Place, n: int,
                            seed: int, height: int = 1000,
                            ) -> list[CertifiedLocalX]:
    """n distinct certified x-fibers at v, by seeded random search over
    both charts up to the given height.  Deterministic per seed."""
    rng = random.Random(seed)
    found: dict[ProjectivePoint, CertifiedLocalX] = {}
    attempts = 0
    budget = 400 * max(n, 1) + 10**5
    while len(found) < n and attempts < budget:
        attempts += 1
        m = rng.randint(-height, height)
        den = rng.randint(0, height)
        if den == 0:
            point = INFINITY
        else:
            g = math.gcd(m, den)
            if g == 0:
                continue
            point = (m // g, den // g)
        if point in found:
            continue
        value = S.Ptilde.value(point[1], point[0])
        if value == 0:
            found[point] = CertifiedLocalX(point, v, "degenerate")
        elif (v.is_real and (S.alpha > 0 or value > 0)) or \
                (not v.is_real
                 and hilbert_symbol(S.alpha, value, v) == 1):
            found[point] = CertifiedLocalX(point, v, 1)
    if len(found) < n:
        raise InsufficientPointsError(
            f"only {len(found)} certified points found at {v} "
            f"(wanted {n})")
    return list(found.values())[:n]


@dataclass(frozen=True)
class PlaceInvariantRecord:
    place: Place
    solvable: bool
    witness: Optional[CertifiedLocalX]
    invariant: Fraction
    samples: int
    justification: str  # "sampled" | "norm-argument"


@dataclass(frozen=True)
class ObstructionReport:
    surface_id: str
    records: tuple[PlaceInvariantRecord, ...]
    good_places_tag: str
    invariant_sum: Fraction  # in Q/Z, reduced to [0, 1)
    conclusion: str  # "no-rational-point-certified" | "inconclusive"


def obstruction_report(S: ChateletSurface, samples_per_place: int = 20,
                       seed: int = 0) -> ObstructionReport:
    """Evaluate the Brauer-Manin obstruction of a constructed surface.

    Verifies local solvability everywhere, samples certified points at
    every bad place, checks the local invariant is constant per place,
    and sums.  A nonzero sum certifies the absence of rational points.
    """
    A = brauer_class(S)
    local = verify_local_everywhere(S)
    if not local.all_solvable:
        raise ArithmeticError(
            "constructed surface unexpectedly fails local solvability")
    records = []
    total = Fraction(0)
    for res in local.results:
        pts = sample_certified_points(S, res.place, samples_per_place, seed)
        invs = {inv for pt in pts for inv in eval_invariant_all_reps(A, pt)}
        if len(invs) != 1:
            raise InvariantNotConstantError(
                f"invariant not constant at {res.place}: {sorted(invs)}")
        inv = invs.pop()
        total += inv
        records.append(PlaceInvariantRecord(
            place=res.place, solvable=True, witness=res.witness,
            invariant=inv, samples=len(pts), justification="sampled"))
    total = total % 1
    conclusion = ("no-rational-point-certified" if total != 0
                  else "inconclusive")
    return ObstructionReport(
        surface_id=S.surface_id(),
        records=tuple(records),
        good_places_tag="norm-argument: invariant 0 off the bad set",
        invariant_sum=total,
        conclusion=conclusion,
    )


# ---------------------------------------------------------------------------
# global search


@dataclass(frozen=True)
class SearchResult:
    height: int
    found: bool
    x: Optional[ProjectivePoint] = None
    witness: Optional[tuple[Fraction, Fraction]] = None
    note: str = ""


def rational_point_search(S: ChateletSurface, H: int) -> SearchResult:
    """Exact fiberwise search: for every x in P^1(Q) of height <= H,
    decide the fiber conic y^2 - alpha z^2 = P~(x) by Hasse-Minkowski.

    Exhaustive over the x-range; a returned point is exact, and
    found=False means NO fiber of height <= H is solvable over Q.
    """
    S.require_smooth()
    coeffs = S.Ptilde.integer_square_scaled()
    alpha_sf = squarefree_part(S.alpha)
    odd_primes = tuple(p for p in factorize(alpha_sf).primes() if p != 2)
    backend = _kernel.scan_backend_for(coeffs, alpha_sf, H)
    hits = backend.conic_scan(coeffs, alpha_sf, odd_primes, H, 1)
    if not hits:
        return SearchResult(height=H, found=False,
                            note=f"none up to {H}")
    m, n = hits[0]
    value = S.Ptilde.value(n, m)
    if value == 0:
        return SearchResult(height=H, found=True, x=(m, n),
                            witness=(Fraction(0), Fraction(0)),
                            note="degenerate fiber")
    _, wit = conic_solvable_global(S.alpha, value, want_witness=True)
    note = "" if wit else "solvable fiber found, witness beyond bound"
    return SearchResult(height=H, found=True, x=(m, n), witness=wit,
                        note=note)


# ---------------------------------------------------------------------------
# serialization


def surface_to_json(S: ChateletSurface) -> dict:
    """JSON object with all big integers as decimal strings."""
    return {
        "alpha": _frac_str(S.alpha),
        "P": [_frac_str(c) for c in S.P.coeffs],
        "provenance": S.provenance,
    }


def surface_from_json(obj: Union[str, dict]) -> ChateletSurface:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return ChateletSurface(
        alpha=Fraction(obj["alpha"]),
        P=Poly4(tuple(Fraction(c) for c in obj["P"])),
        provenance=obj.get("provenance", "user"),
    )


def _frac_str(q: Rational) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else \
        f"{q.numerator}/{q.denominator}"
