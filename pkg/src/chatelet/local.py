"""Places of Q, Hilbert symbols, local squares and conic solvability.

The Hilbert symbol is computed by the classical closed form (sign rule at
the real place, valuations and Legendre symbols at odd p, the epsilon/omega
congruence formula at 2).  An independent exhaustive-enumeration oracle is
provided for testing the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from chatelet import _kernel
from chatelet.numbers import (
    Rational,
    factorize,
    is_prime,
    legendre,
    squarefree_part,
    unit_part,
    valuation,
)

__all__ = [
    "Place", "REAL", "finite_place",
    "hilbert_symbol", "hilbert_bruteforce_oracle", "product_formula_check",
    "is_local_square", "inv_from_symbol",
    "conic_solvable_local", "conic_solvable_global", "support_places",
]

INV_ZERO = Fraction(0)
INV_HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class Place:
    """The real place (p is None) or the p-adic place of a prime p.

    Ordering puts the real place first, then primes ascending, so that
    reports enumerate places deterministically.
    """

    sort_key: tuple[int, int]
    p: Optional[int] = None

    @property
    def is_real(self) -> bool:
        return self.p is None

    @property
    def is_odd(self) -> bool:
        return self.p is not None and self.p != 2

    def __str__(self) -> str:
        return "oo" if self.p is None else str(self.p)

    def __repr__(self) -> str:
        return f"Place({self})"


REAL = Place(sort_key=(0, 0))


def finite_place(p: int) -> Place:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return Place(sort_key=(1, p), p=p)


def _eps(u: int) -> int:
    return (u - 1) // 2


def _omega(u: int) -> int:
    return (u * u - 1) // 8


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol (a, b)_v in {+1, -1}.

    Depends only on the square classes of a and b.
    """
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol requires nonzero arguments")
    if v.is_real:
        return -1 if a < 0 and b < 0 else 1
    p = v.p
    alpha = valuation(a, p)
    beta = valuation(b, p)
    # unit parts reduced to integers mod p^3 (enough for eps/omega at 2)
    mod = p**3
    u = _unit_residue(a, p, alpha, mod)
    w = _unit_residue(b, p, beta, mod)
    if p == 2:
        exponent = (_eps(u) * _eps(w) + alpha * _omega(w) + beta * _omega(u))
        return -1 if exponent % 2 else 1
    exponent = alpha * beta * _eps(p)
    sym = -1 if exponent % 2 else 1
    if beta % 2:
        sym *= legendre(u, p)
    if alpha % 2:
        sym *= legendre(w, p)
    return sym


def _unit_residue(q: Rational, p: int, val: int, mod: int) -> int:
    """Integer congruent mod `mod` to the unit part q / p^val."""
    q = Fraction(q)
    n, d = q.numerator, q.denominator
    if val >= 0:
        n //= p**val
    else:
        d //= p**(-val)
    return n * pow(d, -1, mod) % mod


def default_oracle_precision(a: int, b: int, p: int) -> int:
    """Enumeration depth at which Q_p-solvability of z^2 = ax^2 + by^2
    is decided by its solutions mod p^N (Hensel)."""
    vmax = max(_int_valuation(a, p), _int_valuation(b, p))
    return 2 * vmax + (5 if p == 2 else 3)


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def hilbert_bruteforce_oracle(a: Rational, b: Rational, p: int,
                              precision: Optional[int] = None) -> int:
    """Independent test oracle for the Hilbert symbol at a finite prime.

    Scales a and b to integers (a square-class operation) and decides by
    exhaustive enumeration whether z^2 = a x^2 + b y^2 has a primitive
    solution mod p^precision.
    """
    if a == 0 or b == 0:
        raise ValueError("oracle requires nonzero arguments")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a = Fraction(a)
    b = Fraction(b)
    ia = a.numerator * a.denominator
    ib = b.numerator * b.denominator
    minimum = default_oracle_precision(ia, ib, p)
    if precision is None:
        precision = minimum
    elif precision < minimum:
        raise ValueError(
            f"precision {precision} below the Hensel bound {minimum}")
    if p**precision > 2**26:
        raise ValueError("enumeration modulus too large for the oracle")
    return _kernel.kernel.oracle_symbol(ia, ib, p, precision)


def support_places(a: Rational, b: Rational) -> list[Place]:
    """Finite support of (a, b): real, 2, and primes dividing either."""
    a = Fraction(a)
    b = Fraction(b)
    primes = {2}
    for q in (a, b):
        primes.update(factorize(q.numerator * q.denominator).primes())
    return [REAL] + [finite_place(p) for p in sorted(primes)]


def product_formula_check(a: Rational, b: Rational) -> bool:
    """Product of (a, b)_v over the support; must be +1 for a correct
    symbol implementation (symbols are +1 off the support)."""
    prod = 1
    for v in support_places(a, b):
        prod *= hilbert_symbol(a, b, v)
    return prod == 1


def is_local_square(t: Rational, v: Place) -> bool:
    """Membership in Q_v^x2."""
    if t == 0:
        raise ValueError("0 is not in the unit square class group")
    if v.is_real:
        return t > 0
    p = v.p
    val = valuation(t, p)
    if val % 2:
        return False
    if p == 2:
        return _unit_residue(t, 2, val, 8) % 8 == 1
    return legendre(_unit_residue(t, p, val, p), p) == 1


def inv_from_symbol(s: int) -> Fraction:
    """Local invariant in Q/Z of a quaternion class: +1 -> 0, -1 -> 1/2."""
    if s == 1:
        return INV_ZERO
    if s == -1:
        return INV_HALF
    raise ValueError(f"not a symbol value: {s}")


def conic_solvable_local(alpha: Rational, r: Rational, v: Place) -> bool:
    """Does y^2 - alpha z^2 = r have a Q_v-point?

    r = 0 counts as solvable (y = z = 0); otherwise this is the Hilbert
    symbol condition.
    """
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if r == 0:
        return True
    return hilbert_symbol(alpha, r, v) == 1


def conic_solvable_global(
    alpha: Rational, r: Rational, want_witness: bool = False,
    witness_bound: int = 10**4,
) -> tuple[bool, Optional[tuple[Fraction, Fraction]]]:
    """Hasse-Minkowski decision for y^2 - alpha z^2 = r over Q.

    Exact: solvable iff solvable at every place of the finite support.
    The optional witness search is bounded and diagnostic only; (True,
    None) means "solvable, witness not found within bound".
    """
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if r == 0:
        return True, (Fraction(0), Fraction(0))
    for v in support_places(alpha, r):
        if hilbert_symbol(alpha, r, v) != 1:
            return False, None
    if not want_witness:
        return True, None
    return True, _conic_witness(Fraction(alpha), Fraction(r), witness_bound)


def _conic_witness(alpha: Fraction, r: Fraction,
                   bound: int) -> Optional[tuple[Fraction, Fraction]]:
    """Search y^2 - alpha z^2 = r over z with numerator and denominator
    bounded, testing whether r + alpha z^2 is a rational square.

    Diagnostic only; None means no witness within the bound.
    """
    budget = 10**6  # total z candidates examined
    for den in range(1, bound + 1):
        for num in range(0, bound + 1):
            if math.gcd(num, den) != 1:
                continue
            budget -= 1
            if budget < 0:
                return None
            z = Fraction(num, den)
            y2 = r + alpha * z * z
            if y2 >= 0 and _is_rational_square(y2):
                y = Fraction(math.isqrt(y2.numerator),
                             math.isqrt(y2.denominator))
                return y, z
    return None


def _is_rational_square(q: Fraction) -> bool:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    return rn * rn == n and rd * rd == d
