"""Exact integer and rational arithmetic primitives.

Everything downstream of this module is exact: integers are Python ints,
rationals are :class:`fractions.Fraction`.  The routines here supply the
elementary number theory the rest of the package leans on — certified
primality, factorization, Legendre symbols, p-adic valuations and
square-class reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]

#: Largest n for which the fixed Miller-Rabin witness set is proven
#: deterministic.
_CERTIFIED_PRIME_BOUND = 2**64

# Deterministic for all n < 3.3 * 10^24, in particular for n < 2^64
# (Sorenson & Webster).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_DIVISION_BOUND = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class OutOfCertifiedRangeError(ValueError):
    """Primality was requested beyond the deterministically certified range."""


@dataclass(frozen=True)
class Factorization:
    """Ordered prime factorization of a positive integer.

    ``factors`` is a tuple of (prime, exponent) pairs with strictly
    increasing primes.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e <= 0:
                raise ValueError("exponents must be positive")
            if p < _CERTIFIED_PRIME_BOUND and not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    def value(self) -> int:
        n = 1
        for p, e in self.factors:
            n *= p**e
        return n

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __iter__(self):
        return iter(self.factors)


def _miller_rabin(n: int, bases) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test, certified for n < 2**64.

    Raises :class:`OutOfCertifiedRangeError` for larger inputs rather
    than returning a probabilistic answer.
    """
    if n < 0:
        raise ValueError("is_prime expects n >= 0")
    if n >= _CERTIFIED_PRIME_BOUND:
        raise OutOfCertifiedRangeError(
            f"primality of {n} is outside the certified 64-bit range")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    return _miller_rabin(n, _MR_WITNESSES)


def _pollard_rho(n: int) -> int:
    """Find a nontrivial factor of composite odd n (Brent's cycle variant).

    Deterministic restart schedule: constants c = 1, 2, 3, ... are tried
    in order, so repeated runs agree.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, r, q = 2, 1, 1
        g = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed to split {n}")


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


def factorize(n: int) -> Factorization:
    """Full prime factorization of |n|.

    Trial division up to 10**6, then Pollard rho.  Fails with
    :class:`OutOfCertifiedRangeError` if a remaining factor cannot be
    certified prime (beyond 2**64); see :func:`partial_factorize` for the
    bounded-effort variant.
    """
    if n == 0:
        raise ValueError("cannot factorize 0")
    n = abs(n)
    found: dict[int, int] = {}
    n = _strip_small_factors(n, found, _TRIAL_DIVISION_BOUND)
    _factor_into(n, found)
    return Factorization(tuple(sorted(found.items())))


def _strip_small_factors(n: int, out: dict[int, int], bound: int) -> int:
    """Divide out all prime factors < bound; returns the cofactor."""
    for p in (2, 3, 5):
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
    # 2,3,5-wheel
    increments = (4, 2, 4, 2, 4, 6, 2, 6)
    d, i = 7, 0
    while d < bound and d * d <= n:
        while n % d == 0:
            n //= d
            out[d] = out.get(d, 0) + 1
        d += increments[i]
        i = (i + 1) % 8
    if 1 < n < bound * bound:
        # cofactor below bound^2 with no factor < bound is prime
        out[n] = out.get(n, 0) + 1
        return 1
    return n


def partial_factorize(n: int, rho_budget: int = 6) -> tuple[Factorization, int]:
    """Bounded-effort factorization: (certified part, unfactored cofactor).

    All primes below 10**6 are extracted; larger factors are split with
    Pollard rho only while they stay inside the certified primality range.
    The returned cofactor is coprime to every certified prime, has no
    prime factor below 10**6, and is 1 when the factorization is complete.
    """
    if n == 0:
        raise ValueError("cannot factorize 0")
    n = abs(n)
    found: dict[int, int] = {}
    cofactor = 1
    pending = [_strip_small_factors(n, found, _TRIAL_DIVISION_BOUND)]
    budget = rho_budget
    while pending:
        m = pending.pop()
        if m == 1:
            continue
        if m < _CERTIFIED_PRIME_BOUND:
            if is_prime(m):
                found[m] = found.get(m, 0) + 1
            else:
                d = _pollard_rho(m)
                pending.extend((d, m // d))
            continue
        if budget > 0:
            budget -= 1
            root, k = _perfect_power(m)
            if k > 1:
                pending.extend([root] * k)
                continue
        cofactor *= m
    return Factorization(tuple(sorted(found.items()))), cofactor


def _perfect_power(n: int) -> tuple[int, int]:
    """Return (r, k) with r**k == n and k maximal (k = 1 if no power)."""
    for k in (2, 3, 5, 7):
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand**k == n:
                root, j = _perfect_power(cand)
                return root, j * k
    return n, 1


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"legendre requires an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m >= 2; requires gcd(a, m) = 1."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    return pow(a, -1, m)


def valuation(q: Rational, p: int) -> int:
    """Exponent of the prime p in the nonzero rational q (may be negative).

    The valuation of 0 would be +infinity; that case is an error here,
    never a sentinel value.
    """
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    if p < 2 or not is_prime(p):
        raise ValueError(f"valuation requires a prime, got {p}")
    q = Fraction(q)
    v = 0
    n = q.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(q: Rational, p: int) -> Fraction:
    """q divided by p**valuation(q, p); a p-adic unit."""
    return Fraction(q) / Fraction(p) ** valuation(q, p)


def squarefree_part(q: Rational) -> int:
    """The squarefree integer d (sign preserved) with q = d * (square).

    Two nonzero rationals lie in the same square class of Q*/Q*^2 exactly
    when their squarefree parts coincide.
    """
    if q == 0:
        raise ValueError("0 has no square class")
    q = Fraction(q)
    d = 1 if q > 0 else -1
    for p, e in factorize(q.numerator * q.denominator):
        if e % 2 == 1:
            d *= p
    return d
