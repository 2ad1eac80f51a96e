"""The compiled and pure kernels must be interchangeable."""

import random
import subprocess
import sys

import pytest

from chatelet import _kernel
from chatelet._kernel import pure
from chatelet.local import conic_solvable_global, default_oracle_precision
from chatelet.numbers import factorize, squarefree_part

fast = pytest.importorskip(
    "chatelet._kernel._fast",
    reason="compiled kernel unavailable; fallback covered elsewhere")


class TestOracleParity:
    def test_full_small_grid(self):
        for p in (2, 3, 5):
            for a in range(-6, 7):
                for b in range(-6, 7):
                    if a == 0 or b == 0:
                        continue
                    prec = default_oracle_precision(a, b, p)
                    assert fast.oracle_symbol(a, b, p, prec) == \
                        pure.oracle_symbol(a, b, p, prec), (a, b, p)

    def test_larger_primes(self):
        rng = random.Random(31)
        for _ in range(60):
            p = rng.choice([7, 11, 13])
            a = rng.choice([n for n in range(-50, 51) if n])
            b = rng.choice([n for n in range(-50, 51) if n])
            prec = default_oracle_precision(a, b, p)
            assert fast.oracle_symbol(a, b, p, prec) == \
                pure.oracle_symbol(a, b, p, prec)


class TestConicParity:
    def test_random_decisions(self):
        rng = random.Random(32)
        for _ in range(800):
            alpha = squarefree_part(rng.choice(
                [n for n in range(-400, 401) if n]))
            aps = tuple(p for p in factorize(abs(alpha)).primes() if p != 2)
            r = rng.randint(-10**7, 10**7)
            if r == 0:
                continue
            f = fast.conic_decide(alpha, aps, r)
            p = pure.conic_decide(alpha, aps, r)
            g = conic_solvable_global(alpha, r)[0]
            assert f == p == g, (alpha, r)

    def test_large_prime_cofactors(self):
        # residual parts beyond the trial bound exercise rho + Legendre
        rng = random.Random(33)
        big_primes = [1000003, 1000033, 1000037, 1000039]
        for _ in range(40):
            q1, q2 = rng.sample(big_primes, 2)
            r = q1 * q2 * rng.choice([1, -1, 4, 9])
            alpha = rng.choice([2, 3, -1, 697])
            aps = tuple(p for p in factorize(abs(alpha)).primes() if p != 2)
            assert fast.conic_decide(alpha, aps, r) == \
                pure.conic_decide(alpha, aps, r) == \
                conic_solvable_global(alpha, r)[0]


class TestScanParity:
    def test_scan_agreement(self):
        coeffs = (5916, 0, 985, 0, 41)
        assert fast.conic_scan(coeffs, 697, (17, 41), 25, 16) == \
            pure.conic_scan(coeffs, 697, (17, 41), 25, 16)
        coeffs = (6, 0, 0, 0, 1)
        assert fast.conic_scan(coeffs, 2, (), 12, 16) == \
            pure.conic_scan(coeffs, 2, (), 12, 16)

    def test_random_scans(self):
        rng = random.Random(34)
        for _ in range(15):
            coeffs = tuple(rng.randint(-9, 9) for _ in range(5))
            if all(c == 0 for c in coeffs):
                continue
            alpha = squarefree_part(rng.choice([-5, -1, 2, 3, 7, 10]))
            aps = tuple(p for p in factorize(abs(alpha)).primes() if p != 2)
            assert fast.conic_scan(coeffs, alpha, aps, 8, 16) == \
                pure.conic_scan(coeffs, alpha, aps, 8, 16)


class TestSelection:
    def test_overflow_falls_back_to_pure(self):
        huge = (10**30, 0, 0, 0, 1)
        assert _kernel.scan_backend_for(huge, 2, 100) is pure

    def test_small_uses_loaded_backend(self):
        assert _kernel.scan_backend_for((1, 0, 0, 0, 1), 2, 100) \
            is _kernel.kernel

    def test_env_forces_pure(self):
        code = ("import chatelet; "
                "print(chatelet.KERNEL_BACKEND)")
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={"PATH": "/usr/bin:/bin", "CHATELET_PURE_KERNEL": "1"},
            capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "pure"

    def test_default_backend_reported(self):
        assert _kernel.BACKEND in ("fast", "pure")
