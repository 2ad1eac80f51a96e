# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: p-adic enumeration oracle and conic fiber scan.

Mirrors ``chatelet._kernel.pure`` exactly; inputs are pre-screened by the
backend so that every intermediate value fits in 64 bits (with 128-bit
products where needed).
"""

from libc.stdlib cimport calloc, free, malloc

cdef extern from *:
    """
    typedef unsigned long long u64;
    typedef long long i64;
    typedef __int128 i128;
    typedef unsigned __int128 u128;

    static u64 mulmod_u64(u64 a, u64 b, u64 m) {
        return (u64)(((u128)a * b) % m);
    }

    static u64 powmod_u64(u64 b, u64 e, u64 m) {
        u64 r = 1 % m;
        b %= m;
        while (e) {
            if (e & 1) r = mulmod_u64(r, b, m);
            b = mulmod_u64(b, b, m);
            e >>= 1;
        }
        return r;
    }

    static u64 gcd_u64(u64 a, u64 b) {
        while (b) { u64 t = a % b; a = b; b = t; }
        return a;
    }

    static int mr_witness(u64 n, u64 a, u64 d, int r) {
        u64 x;
        int i;
        a %= n;
        if (a == 0) return 1;
        x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) return 1;
        for (i = 0; i < r - 1; i++) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) return 1;
        }
        return 0;
    }

    /* deterministic for n < 2^64 */
    static int is_prime_u64(u64 n) {
        static const u64 W[12] = {2,3,5,7,11,13,17,19,23,29,31,37};
        u64 d;
        int r, i;
        if (n < 2) return 0;
        for (i = 0; i < 12; i++) {
            if (n == W[i]) return 1;
            if (n % W[i] == 0) return 0;
        }
        d = n - 1; r = 0;
        while ((d & 1) == 0) { d >>= 1; r++; }
        for (i = 0; i < 12; i++)
            if (!mr_witness(n, W[i], d, r)) return 0;
        return 1;
    }

    /* Brent's rho; n odd composite; deterministic restart schedule */
    static u64 rho_u64(u64 n) {
        u64 c, x, y, ys, q, g;
        u64 r, k, i;
        for (c = 1; c < 100; c++) {
            y = 2; r = 1; q = 1; g = 1; x = 2; ys = 2;
            while (g == 1) {
                x = y;
                for (i = 0; i < r; i++) y = (mulmod_u64(y, y, n) + c) % n;
                k = 0;
                while (k < r && g == 1) {
                    u64 lim = (r - k < 128) ? r - k : 128;
                    ys = y;
                    for (i = 0; i < lim; i++) {
                        y = (mulmod_u64(y, y, n) + c) % n;
                        q = mulmod_u64(q, x > y ? x - y : y - x, n);
                    }
                    g = gcd_u64(q, n);
                    k += 128;
                }
                r <<= 1;
            }
            if (g == n) {
                g = 1;
                while (g == 1) {
                    ys = (mulmod_u64(ys, ys, n) + c) % n;
                    g = gcd_u64(x > ys ? x - ys : ys - x, n);
                }
            }
            if (g != n) return g;
        }
        return 0; /* unreachable in practice */
    }
    """
    ctypedef unsigned long long u64
    ctypedef long long i64
    u64 mulmod_u64(u64 a, u64 b, u64 m) nogil
    u64 powmod_u64(u64 b, u64 e, u64 m) nogil
    u64 gcd_u64(u64 a, u64 b) nogil
    int is_prime_u64(u64 n) nogil
    u64 rho_u64(u64 n) nogil

NAME = "fast"

cdef enum:
    TRIAL_BOUND = 1000000

# ---------------------------------------------------------------------------
# prime table (odd primes 3..TRIAL_BOUND), built on first use

cdef unsigned int *_primes = NULL
cdef int _n_primes = 0


cdef int _build_primes() except -1:
    global _primes, _n_primes
    cdef unsigned char *sieve
    cdef unsigned int i, j, count
    if _primes != NULL:
        return 0
    sieve = <unsigned char *> calloc(TRIAL_BOUND, 1)
    if sieve == NULL:
        raise MemoryError()
    count = 0
    i = 3
    while i < TRIAL_BOUND:
        if not sieve[i]:
            count += 1
            j = i * i
            while j < TRIAL_BOUND:
                sieve[j] = 1
                j += i
        i += 2
    _primes = <unsigned int *> malloc(count * sizeof(unsigned int))
    if _primes == NULL:
        free(sieve)
        raise MemoryError()
    count = 0
    i = 3
    while i < TRIAL_BOUND:
        if not sieve[i]:
            _primes[count] = i
            count += 1
        i += 2
    _n_primes = count
    free(sieve)
    return 0


# ---------------------------------------------------------------------------
# oracle


def oracle_symbol(long long a, long long b, long long p, int precision):
    """Hilbert symbol at p by exhaustive search mod p**precision."""
    cdef u64 M = 1
    cdef int i
    for i in range(precision):
        M *= <u64> p
    cdef u64 ua = <u64> (a % <long long> M + <long long> M) % M
    cdef u64 ub = <u64> (b % <long long> M + <long long> M) % M
    cdef unsigned char *squares = <unsigned char *> calloc(M, 1)
    cdef unsigned char *b_squares = <unsigned char *> calloc(M, 1)
    if squares == NULL or b_squares == NULL:
        free(squares)
        free(b_squares)
        raise MemoryError()
    cdef u64 t, t2, half = M // 2
    cdef int found = 0
    with nogil:
        for t in range(half + 1):
            t2 = mulmod_u64(t, t, M)
            squares[t2] = 1
            b_squares[mulmod_u64(ub, t2, M)] = 1
        for t in range(half + 1):
            t2 = mulmod_u64(t, t, M)
            # x = 1: z^2 = a + b y^2
            if squares[(ua + mulmod_u64(ub, t2, M)) % M]:
                found = 1
                break
            # y = 1: z^2 = a x^2 + b
            if squares[(mulmod_u64(ua, t2, M) + ub) % M]:
                found = 1
                break
            # z = 1: 1 - a x^2 = b y^2
            if b_squares[(1 + M - mulmod_u64(ua, t2, M)) % M]:
                found = 1
                break
    free(squares)
    free(b_squares)
    return 1 if found else -1


# ---------------------------------------------------------------------------
# conic decision


cdef int _legendre_c(i64 a, u64 p) nogil:
    cdef u64 ua = <u64> ((a % <i64> p + <i64> p) % <i64> p)
    if ua == 0:
        return 0
    return 1 if powmod_u64(ua, (p - 1) // 2, p) == 1 else -1


cdef int _symbol_at_2_c(i64 a, i64 b) nogil:
    cdef int s = 0, t = 0
    while a % 2 == 0:
        a //= 2
        s += 1
    while b % 2 == 0:
        b //= 2
        t += 1
    cdef i64 eps = ((a - 1) // 2) * ((b - 1) // 2)
    cdef i64 om = s * ((b * b - 1) // 8) + t * ((a * a - 1) // 8)
    return -1 if (eps + om) % 2 else 1


cdef int _conic_decide_c(i64 alpha, i64 *aprimes, int n_aprimes, i64 r) nogil:
    """1 if y^2 - alpha z^2 = r is solvable over Q, else 0.

    alpha squarefree with odd prime divisors aprimes; |r| < 2^62, r != 0.
    """
    cdef i64 u, w
    cdef u64 p, m, e, q, root, rr
    cdef int i, sym
    if alpha < 0 and r < 0:
        return 0
    if _symbol_at_2_c(alpha, r) != 1:
        return 0
    m = <u64> (r if r > 0 else -r)
    while m % 2 == 0:
        m //= 2
    for i in range(n_aprimes):
        p = <u64> aprimes[i]
        # unit part of r at p, from the full |r| (the 2-part matters)
        rr = <u64> (r if r > 0 else -r)
        e = 0
        while rr % p == 0:
            rr //= p
            e += 1
        while m % p == 0:
            m //= p
        w = <i64> (rr % p) if r > 0 else -(<i64> (rr % p))
        u = alpha // <i64> p
        sym = 1
        if (e * ((p - 1) // 2)) % 2:
            sym = -sym
        if e % 2:
            sym *= _legendre_c(u, p)
        sym *= _legendre_c(w, p)
        if sym != 1:
            return 0
    # odd primes of m coprime to 2*alpha: only odd valuations matter
    e = 0
    while m % 3 == 0:
        m //= 3
        e += 1
    if e % 2 and _legendre_c(alpha, 3) == -1:
        return 0
    e = 0
    while m % 5 == 0:
        m //= 5
        e += 1
    if e % 2 and _legendre_c(alpha, 5) == -1:
        return 0
    for i in range(_n_primes):
        q = _primes[i]
        if q < 7:
            continue
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            if e % 2 and _legendre_c(alpha, q) == -1:
                return 0
    # cofactor: 1, prime, square, or semiprime of large primes
    while m > 1:
        if m < <u64> TRIAL_BOUND * TRIAL_BOUND or is_prime_u64(m):
            return _legendre_c(alpha, m) == 1
        root = <u64> 0
        # perfect square test
        root = _isqrt_u64(m)
        if root * root == m:
            return 1
        q = rho_u64(m)
        if q == 0:
            return 0  # cannot happen; defensive
        # make q the prime part
        while not is_prime_u64(q):
            q = rho_u64(q)
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if e % 2 and _legendre_c(alpha, q) == -1:
            return 0
    return 1


cdef u64 _isqrt_u64(u64 n) nogil:
    cdef u64 x = <u64> 1 << 32
    cdef u64 y
    if n == 0:
        return 0
    # Newton iteration from a safe overestimate
    y = (x + n // x) // 2
    while y < x:
        x = y
        y = (x + n // x) // 2
    return x


def conic_decide(alpha, alpha_odd_primes, r):
    """Python-visible wrapper around the C conic decision."""
    _build_primes()
    cdef i64 ap[16]
    cdef int n_ap = len(alpha_odd_primes)
    cdef int i
    if n_ap > 16:
        raise ValueError("too many alpha primes for the fast kernel")
    for i in range(n_ap):
        ap[i] = alpha_odd_primes[i]
    return bool(_conic_decide_c(alpha, ap, n_ap, r))


# ---------------------------------------------------------------------------
# fiber scan


def conic_scan(coeffs, alpha, alpha_odd_primes, int H, int limit=16):
    """Solvable fibers x = (m : n), height <= H; see the pure kernel."""
    _build_primes()
    cdef i64 c0 = coeffs[0], c1 = coeffs[1], c2 = coeffs[2]
    cdef i64 c3 = coeffs[3], c4 = coeffs[4]
    cdef i64 al = alpha
    cdef i64 ap[16]
    cdef int n_ap = len(alpha_odd_primes)
    cdef int i
    if n_ap > 16:
        raise ValueError("too many alpha primes for the fast kernel")
    for i in range(n_ap):
        ap[i] = alpha_odd_primes[i]
    hits = []
    cdef i64 m, n, r, n2
    r = c4  # (m, n) = (1, 0)
    if r == 0 or _conic_decide_c(al, ap, n_ap, r):
        hits.append((1, 0))
    for n in range(1, H + 1):
        if len(hits) >= limit:
            break
        n2 = n * n
        for m in range(-H, H + 1):
            if gcd_u64(<u64> (m if m >= 0 else -m), <u64> n) != 1:
                continue
            r = (((c4 * m + c3 * n) * m + c2 * n2) * m + c1 * n2 * n) * m \
                + c0 * n2 * n2
            if r == 0 or _conic_decide_c(al, ap, n_ap, r):
                hits.append((m, n))
                if len(hits) >= limit:
                    break
    return hits
