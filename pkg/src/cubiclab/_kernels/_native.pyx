# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: segmented sieve, cubic-symbol tables, L-series sweeps,
counter-based Monte Carlo sampling.

The numpy fallback in ``_numpy.py`` implements the same functions with the same
bit-level semantics (identical uniforms, identical summation order).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memset

cnp.import_array()

IS_NATIVE = True

DEF SEGMENT_ODDS = 1048576  # 2**20 odd slots per sieve segment

# float-trick modular multiplication is exact while q*q < 2**52
DEF FLOATMOD_QMAX = 67108864  # 2**26


# ---------------------------------------------------------------------------
# segmented sieve (odd-only segments of 2**20 slots)
# ---------------------------------------------------------------------------

def sieve_range(int64_t lo, int64_t hi):
    """Primes p with lo <= p <= hi, ascending, as an int64 array."""
    if hi < lo or hi < 2:
        return np.empty(0, dtype=np.int64)
    if lo < 2:
        lo = 2

    cdef int64_t root = <int64_t> ((<double> hi) ** 0.5)
    while (root + 1) * (root + 1) <= hi:
        root += 1
    while root * root > hi:
        root -= 1

    base = _simple_sieve(root)
    cdef int64_t[::1] bp = base

    out_parts = []
    if lo <= 2 <= hi:
        out_parts.append(np.array([2], dtype=np.int64))

    cdef int64_t seg_lo = lo if lo % 2 == 1 else lo + 1
    if seg_lo < 3:
        seg_lo = 3
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.empty(SEGMENT_ODDS, dtype=np.uint8)
    cdef uint8_t[::1] mk = mask
    cdef int64_t seg_hi, nslots, p, start, idx, i, m
    while seg_lo <= hi:
        seg_hi = seg_lo + 2 * (SEGMENT_ODDS - 1)
        if seg_hi > hi:
            seg_hi = hi
        nslots = (seg_hi - seg_lo) // 2 + 1
        memset(&mk[0], 1, nslots)
        for i in range(bp.shape[0]):
            p = bp[i]
            if p == 2:
                continue
            if p * p > seg_hi:
                break
            start = p * p
            if start < seg_lo:
                m = seg_lo % p
                start = seg_lo if m == 0 else seg_lo + (p - m)
                if start % 2 == 0:
                    start += p
            idx = (start - seg_lo) // 2
            while idx < nslots:
                mk[idx] = 0
                idx += p
        hits = np.flatnonzero(mask[:nslots]).astype(np.int64)
        if hits.shape[0]:
            out_parts.append(seg_lo + 2 * hits)
        seg_lo = seg_hi + 2

    if not out_parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out_parts)


def _simple_sieve(int64_t limit):
    """Primes up to limit by a plain byte sieve (base primes for segments)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] is_p = np.ones(limit + 1, dtype=np.uint8)
    cdef uint8_t[::1] v = is_p
    v[0] = 0
    v[1] = 0
    cdef int64_t p = 2, j
    while p * p <= limit:
        if v[p]:
            j = p * p
            while j <= limit:
                v[j] = 0
                j += p
        p += 1
    return np.flatnonzero(is_p).astype(np.int64)


# ---------------------------------------------------------------------------
# cubic residue symbol tables
# ---------------------------------------------------------------------------

def fill_symbol_table(int64_t q, int64_t g, int kg, uint8_t[::1] T):
    """Fill T[0..q) with the cubic-symbol codes modulo the prime q.

    g is a generator of (Z/q)* and kg in {1,2} the code of its symbol, i.e.
    (g | pi)_3 = omega^kg.  Leaves T[g^j mod q] = (j*kg) mod 3 and T[0] = 3
    (the zero marker).  Four interleaved power chains hide the multiply
    latency; exact while q < 2**26 (then falls back to plain %).
    """
    T[0] = 3
    if q == 2:
        T[1] = 0
        return
    if q >= FLOATMOD_QMAX:
        _fill_table_modchain(q, g, kg, T)
        return

    cdef int64_t g2 = (g * g) % q
    cdef int64_t g3 = (g2 * g) % q
    cdef int64_t g4 = (g3 * g) % q
    cdef int64_t x0 = 1, x1 = g, x2 = g2, x3 = g3
    cdef int k0 = 0, k1 = kg % 3, k2 = (2 * kg) % 3, k3 = 0
    cdef int dk = kg % 3  # j -> j+4 advances the code by 4*kg = kg (mod 3)
    cdef double qinv = 1.0 / q, gf = <double> g4
    cdef int64_t nsteps = (q - 1) // 4, rem = (q - 1) % 4, j
    for j in range(nsteps):
        T[x0] = k0
        T[x1] = k1
        T[x2] = k2
        T[x3] = k3
        k0 += dk
        if k0 >= 3: k0 -= 3
        k1 += dk
        if k1 >= 3: k1 -= 3
        k2 += dk
        if k2 >= 3: k2 -= 3
        k3 += dk
        if k3 >= 3: k3 -= 3
        x0 = x0 * g4 - (<int64_t> ((<double> x0) * gf * qinv)) * q
        if x0 >= q: x0 -= q
        elif x0 < 0: x0 += q
        x1 = x1 * g4 - (<int64_t> ((<double> x1) * gf * qinv)) * q
        if x1 >= q: x1 -= q
        elif x1 < 0: x1 += q
        x2 = x2 * g4 - (<int64_t> ((<double> x2) * gf * qinv)) * q
        if x2 >= q: x2 -= q
        elif x2 < 0: x2 += q
        x3 = x3 * g4 - (<int64_t> ((<double> x3) * gf * qinv)) * q
        if x3 >= q: x3 -= q
        elif x3 < 0: x3 += q
    if rem >= 1:
        T[x0] = k0
    if rem >= 2:
        T[x1] = k1
    if rem >= 3:
        T[x2] = k2


cdef void _fill_table_modchain(int64_t q, int64_t g, int kg, uint8_t[::1] T):
    cdef int64_t x = 1, j
    cdef int k = 0, dk = kg % 3
    for j in range(q - 1):
        T[x] = k
        k += dk
        if k >= 3:
            k -= 3
        x = (x * g) % q


# ---------------------------------------------------------------------------
# truncated Dirichlet series sweep
# ---------------------------------------------------------------------------

def sweep_chars(int64_t[::1] qs, uint8_t[::1] tabs, int64_t[::1] offs,
                uint8_t[:, ::1] M, int64_t n0, int64_t n1,
                int64_t[::1] rstate, double[::1] invblk, double[:, ::1] acc):
    """Accumulate sum of 1/n into acc[c][class] for n in [n0, n1).

    qs: factor primes of the conductor; tabs/offs: their concatenated symbol
    tables; M[c][folded symbol codes] -> class in {0,1,2,3} for character c;
    rstate[i] must hold (n0-1) mod qs[i] on entry and is advanced so calls can
    be chunked; invblk[i] = 1/(n0+i).
    """
    cdef int s = qs.shape[0], nch = M.shape[0]
    cdef int64_t count = n1 - n0
    cdef int64_t i, r0, q0
    cdef double[4] a
    cdef const uint8_t *t0

    if s == 1 and nch == 1:
        q0 = qs[0]
        r0 = rstate[0]
        t0 = &tabs[offs[0]]
        a[0] = 0.0
        a[1] = 0.0
        a[2] = 0.0
        a[3] = 0.0
        with nogil:
            for i in range(count):
                r0 += 1
                if r0 == q0:
                    r0 = 0
                a[t0[r0]] += invblk[i]
        rstate[0] = r0
        # remap raw symbol classes through the character's exponent map
        acc[0, M[0, 0]] += a[0]
        acc[0, M[0, 1]] += a[1]
        acc[0, M[0, 2]] += a[2]
        acc[0, M[0, 3]] += a[3]
        return

    if s > 8:
        raise ValueError("at most 8 conductor prime factors supported")
    _sweep_generic(qs, tabs, offs, M, count, rstate, invblk, acc)


cdef void _sweep_generic(int64_t[::1] qs, uint8_t[::1] tabs, int64_t[::1] offs,
                         uint8_t[:, ::1] M, int64_t count,
                         int64_t[::1] rstate, double[::1] invblk,
                         double[:, ::1] acc):
    cdef int s = qs.shape[0], nch = M.shape[0]
    cdef int64_t i
    cdef int f, c, idx
    cdef double v
    cdef int64_t[8] r
    cdef int64_t[8] q
    cdef const uint8_t *tp[8]
    for f in range(s):
        r[f] = rstate[f]
        q[f] = qs[f]
        tp[f] = &tabs[offs[f]]
    with nogil:
        for i in range(count):
            idx = 0
            for f in range(s):
                r[f] += 1
                if r[f] == q[f]:
                    r[f] = 0
                idx = (idx << 2) | tp[f][r[f]]
            v = invblk[i]
            for c in range(nch):
                acc[c, M[c, idx]] += v
    for f in range(s):
        rstate[f] = r[f]


# ---------------------------------------------------------------------------
# counter-based uniforms and Monte Carlo sampling
# ---------------------------------------------------------------------------

cdef inline uint64_t _fin(uint64_t z) nogil:
    # splitmix64 finalizer
    z ^= z >> 30
    z *= <uint64_t> 0xBF58476D1CE4E5B9
    z ^= z >> 27
    z *= <uint64_t> 0x94D049BB133111EB
    z ^= z >> 31
    return z

DEF INV53 = 1.1102230246251565e-16  # 2**-53

cdef inline double _unif(uint64_t s1, uint64_t j) nogil:
    cdef uint64_t x = _fin(s1 ^ ((j + 1) * <uint64_t> 0xD1B54A32D192ED03))
    return <double> (x >> 11) * INV53


cdef inline uint64_t _draw_key(uint64_t seed, uint64_t i) nogil:
    return _fin(seed ^ ((i + 1) * <uint64_t> 0x9E3779B97F4A7C15))


def mc_uniforms(uint64_t seed, int64_t i0, int64_t i1, int64_t j,
                double[::1] out):
    """u(i, j) for draws i in [i0, i1) at stream index j."""
    cdef int64_t i
    with nogil:
        for i in range(i1 - i0):
            out[i] = _unif(_draw_key(seed, <uint64_t> (i0 + i)), <uint64_t> j)


def mc_logabs3(uint64_t seed, int64_t i0, int64_t i1,
               double[::1] t0, double[::1] t1,
               double[::1] c1, double[::1] cw, double[::1] out):
    """log|L(1,X;y)| for draws i0..i1 of the order-3 model.

    Per prime j: u < t0[j] -> atom 0 (contribution 0); u < t1[j] -> atom 1
    (contribution c1[j]); else atom omega or omega^2 (both contribute cw[j]).
    """
    cdef int64_t P = t0.shape[0]
    cdef int64_t i, j
    cdef uint64_t s1
    cdef double acc, u
    with nogil:
        for i in range(i1 - i0):
            s1 = _draw_key(seed, <uint64_t> (i0 + i))
            acc = 0.0
            for j in range(P):
                u = _unif(s1, <uint64_t> j)
                if u >= t0[j]:
                    if u < t1[j]:
                        acc += c1[j]
                    else:
                        acc += cw[j]
            out[i] = acc
