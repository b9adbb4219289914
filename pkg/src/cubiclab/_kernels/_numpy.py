"""Pure-numpy fallback for the compiled kernels.

Same contracts and bit-level behavior as ``_native``: the counter-based
uniforms are computed from the same splitmix64 mixing, and floating-point
accumulation orders match, so results are reproducible across backends.
"""

import numpy as np

IS_NATIVE = False

SEGMENT_ODDS = 1 << 20

_C_DRAW = np.uint64(0x9E3779B97F4A7C15)
_C_STREAM = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 2.0 ** -53


def _simple_sieve(limit):
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def sieve_range(lo, hi):
    """Primes p with lo <= p <= hi, ascending, as an int64 array."""
    lo, hi = int(lo), int(hi)
    if hi < lo or hi < 2:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 2)
    import math

    base = _simple_sieve(math.isqrt(hi))
    parts = []
    if lo <= 2 <= hi:
        parts.append(np.array([2], dtype=np.int64))
    seg_lo = max(lo | 1, 3)
    while seg_lo <= hi:
        seg_hi = min(seg_lo + 2 * (SEGMENT_ODDS - 1), hi)
        nslots = (seg_hi - seg_lo) // 2 + 1
        mask = np.ones(nslots, dtype=bool)
        for p in base:
            p = int(p)
            if p == 2:
                continue
            if p * p > seg_hi:
                break
            start = p * p
            if start < seg_lo:
                start = ((seg_lo + p - 1) // p) * p
                if start % 2 == 0:
                    start += p
            mask[(start - seg_lo) // 2 :: p] = False
        hits = np.flatnonzero(mask)
        if hits.size:
            parts.append(seg_lo + 2 * hits.astype(np.int64))
        seg_lo = seg_hi + 2
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


def fill_symbol_table(q, g, kg, T):
    """See the native docstring: T[g^j mod q] = (j*kg) mod 3, T[0] = 3."""
    q, g = int(q), int(g)
    T[0] = 3
    if q == 2:
        T[1] = 0
        return
    # powers of g by doubling blocks, exact in float64 while q < 2**26
    if q < (1 << 26):
        pows = np.empty(q - 1, dtype=np.float64)
        pows[0] = 1.0
        ln = 1
        qf = float(q)
        while ln < q - 1:
            take = min(ln, q - 1 - ln)
            gp = float(pow(g, ln, q))
            blk = pows[:take] * gp
            blk -= np.floor(blk / qf) * qf
            # guard against float rounding at the boundary
            blk[blk >= qf] -= qf
            pows[ln : ln + take] = blk
            ln += take
        idx = pows.astype(np.int64)
    else:
        idx = np.empty(q - 1, dtype=np.int64)
        x = 1
        for j in range(q - 1):
            idx[j] = x
            x = (x * g) % q
    codes = (np.arange(q - 1, dtype=np.int64) * (kg % 3)) % 3
    T[idx] = codes.astype(np.uint8)


def sweep_chars(qs, tabs, offs, M, n0, n1, rstate, invblk, acc):
    """Same contract as the native sweep (see _native.pyx)."""
    s = len(qs)
    nch = M.shape[0]
    count = int(n1 - n0)
    if count <= 0:
        return
    n = np.arange(n0, n1, dtype=np.int64)
    idx = np.zeros(count, dtype=np.int64)
    for f in range(s):
        q = int(qs[f])
        r0 = int(rstate[f])
        tab = tabs[offs[f] : offs[f] + q]
        # residues (r0 + 1 .. r0 + count) mod q, realized by tiling
        rel = (np.arange(1, count + 1, dtype=np.int64) + r0) % q
        idx = (idx << 2) | tab[rel].astype(np.int64)
        rstate[f] = (r0 + count) % q
    for c in range(nch):
        cls = M[c][idx]
        sums = np.bincount(cls, weights=invblk, minlength=4)
        acc[c, 0] += sums[0]
        acc[c, 1] += sums[1]
        acc[c, 2] += sums[2]
        acc[c, 3] += sums[3]


_MASK64 = (1 << 64) - 1


def _fin(z):
    # splitmix64 finalizer over a uint64 array
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def _draw_keys(seed, i0, i1):
    i = np.arange(i0, i1, dtype=np.uint64)
    return _fin(np.uint64(seed) ^ ((i + np.uint64(1)) * _C_DRAW))


def _unif_vec(s1, j):
    c = np.uint64(((int(j) + 1) * 0xD1B54A32D192ED03) & _MASK64)
    x = _fin(s1 ^ c)
    return (x >> np.uint64(11)).astype(np.float64) * _INV53


def mc_uniforms(seed, i0, i1, j, out):
    out[:] = _unif_vec(_draw_keys(seed, i0, i1), j)


def mc_logabs3(seed, i0, i1, t0, t1, c1, cw, out):
    s1 = _draw_keys(seed, i0, i1)
    acc = np.zeros(i1 - i0, dtype=np.float64)
    for j in range(len(t0)):
        u = _unif_vec(s1, j)
        acc += np.where(u < t0[j], 0.0, np.where(u < t1[j], c1[j], cw[j]))
    out[:] = acc
