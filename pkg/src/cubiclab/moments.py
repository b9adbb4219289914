"""The z-divisor function and two independent evaluations of the short-product
moment E(|L(1,X;y)|^{2z}): the cube-constrained double sum and the Euler
product, plus the family-side empirical moment."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from cubiclab import PrecondError
from cubiclab.primes import PrimeRange, primes_in
from cubiclab.randmodel import RandomCharModel, ep

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)


def factorize(n: int) -> list:
    """Prime factorization [(p, a), ...] by wheel trial division (64-bit n)."""
    if n < 1:
        raise PrecondError("n must be >= 1")
    out = []
    for p in (2, 3):
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return out


def _rising(z: float, a: int) -> float:
    out = 1.0
    for i in range(a):
        out *= z + i
    return out


def d_z(n: int, z: float) -> float:
    """The z-divisor function: multiplicative with d_z(p^a) = z(z+1)...(z+a-1)/a!.

    The rising-product form avoids Gamma poles at nonpositive integer z.
    """
    out = 1.0
    for _, a in factorize(n):
        out *= _rising(z, a) / math.factorial(a)
    return out


@dataclass(frozen=True)
class MomentSpec:
    z: float
    y: int
    sum_bound: int = 10**6  # cap on s and t
    prune: float = 1e20  # drop terms with r^2 s^3 t^3 above this
    tail_rtol: float = 1e-8

    def __post_init__(self):
        if self.y < 2:
            raise PrecondError("y must be >= 2")
        if self.sum_bound < 1:
            raise PrecondError("sum_bound must be positive")


@dataclass(frozen=True)
class MomentResult:
    value: float
    tail_estimate: float
    terms: int


def _smooth_with_exponents(ps, bound, cubefree=False):
    """All ps-smooth integers <= bound with exponent vectors and prime masks,
    sorted by value. Returns (values int64, exps int16[n, len(ps)], masks int64)."""
    npr = len(ps)
    vals = [1]
    exps = [tuple([0] * npr)]
    masks = [0]

    def extend(i, v, e, m):
        # extend v by powers of primes with index >= i (each value visited once)
        for j in range(i, npr):
            p = int(ps[j])
            w = v
            a = 0
            while w * p <= bound:
                w *= p
                a += 1
                if cubefree and a > 2:
                    break
                e2 = list(e)
                e2[j] = a
                vals.append(w)
                exps.append(tuple(e2))
                masks.append(m | (1 << j))
                extend(j + 1, w, e2, m | (1 << j))

    extend(0, 1, [0] * npr, 0)
    order = np.argsort(np.array(vals, dtype=np.int64), kind="stable")
    v = np.array(vals, dtype=np.int64)[order]
    e = np.array(exps, dtype=np.int16).reshape(len(vals), npr)[order]
    m = np.array(masks, dtype=np.int64)[order]
    return v, e, m


def moment_double_sum(spec: MomentSpec) -> MomentResult:
    """Sum over y-smooth n, m with n m^2 a perfect cube of
    d_z(m) d_z(n)/(mn) * prod_{p ≡ 1 mod 3, p | nm} p/(p+2).

    Enumerated through the bijective parametrization n = r s^3, m = r t^3 with
    r cube-free (then n m^2 = (r s t^2)^3 automatically), each variable capped
    by sum_bound and the product r^2 s^3 t^3 pruned at spec.prune.
    """
    z = float(spec.z)
    ps = primes_in(PrimeRange(2, spec.y)) if spec.y >= 2 else np.empty(0, np.int64)
    np_count = len(ps)
    if np_count > 20:
        raise PrecondError("double-sum enumeration supports at most 20 primes (y too large)")

    # cube-free r is a finite set; the prune bound caps it directly, while
    # s and t (entering cubed) get the per-variable sum_bound
    r_bound = int(math.isqrt(int(spec.prune)))
    st_bound = min(spec.sum_bound, int(round(spec.prune ** (1.0 / 3.0))) + 1)
    rv, re_, rm = _smooth_with_exponents(ps, r_bound, cubefree=True)
    tv, te, tm = _smooth_with_exponents(ps, st_bound, cubefree=False)

    # d_z(p^e) depends only on e: one lookup row per exponent
    max_e = int(re_.max(initial=0) + 3 * te.max(initial=0)) + 1
    P = np.array([_rising(z, e) / math.factorial(e) for e in range(max_e)])

    # p/(p+2) over primes ≡ 1 mod 3 in each subset mask
    w_p = np.where(ps % 3 == 1, ps / (ps + 2.0), 1.0) if np_count else np.empty(0)
    W = np.ones(1 << np_count)
    for mask in range(1, 1 << np_count):
        low = mask & (-mask)
        W[mask] = W[mask ^ low] * w_p[low.bit_length() - 1]

    t3 = tv.astype(np.float64) ** 3

    total = 0.0
    tail_terms = 0.0
    prune_lo = spec.prune / 10.0
    nterms = 0
    for i in range(len(rv)):
        r = float(rv[i])
        er = re_[i]
        r2 = r * r
        if r2 > spec.prune:
            break
        cap3 = spec.prune / r2  # bound on s^3 * t^3
        nt = int(np.searchsorted(t3, cap3, side="right"))
        if nt == 0:
            continue
        # d_z(r x^3)/(r x^3) over the smooth list; serves as both the s and
        # the t factor of the term (the parametrization is s/t symmetric)
        joint = P[er[None, :] + 3 * te[:nt]] if np_count else np.ones((nt, 0))
        c = np.prod(joint, axis=1) / (r * t3[:nt])
        um = rm[i] | tm[:nt]
        # cumulative t-sums per s-mask (the W factor couples s and t via the
        # union of prime supports, so it cannot be split multiplicatively)
        cums, cumabs = {}, {}
        for m in np.unique(tm[:nt]).tolist():
            weighted = c * W[um | m]
            cums[m] = np.cumsum(weighted)
            cumabs[m] = np.cumsum(np.abs(weighted))
        nt_per_s = np.searchsorted(t3[:nt], cap3 / t3[:nt], side="right")
        t10_per_s = np.searchsorted(t3[:nt], (prune_lo / r2) / t3[:nt], side="right")
        for m in cums:
            sel = np.flatnonzero((tm[:nt] == m) & (nt_per_s > 0))
            if sel.size == 0:
                continue
            ends = nt_per_s[sel] - 1
            total += float(np.dot(c[sel], cums[m][ends]))
            nterms += int(nt_per_s[sel].sum())
            t10 = t10_per_s[sel]
            partial = cumabs[m][ends] - np.where(t10 > 0, cumabs[m][np.maximum(t10 - 1, 0)], 0.0)
            tail_terms += float(np.dot(np.abs(c[sel]), np.where(t10 <= ends, partial, 0.0)))

    if abs(total) > 0 and tail_terms > spec.tail_rtol * abs(total):
        warnings.warn(
            f"double-sum tail estimate {tail_terms:.3g} exceeds "
            f"{spec.tail_rtol:.1g} * |value|",
            stacklevel=2,
        )
    return MomentResult(value=total, tail_estimate=tail_terms, terms=nterms)


def cp_coeffs(p: int, z: float) -> tuple:
    """(c_{p,1}, c_{p,omega}, c_{p,omega^2}) at real z; all are real."""
    t = [(1 - OMEGA**k / p) ** (-complex(z)) for k in range(3)]
    out = []
    for j in range(3):
        c = (t[0] + OMEGA**j * t[1] + OMEGA ** (2 * j) * t[2]) / 3.0
        out.append(c.real)
    return tuple(out)


def cp_square_identity_rhs(p: int, z: float) -> float:
    """(1/3)(1-2/p+1/p^2)^{-z} + (2/3)(1+1/p+1/p^2)^{-z}."""
    return ((1 - 2.0 / p + p**-2.0) ** -z) / 3.0 + 2.0 / 3.0 * (1 + 1.0 / p + p**-2.0) ** -z


def moment_euler_product(y: int, z: float, model: RandomCharModel | None = None) -> float:
    """prod_{p <= y} E_p(z) = E(|L(1,X;y)|^{2z})."""
    if y < 2:
        raise PrecondError("y must be >= 2")
    model = model or RandomCharModel(3)
    ps = primes_in(PrimeRange(2, y))
    logs = [math.log(ep(model, int(p), float(z))) for p in ps]
    return math.exp(math.fsum(logs))


def family_moment(slice_, z: float, method: str = "truncated_series",
                  n_or_y: int | None = None, lvalues=None) -> float:
    """(1/|F_3(X)|) sum over the slice of |L(1,chi)|^{2z}, real z only."""
    if abs(z) > 4:
        raise PrecondError("|z| must be <= 4 for the family-side moment")
    from cubiclab.family import l_values

    if lvalues is None:
        lvalues = l_values(slice_, method=method, n_or_y=n_or_y)
    a = np.array([lv.abs for lv in lvalues])
    return float(np.mean(a ** (2.0 * z)))
