"""The family F_3(X) of primitive cubic characters: enumeration, evaluation,
L(1, chi) by truncated series or short Euler product, empirical tails, and
character-sum averages."""

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from cubiclab import BudgetError, PrecondError
from cubiclab._kernels import fill_symbol_table, sweep_chars
from cubiclab.eisenstein import CubeRoot, PrimaryPrime, cubic_symbol, split_prime
from cubiclab.moments import factorize
from cubiclab.primes import PrimeRange, primes_in
from cubiclab.randmodel import EULER_GAMMA, ZETA3
from cubiclab.tables import TailRow, TailTable

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_ROOT = (1.0 + 0j, OMEGA, OMEGA * OMEGA)

X_CEILING = 10**8
DEFAULT_MAX_CHARACTERS = 5_000_000
_BLOCK = 1 << 22


@dataclass(frozen=True)
class CubicCharacter:
    """chi = prod chi_{p_i}^{e_i}: squarefree conductor with, per prime factor,
    the canonical primary Eisenstein prime and an exponent in {1, 2}."""

    conductor: int
    factors: tuple  # ((PrimaryPrime, e), ...) ascending in rational norm

    def chi(self, m: int) -> complex:
        return chi_eval(self, m)

    def conjugate(self) -> "CubicCharacter":
        return CubicCharacter(self.conductor, tuple((pp, 3 - e) for pp, e in self.factors))


@dataclass(frozen=True)
class FamilySlice:
    X: int
    characters: tuple

    def __len__(self):
        return len(self.characters)


@dataclass(frozen=True)
class LValue:
    character: CubicCharacter
    value: complex
    abs: float
    method: str
    truncation: int
    warning: str | None = None


def enumerate_family(X: int, max_characters: int = DEFAULT_MAX_CHARACTERS) -> FamilySlice:
    """Every primitive cubic character of conductor <= X (coprime to 3),
    conductors ascending, characters within a conductor in exponent-vector
    lexicographic order on ascending prime factors."""
    X = int(X)
    if X > X_CEILING:
        raise PrecondError(f"X exceeds the {X_CEILING} ceiling")
    if 0.3 * X > max_characters:
        raise BudgetError(f"~{0.26 * X:.3g} characters expected, over {max_characters}")
    if X < 7:
        return FamilySlice(X=X, characters=())
    ps = primes_in(PrimeRange(2, X, (3, 1))).tolist()

    conductors = []

    def extend(i, prod, factors):
        for j in range(i, len(ps)):
            p = ps[j]
            v = prod * p
            if v > X:
                break
            conductors.append((v, factors + (p,)))
            extend(j + 1, v, factors + (p,))

    extend(0, 1, ())
    conductors.sort()

    chars = []
    for cond, fps in conductors:
        pps = tuple(split_prime(p) for p in fps)
        for evec in itertools.product((1, 2), repeat=len(fps)):
            chars.append(CubicCharacter(cond, tuple(zip(pps, evec))))
    if len(chars) > max_characters:
        raise BudgetError(f"{len(chars)} characters, over the {max_characters} budget")
    return FamilySlice(X=X, characters=tuple(chars))


def chi_eval(chi: CubicCharacter, m: int) -> complex:
    """chi(m) in {0, 1, omega, omega^2} as a complex number."""
    if m < 1:
        raise PrecondError("m must be >= 1")
    k = 0
    for pp, e in chi.factors:
        s = cubic_symbol(m, pp)
        if s.is_zero:
            return 0j
        k = (k + e * s.k) % 3
    return _ROOT[k]


# ---------------------------------------------------------------------------
# L(1, chi)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=100_000)
def _primitive_root(q: int) -> int:
    fs = [f for f, _ in factorize(q - 1)]
    g = 2
    while True:
        if all(pow(g, (q - 1) // f, q) != 1 for f in fs):
            return g
        g += 1


_table_cache: dict = {}
_TABLE_CACHE_QMAX = 30_000


def _symbol_table(pp: PrimaryPrime) -> np.ndarray:
    """T[r] = code of (r | pi)_3 for r in [0, q); code 3 marks r ≡ 0."""
    q = pp.rational_norm
    key = (q, pp.value.a, pp.value.b)
    hit = _table_cache.get(key)
    if hit is not None:
        return hit
    g = _primitive_root(q)
    kg = cubic_symbol(g, pp).k
    T = np.empty(q, dtype=np.uint8)
    fill_symbol_table(q, g, kg, T)
    if q <= _TABLE_CACHE_QMAX:
        _table_cache[key] = T
    return T


def _fold_maps(evecs, s: int) -> np.ndarray:
    """M[c][folded codes] -> class for each exponent vector; the fold packs the
    per-factor symbol codes (2 bits each, factor 0 highest)."""
    M = np.empty((len(evecs), 4**s), dtype=np.uint8)
    codes = np.array(list(itertools.product(range(4), repeat=s)), dtype=np.int64)
    zero = (codes == 3).any(axis=1)
    for c, evec in enumerate(evecs):
        cls = (codes * np.array(evec)).sum(axis=1) % 3
        cls[zero] = 3
        M[c] = cls.astype(np.uint8)
    return M


def default_truncation(conductor: int) -> int:
    return max(10**6, 50 * conductor)


def _trunc_series_group(pps, evecs, N: int, inv_blocks) -> np.ndarray:
    """L-values for the exponent vectors over one conductor, by a single pass
    of the truncated series sum_{n<=N} chi(n)/n."""
    s = len(pps)
    qs = np.array([pp.rational_norm for pp in pps], dtype=np.int64)
    tables = [_symbol_table(pp) for pp in pps]
    tabs = np.concatenate(tables) if s > 1 else tables[0]
    offs = np.zeros(s + 1, dtype=np.int64)
    np.cumsum(qs, out=offs[1:])
    M = _fold_maps(evecs, s)
    rstate = np.zeros(s, dtype=np.int64)  # (n0 - 1) mod q with n0 = 1
    acc = np.zeros((len(evecs), 4), dtype=np.float64)
    for b0, b1, invblk in inv_blocks(N):
        sweep_chars(qs, tabs, offs, M, b0, b1, rstate, invblk, acc)
    return acc[:, 0] + OMEGA * acc[:, 1] + (OMEGA * OMEGA) * acc[:, 2]


def _make_inv_blocks(block=_BLOCK, keep=4):
    """Shared 1/n block provider: full blocks are cached by start index so
    conductor groups with different truncations reuse them via slicing."""
    cache: dict = {}

    def blocks(N):
        for b0 in range(1, N + 1, block):
            b1 = min(b0 + block, N + 1)
            inv_full = cache.get(b0)
            if inv_full is None:
                inv_full = 1.0 / np.arange(b0, b0 + block, dtype=np.float64)
                if len(cache) >= keep:
                    cache.pop(next(iter(cache)))
                cache[b0] = inv_full
            yield b0, b1, inv_full[: b1 - b0]

    return blocks


def _short_product_char(chi: CubicCharacter, y: int) -> complex:
    """log-space short Euler product prod_{p<=y} (1 - chi(p)/p)^{-1}."""
    ps = primes_in(PrimeRange(2, y))
    ks = np.zeros(len(ps), dtype=np.int64)
    dead = np.zeros(len(ps), dtype=bool)
    for pp, e in chi.factors:
        q = pp.rational_norm
        T = _symbol_table(pp) if q <= _TABLE_CACHE_QMAX else None
        for i, p in enumerate(ps):
            if dead[i]:
                continue
            if p % q == 0:
                dead[i] = True
                continue
            k = int(T[p % q]) if T is not None else cubic_symbol(int(p), pp).k
            ks[i] = (ks[i] + e * k) % 3
    pf = ps.astype(np.float64)
    # -log(1 - omega^k / p), complex; dead primes contribute 0
    roots = np.array(_ROOT)[ks]
    terms = -np.log(1.0 - roots / pf)
    terms[dead] = 0.0
    return complex(np.exp(terms.sum()))


def l_value(chi: CubicCharacter, method: str = "truncated_series",
            n_or_y: int | None = None) -> LValue:
    """L(1, chi) by the requested method (single-character path)."""
    if method == "truncated_series":
        N = int(n_or_y) if n_or_y is not None else default_truncation(chi.conductor)
        evecs = [tuple(e for _, e in chi.factors)]
        pps = [pp for pp, _ in chi.factors]
        val = complex(_trunc_series_group(pps, evecs, N, _make_inv_blocks())[0])
        return _mk_lvalue(chi, val, "truncated_series", N)
    if method == "short_euler_product":
        y = int(n_or_y) if n_or_y is not None else 10**4
        if y < 100:
            raise PrecondError("short product needs y >= 100")
        val = _short_product_char(chi, y)
        return LValue(chi, val, abs(val), "short_euler_product", y)
    raise PrecondError(f"unknown method {method!r}")


def _mk_lvalue(chi, val, method, N) -> LValue:
    a = abs(val)
    warning = None
    tail = chi.conductor / N
    if tail > 1e-4 * a:
        warning = f"truncation tail bound {tail:.3g} exceeds 1e-4*|L|"
    if a == 0.0:
        warning = "computed |L| = 0: primitive L(1) cannot vanish, evaluation bug"
    return LValue(chi, val, a, method, N, warning)


def l_values(slice_: FamilySlice, method: str = "truncated_series",
             n_or_y: int | None = None, threads: int = 1) -> list:
    """L(1, chi) for every character of the slice.

    Truncated-series work is done once per conjugate pair (the conjugate
    character's value is the complex conjugate), per conductor group, through
    the compiled sweep.
    """
    chars = slice_.characters
    if not chars:
        return []
    if method == "short_euler_product":
        y = int(n_or_y) if n_or_y is not None else 10**4
        if y < 100:
            raise PrecondError("short product needs y >= 100")
        out = []
        for chi in chars:
            val = _short_product_char(chi, y)
            out.append(LValue(chi, val, abs(val), method, y))
        return out
    if method != "truncated_series":
        raise PrecondError(f"unknown method {method!r}")

    # consecutive conductor groups (enumeration order guarantees grouping)
    groups = []
    i = 0
    while i < len(chars):
        j = i
        cond = chars[i].conductor
        while j < len(chars) and chars[j].conductor == cond:
            j += 1
        groups.append((i, j))
        i = j

    values = np.zeros(len(chars), dtype=np.complex128)
    truncs = np.zeros(len(chars), dtype=np.int64)
    inv_blocks = _make_inv_blocks()

    def run_group(span):
        i0, i1 = span
        group = chars[i0:i1]
        s = len(group[0].factors)
        nrep = (i1 - i0) // 2
        pps = [pp for pp, _ in group[0].factors]
        evecs = [tuple(e for _, e in c.factors) for c in group[:nrep]]
        N = int(n_or_y) if n_or_y is not None else default_truncation(group[0].conductor)
        vals = _trunc_series_group(pps, evecs, N, inv_blocks)
        for r in range(nrep):
            values[i0 + r] = vals[r]
            values[i1 - 1 - r] = np.conj(vals[r])  # lex-reversed conjugate slot
            truncs[i0 + r] = truncs[i1 - 1 - r] = N

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run_group, groups))
    else:
        for g in groups:
            run_group(g)

    return [_mk_lvalue(chars[i], complex(values[i]), method, int(truncs[i]))
            for i in range(len(chars))]


# ---------------------------------------------------------------------------
# statistics over the family
# ---------------------------------------------------------------------------


def large_threshold(tau: float) -> float:
    return math.exp(EULER_GAMMA) * tau


def small_threshold(tau: float) -> float:
    return math.sqrt(ZETA3 / math.exp(EULER_GAMMA)) / tau


def empirical_tail(slice_: FamilySlice, taus, side: str,
                   method: str = "truncated_series", n_or_y: int | None = None,
                   lvalues=None) -> TailTable:
    """phi_X / psi_X at each tau: the fraction of the slice with |L| strictly
    beyond the side's threshold (boundary ties count as not exceeding)."""
    if side not in ("large", "small"):
        raise PrecondError("side must be 'large' or 'small'")
    if len(slice_) == 0:
        raise PrecondError("empty slice")
    taus = list(taus)
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise PrecondError("taus must be ascending")
    if lvalues is None:
        lvalues = l_values(slice_, method=method, n_or_y=n_or_y)
    if side == "small" and taus and taus[0] <= 0:
        raise PrecondError("small side needs tau > 0")
    a = np.array([lv.abs for lv in lvalues])
    n = len(a)
    table = TailTable()
    for tau in taus:
        if side == "large":
            hits = int(np.sum(a > large_threshold(tau)))
        else:
            hits = int(np.sum(a < small_threshold(tau)))
        table.append(TailRow(tau=float(tau), side=side, value=hits / n,
                             method="empirical", count=hits, n=n))
    return table


def character_sum_average(slice_: FamilySlice, m: int) -> complex:
    """(1/|F_3(X)|) sum over the slice of chi(m)."""
    if m < 1:
        raise PrecondError("m must be >= 1")
    if len(slice_) == 0:
        raise PrecondError("empty slice")
    sym_cache: dict = {}
    total = 0j
    for chi in slice_.characters:
        k = 0
        dead = False
        for pp, e in chi.factors:
            key = pp.rational_norm
            s = sym_cache.get(key)
            if s is None:
                s = cubic_symbol(m, pp)
                sym_cache[key] = s
            if s.is_zero:
                dead = True
                break
            k = (k + e * s.k) % 3
        if not dead:
            total += _ROOT[k]
    return total / len(slice_.characters)


def forced_character_search(X: int, z: int, eps: dict) -> list:
    """Prime-conductor characters of F_3(X) with chi(p) = eps[p] for every
    constrained prime (the sets P(X, {eps_p}, z)).

    eps values are CubeRoot instances or exponents k meaning omega^k (so
    forcing the value 1 is k = 0).
    """
    npz = len(primes_in(PrimeRange(2, max(z, 2)))) if z >= 2 else 0
    if 3.0**npz > math.sqrt(X):
        raise PrecondError(f"3^pi(z) = 3^{npz} exceeds sqrt(X)")
    want = {}
    for p, v in eps.items():
        want[int(p)] = v.k if isinstance(v, CubeRoot) else int(v) % 3
        if want[int(p)] is None:
            raise PrecondError("forced values must be nonzero cube roots")
    out = []
    if X < 7:
        return out
    for q in primes_in(PrimeRange(7, X, (3, 1))).tolist():
        pp = split_prime(int(q))
        syms = {}
        okq = True
        for p in want:
            s = cubic_symbol(p, pp)
            if s.is_zero:
                okq = False
                break
            syms[p] = s.k
        if not okq:
            continue
        for e in (1, 2):
            if all((e * syms[p]) % 3 == want[p] for p in want):
                out.append(CubicCharacter(int(q), ((pp, e),)))
    return out


def mod_p2_quotient(p: int, ell: int) -> Fraction:
    """The mod-p^2 counting heuristic, exactly: equals p/(p + ell - 1)."""
    base = Fraction(p * p - p)
    num = base ** (ell - 1)
    den = num + (ell - 1) * base ** (ell - 2) * (p - 1)
    return num / den


def littlewood_corridor(conductor: int) -> tuple:
    """The deliberately widened sanity band [0.2 sqrt(zeta3/(e^g loglog q)),
    5 e^g loglog q] that every family |L(1,chi)| should inhabit."""
    llq = math.log(math.log(conductor))
    lo = 0.2 * math.sqrt(ZETA3 / (math.exp(EULER_GAMMA) * llq))
    hi = 5.0 * math.exp(EULER_GAMMA) * llq
    return lo, hi


# ---------------------------------------------------------------------------
# CSV cache formats
# ---------------------------------------------------------------------------


def save_slice(slice_: FamilySlice, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["idx", "conductor", "p", "a", "b", "e"])
        for i, chi in enumerate(slice_.characters):
            for pp, e in chi.factors:
                w.writerow([i, chi.conductor, pp.rational_norm, pp.value.a, pp.value.b, e])


def load_slice(path, X: int | None = None) -> FamilySlice:
    from cubiclab.eisenstein import EisensteinInt

    rows: dict = {}
    conds: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            i = int(row["idx"])
            pp = PrimaryPrime(EisensteinInt(int(row["a"]), int(row["b"])), int(row["p"]))
            rows.setdefault(i, []).append((pp, int(row["e"])))
            conds[i] = int(row["conductor"])
    chars = tuple(
        CubicCharacter(conds[i], tuple(rows[i])) for i in sorted(rows)
    )
    x = X if X is not None else (max(conds.values()) if conds else 0)
    return FamilySlice(X=x, characters=chars)


def save_lvalues(lvalues, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["idx", "conductor", "re", "im", "abs", "method", "trunc"])
        for i, lv in enumerate(lvalues):
            w.writerow([
                i, lv.character.conductor, f"{lv.value.real:.12g}",
                f"{lv.value.imag:.12g}", f"{lv.abs:.12g}", lv.method, lv.truncation,
            ])
