"""The random Euler-product model: per-prime laws, expectation factors,
log-moment functions with derivatives, the model constants, the saddle-point
solver, and the doubly-exponential tail formulas."""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from cubiclab import NoConvergenceError, PrecondError
from cubiclab.primes import PrimeRange, primes_in

# fixed 20-digit literals (derivation covered by tests)
EULER_GAMMA = 0.57721566490153286061
ZETA3 = 1.20205690315959428540
ZETA2 = math.pi * math.pi / 6.0

LN10 = math.log(10.0)

# prime-sum evaluation is used for r up to this; beyond it the second-order
# expansions take over (their error term is O(r/log^2 r))
R_ASYMPTOTIC = 1.0e6
P_CUT_CAP = 30_000_000


# ---------------------------------------------------------------------------
# per-prime laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomCharModel:
    """Order-ell model: X(p) is 0 with probability delta_p, else uniform on
    the ell-th roots of unity with the remaining mass."""

    ell: int = 3

    def __post_init__(self):
        if self.ell < 3 or self.ell % 2 == 0:
            raise PrecondError("ell must be an odd prime >= 3")

    def delta(self, p: int) -> Fraction:
        if p % self.ell == 1:
            return Fraction(self.ell - 1, p + self.ell - 1)
        return Fraction(0)

    def alpha(self, p: int) -> Fraction:
        return 1 - self.delta(p)


def x_law(model: RandomCharModel, p: int) -> dict:
    """Probability table of X(p): key -1 is the zero atom, key k the root
    omega_ell^k.  Exact rationals, summing to 1."""
    d = model.delta(p)
    a = model.alpha(p)
    table = {-1: d}
    for k in range(model.ell):
        table[k] = a / model.ell
    return table


def expect_X(model: RandomCharModel, m: int) -> Fraction:
    """E(X(m)): zero unless m is a perfect ell-th power, else the product of
    p/(p + ell - 1) over primes p ≡ 1 mod ell dividing m."""
    from cubiclab.moments import factorize

    if m < 1:
        raise PrecondError("m must be >= 1")
    out = Fraction(1)
    for p, a in factorize(m):
        if a % model.ell != 0:
            return Fraction(0)
        out *= 1 - model.delta(p)
    return out


def ep(model: RandomCharModel, p: int, z) -> complex:
    """E(|1 - X(p)/p|^{-2z}), the closed form for ell = 3; real for real z."""
    if model.ell != 3:
        raise PrecondError("the closed form is specific to ell = 3")
    a = float(model.alpha(p))
    va = 1.0 - 2.0 / p + 1.0 / p**2
    vb = 1.0 + 1.0 / p + 1.0 / p**2
    val = (1.0 - a) + (a / 3.0) * va ** (-z) + (2.0 * a / 3.0) * vb ** (-z)
    if isinstance(z, complex):
        return val
    return float(val.real) if isinstance(val, complex) else float(val)


# ---------------------------------------------------------------------------
# kink functions f, f~ and their derivatives
# ---------------------------------------------------------------------------


# small-t evaluation goes through expm1 (the +-t parts of the exponentials
# cancel exactly) with a series branch below 1e-4


def f_max(t: float) -> float:
    if t >= 1.0:
        return math.log((math.exp(2 * t) + 2 * math.exp(-t)) / 3.0) - 2 * t
    if t < 1e-4:
        return t * t * (1.0 + t / 3.0 - t * t / 4.0)
    return math.log1p((math.expm1(2 * t) + 2.0 * math.expm1(-t)) / 3.0)


def f_max_prime(t: float) -> float:
    if t >= 1.0:
        return -6.0 / (math.exp(3 * t) + 2.0)
    if t < 1e-4:
        return t * (2.0 + t - t * t)
    num = 2.0 * (math.expm1(2 * t) - math.expm1(-t))
    den = 3.0 + math.expm1(2 * t) + 2.0 * math.expm1(-t)
    return num / den


def f_max_second(t: float) -> float:
    g, h = math.exp(2 * t), math.exp(-t)
    return 18.0 * math.exp(t) / (g + 2 * h) ** 2


def f_min(t: float) -> float:
    if t >= 1.0:
        return math.log((math.exp(-2 * t) + 2 * math.exp(t)) / 3.0) - t
    if t < 1e-4:
        return t * t * (1.0 - t / 3.0 - t * t / 4.0)
    return math.log1p((math.expm1(-2 * t) + 2.0 * math.expm1(t)) / 3.0)


def f_min_prime(t: float) -> float:
    if t >= 1.0:
        g, h = math.exp(-2 * t), math.exp(t)
        return -3.0 * g / (g + 2 * h)
    if t < 1e-4:
        return t * (2.0 - t - t * t)
    num = 2.0 * (math.expm1(t) - math.expm1(-2 * t))
    den = 3.0 + math.expm1(-2 * t) + 2.0 * math.expm1(t)
    return num / den


def f_min_second(t: float) -> float:
    g, h = math.exp(-2 * t), math.exp(t)
    return 18.0 * math.exp(-t) / (g + 2 * h) ** 2


# ---------------------------------------------------------------------------
# model constants
# ---------------------------------------------------------------------------


def _fprime_over_t_max(t: float) -> float:
    if t < 1e-8:
        return 2.0 + t  # f'(t)/t -> 2 as t -> 0
    return f_max_prime(t) / t


def _fprime_over_t_min(t: float) -> float:
    if t < 1e-8:
        return 2.0 - t
    return f_min_prime(t) / t


@dataclass(frozen=True)
class ModelConstants:
    c_max: float
    c_min: float
    zeta3: float
    zeta2: float
    euler_gamma: float
    quad_tol: float

    def c_ell(self, ell: int, cutoff: int = 10**6, tail: bool = True) -> float:
        return c_ell(ell, cutoff=cutoff, tail=tail)


def constants(tol: float = 1e-10) -> ModelConstants:
    """C_max and C_min by adaptive quadrature of f'(t)/t split at the t=1 kink
    (upper limit 15, where the integrands are below 1e-16)."""
    i1, e1 = quad(_fprime_over_t_max, 0.0, 1.0, epsabs=tol, epsrel=tol)
    i2, e2 = quad(_fprime_over_t_max, 1.0, 15.0, epsabs=tol, epsrel=tol)
    if max(e1, e2) > 1e-6:
        raise ArithmeticError("C_max quadrature did not converge")
    c_max = 0.5 * (i1 + i2)
    j1, e3 = quad(_fprime_over_t_min, 0.0, 1.0, epsabs=tol, epsrel=tol)
    j2, e4 = quad(_fprime_over_t_min, 1.0, 15.0, epsabs=tol, epsrel=tol)
    if max(e3, e4) > 1e-6:
        raise ArithmeticError("C_min quadrature did not converge")
    c_min = j1 + j2
    return ModelConstants(
        c_max=c_max, c_min=c_min, zeta3=ZETA3, zeta2=ZETA2,
        euler_gamma=EULER_GAMMA, quad_tol=tol,
    )


@lru_cache(maxsize=1)
def _consts() -> ModelConstants:
    return constants()


def zeta3_series(n_terms: int = 10_000) -> float:
    """Direct series for zeta(3) with an Euler-Maclaurin tail (literal check)."""
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    s = math.fsum((n ** -3.0).tolist())
    b = n_terms + 1.0
    return s + 1.0 / (2 * b * b) + 1.0 / (2 * b**3) + 1.0 / (4 * b**4)


def _tail_sum_p_pow(P: float, k: int) -> float:
    """Estimate of sum over primes p > P of p^-k via the dpi ~ dt/log t density."""
    val, _ = quad(lambda t: t ** (-k) / math.log(t), P, np.inf, limit=200)
    return val


def c_ell(ell: int, cutoff: int = 10**6, tail: bool = True) -> float:
    """The Euler product prod_p (1-1/p)^{-cos(pi/ell)} (1+2cos(pi/ell)/p+1/p^2)^{-1/2}."""
    c = math.cos(math.pi / ell)
    ps = primes_in(PrimeRange(2, cutoff)).astype(np.float64)
    x = 1.0 / ps
    logs = -c * np.log1p(-x) - 0.5 * np.log1p(2 * c * x + x * x)
    total = math.fsum(logs.tolist())
    if tail:
        a2 = c * c + (c - 1.0) / 2.0
        a3 = (4.0 * c / 3.0) * (1.0 - c * c)
        total += a2 * _tail_sum_p_pow(cutoff, 2) + a3 * _tail_sum_p_pow(cutoff, 3)
    return math.exp(total)


def c_ell_limit_scan(ells) -> list:
    """(ell, C_ell) rows; the values trend toward zeta(2) as ell grows."""
    return [(int(l), c_ell(int(l))) for l in ells]


def family_density(ell: int = 3, cutoff: int = 10**6, tail: bool = True) -> float:
    """lim |F_ell(X)|/X = r_ell * F_{ell,2}(1); implemented for ell = 3, where
    r_3 = pi/(3*sqrt(3)) is the residue of the Dedekind zeta of Q(omega)."""
    if ell != 3:
        raise PrecondError("family density implemented for ell = 3 only")
    r3 = math.pi / (3.0 * math.sqrt(3.0))
    ps = primes_in(PrimeRange(2, cutoff))
    pf = ps.astype(np.float64)
    x = 1.0 / pf
    one = ps % 3 == 1
    two = ps % 3 == 2
    logs = np.zeros_like(pf)
    logs[one] = np.log1p(2 * x[one]) + 2 * np.log1p(-x[one])
    logs[two] = np.log1p(-(x[two] ** 2))
    total = math.fsum(logs.tolist())
    if tail:
        total += -2.0 * _tail_sum_p_pow(cutoff, 2) + 1.0 * _tail_sum_p_pow(cutoff, 3)
    return r3 * (2.0 / 3.0) * math.exp(total)


# ---------------------------------------------------------------------------
# log-moment functions L(r) = log E(|L(1,X)|^{2r}) and the min-side variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogMomentFn:
    """Side 'max' is L(r) = sum_p log E_p(r); side 'min' is L~(r) = sum_p log E_p(-r).

    p_cut None lets the evaluation pick max(10^6, 200 r) capped at 3e7 and
    switch to the second-order expansion beyond r = 10^6; an explicit p_cut
    forces prime sums at that cutoff.
    """

    side: str = "max"
    p_cut: int | None = None
    tail: bool = True

    def __post_init__(self):
        if self.side not in ("max", "min"):
            raise PrecondError("side must be 'max' or 'min'")


@lru_cache(maxsize=8)
def _prime_data(p_cut: int):
    ps = primes_in(PrimeRange(2, p_cut))
    pf = ps.astype(np.float64)
    x = 1.0 / pf
    la = 2.0 * np.log1p(-x)  # log(1 - 2/p + 1/p^2)
    lb = np.log1p(x + x * x)  # log(1 + 1/p + 1/p^2)
    alpha = np.ones_like(pf)
    one = ps % 3 == 1
    alpha[one] = pf[one] / (pf[one] + 2.0)
    with np.errstate(divide="ignore"):
        l0 = np.log(1.0 - alpha)  # -inf where alpha = 1
    lga = np.log(alpha / 3.0)
    lgb = np.log(2.0 * alpha / 3.0)
    return la, lb, l0, lga, lgb


def _auto_p_cut(r: float) -> int:
    return int(min(max(1_000_000, 200.0 * r), P_CUT_CAP))


def _prime_sum_eval(side: str, p_cut: int, r: float):
    """(L, L', L'') by stable per-prime softmax accumulation."""
    la, lb, l0, lga, lgb = _prime_data(p_cut)
    sgn = 1.0 if side == "max" else -1.0
    ta = lga - sgn * r * la
    tb = lgb - sgn * r * lb
    m = np.maximum(np.maximum(ta, tb), l0)
    wa = np.exp(ta - m)
    wb = np.exp(tb - m)
    w0 = np.exp(l0 - m)
    tot = wa + wb + w0
    val = float(np.sum(m + np.log(tot)))
    ra = -sgn * la
    rb = -sgn * lb
    mean = (wa * ra + wb * rb) / tot
    second = (wa * ra * ra + wb * rb * rb) / tot
    d1 = float(np.sum(mean))
    d2 = float(np.sum(second - mean * mean))
    return val, d1, d2


def _tail_integrals(side: str, p_cut: int, r: float):
    """Analytic corrections for primes above p_cut: integrals of f(r/t)/log t
    (and the derivative analogues) against the dt/log t prime density.

    Integrated in w = log t, where the integrands decay like e^{-w} with all
    derivatives tame; r/p_cut < 1 always holds under the cutoff policy, so
    only the small-argument branch of f is exercised.
    """
    fv = f_max if side == "max" else f_min
    fp = f_max_prime if side == "max" else f_min_prime
    fs = f_max_second if side == "max" else f_min_second
    w0 = math.log(p_cut)
    # beyond u = r/t < 1e-9 the integrands are below double noise relative
    # to the prime sums; cut there
    w1 = math.log(r) + 9.0 * LN10

    def g0(w):
        t = math.exp(w)
        return fv(r / t) * t / w

    def g1(w):
        return fp(r / math.exp(w)) / w

    def g2(w):
        t = math.exp(w)
        return fs(r / t) / (t * w)

    t0, _ = quad(g0, w0, w1, limit=300, epsabs=1e-12, epsrel=1e-9)
    t1, _ = quad(g1, w0, w1, limit=300, epsabs=1e-12, epsrel=1e-9)
    t2, _ = quad(g2, w0, w1, limit=300, epsabs=1e-12, epsrel=1e-9)
    return t0, t1, t2


def _asymptotic_eval(side: str, r: float):
    """Second-order expansion of L / L~ and its exact derivatives (used for
    r beyond any feasible prime cutoff; error O(r / log^2 r))."""
    cs = _consts()
    lr = math.log(r)
    ll = math.log(lr)
    if side == "max":
        mult, shift, c = 2.0, EULER_GAMMA, cs.c_max
    else:
        mult, shift, c = 1.0, EULER_GAMMA - math.log(ZETA3), cs.c_min
    val = mult * r * (ll + shift) + mult * r * (c - 1.0) / lr
    d1 = mult * (ll + shift) + mult / lr + mult * (c - 1.0) * (1.0 / lr - 1.0 / lr**2)
    d2 = mult / (r * lr) + mult * (c - 1.0) * (-1.0 / (r * lr**2) + 2.0 / (r * lr**3))
    return val, d1, d2


def _eval_all(fn: LogMomentFn, r: float):
    """(L, L', L'', rep) under fn's cutoff policy."""
    if r <= 0:
        raise PrecondError("r must be positive")
    if fn.p_cut is None and r > R_ASYMPTOTIC:
        return (*_asymptotic_eval(fn.side, r), "asymptotic")
    p_cut = fn.p_cut if fn.p_cut is not None else _auto_p_cut(r)
    val, d1, d2 = _prime_sum_eval(fn.side, p_cut, r)
    if fn.tail:
        t0, t1, t2 = _tail_integrals(fn.side, p_cut, r)
        val, d1, d2 = val + t0, d1 + t1, d2 + t2
    return val, d1, d2, "prime_sum"


def log_moment(fn: LogMomentFn, r: float, deriv: int = 0) -> float:
    """L(r) (side max) or L~(r) (side min), or its first/second r-derivative."""
    import warnings

    if deriv not in (0, 1, 2):
        raise PrecondError("deriv must be 0, 1 or 2")
    if fn.p_cut is not None and not fn.tail and 200.0 * r > fn.p_cut:
        warnings.warn(
            f"p_cut={fn.p_cut} below 200*r={200 * r:.3g} with no tail correction",
            stacklevel=2,
        )
    out = _eval_all(fn, r)
    return out[deriv]


# ---------------------------------------------------------------------------
# saddle point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleSolution:
    tau: float
    kappa: float
    L: float
    Lp: float
    Lpp: float
    residual: float
    side: str
    rep: str  # 'prime_sum' or 'asymptotic'


def saddle_target(side: str, tau: float) -> float:
    if side == "max":
        return 2.0 * (math.log(tau) + EULER_GAMMA)
    return 2.0 * math.log(tau) + EULER_GAMMA - math.log(ZETA3)


def _initial_kappa(side: str, tau: float) -> float:
    cs = _consts()
    if side == "max":
        return math.exp(tau - cs.c_max)
    return math.exp(tau * tau - cs.c_min)


def solve_saddle(fn: LogMomentFn, tau: float, rtol: float = 1e-12,
                 maxiter: int = 200) -> SaddleSolution:
    """Unique kappa with L'(kappa) equal to the side's tau-target.

    Safeguarded Newton on the strictly increasing L', bracketed by geometric
    expansion from the initial guess exp(tau - C_max) / exp(tau^2 - C_min).
    """
    if tau <= 0:
        raise PrecondError("tau must be positive")
    target = saddle_target(fn.side, tau)
    k0 = _initial_kappa(fn.side, tau)

    # pin the evaluation representation for the whole solve
    if fn.p_cut is None and k0 > R_ASYMPTOTIC:
        eval_fn = LogMomentFn(fn.side, None, fn.tail)
    else:
        p_cut = fn.p_cut if fn.p_cut is not None else _auto_p_cut(k0)
        eval_fn = LogMomentFn(fn.side, p_cut, fn.tail)

    def g(r):
        return log_moment(eval_fn, r, 1) - target

    lo, hi = k0, k0
    glo, ghi = g(lo), g(hi)
    for _ in range(80):
        if glo <= 0:
            break
        lo /= 4.0
        glo = g(lo)
        if lo < 1e-280:
            raise NoConvergenceError("no lower bracket for the saddle", (lo, hi))
    for _ in range(80):
        if ghi >= 0:
            break
        hi *= 4.0
        ghi = g(hi)
        if hi > 1e280:
            raise NoConvergenceError(
                f"target {target:.6g} not reached by L' (bracket ({lo:.3g}, {hi:.3g}))",
                (lo, hi),
            )

    r = min(max(k0, lo), hi)
    for _ in range(maxiter):
        val, d1, d2, rep = _eval_all(eval_fn, r)
        res = d1 - target
        if abs(res) < rtol * max(1.0, abs(target)):
            return SaddleSolution(tau, r, val, d1, d2, abs(res), fn.side, rep)
        if res > 0:
            hi = r
        else:
            lo = r
        step = res / d2 if d2 > 0 else 0.0
        r_new = r - step
        if not (lo < r_new < hi):
            r_new = 0.5 * (lo + hi)
        r = r_new
    raise NoConvergenceError(
        f"saddle solve stalled at residual {res:.3g} (bracket ({lo:.3g}, {hi:.3g}))",
        (lo, hi),
    )


# ---------------------------------------------------------------------------
# tail probabilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailEstimate:
    tau: float
    side: str
    method: str
    log_value: float  # natural log
    log10_value: float
    value: float | None  # None when the raw value underflows
    outside_asymptotic_regime: bool
    saddle: SaddleSolution | None = None


def _mk_tail(tau, side, method, loge, sol=None) -> TailEstimate:
    raw = math.exp(loge) if loge > -700.0 else None
    return TailEstimate(
        tau=tau, side=side, method=method, log_value=loge, log10_value=loge / LN10,
        value=raw, outside_asymptotic_regime=tau < 1.0, saddle=sol,
    )


def tail_phi(tau: float, method: str = "saddle") -> TailEstimate:
    """Phi(tau) = P(|L(1,X)| > e^gamma tau)."""
    return _tail(tau, "max", method)


def tail_psi(tau: float, method: str = "saddle") -> TailEstimate:
    """Psi(tau) = P(|L(1,X)| < sqrt(zeta(3)/e^gamma)/tau)."""
    return _tail(tau, "min", method)


def _tail(tau: float, side: str, method: str) -> TailEstimate:
    if tau <= 0:
        raise PrecondError("tau must be positive")
    cs = _consts()
    if method == "asymptotic":
        if side == "max":
            loge = -2.0 * math.exp(tau - cs.c_max) / tau
        else:
            loge = -math.exp(tau * tau - cs.c_min) / (tau * tau)
        return _mk_tail(tau, side, method, loge)
    if method != "saddle":
        raise PrecondError(f"unknown method {method!r}")
    sol = solve_saddle(LogMomentFn(side), tau)
    target = saddle_target(side, tau)
    loge = (sol.L - sol.kappa * target - math.log(sol.kappa)
            - 0.5 * math.log(2.0 * math.pi * sol.Lpp))
    return _mk_tail(tau, side, method, loge, sol)


def conjecture_extremes(X: float) -> tuple:
    """The conjectured extreme |L(1,chi)| sizes over conductor <= X (o(1) = 0)."""
    if X < 1e3:
        raise PrecondError("X must be >= 1e3")
    cs = _consts()
    l2 = math.log(math.log(X))
    l3 = math.log(l2)
    max_pred = math.exp(EULER_GAMMA) * (l2 + l3 + cs.c_max - math.log(2.0))
    min_pred = math.sqrt(ZETA3 / (math.exp(EULER_GAMMA) * (l2 + l3 + cs.c_min)))
    return max_pred, min_pred


def omega_threshold(X: float) -> float:
    """The detectable-maximum threshold e^gamma (log2 X + log3 X - log(2 log 3))."""
    l2 = math.log(math.log(X))
    l3 = math.log(l2)
    return math.exp(EULER_GAMMA) * (l2 + l3 - math.log(2.0 * math.log(3.0)))


def expected_log_abs(y: int, model: RandomCharModel | None = None) -> float:
    """E(log |L(1,X;y)|) from the per-prime 4-atom expectation."""
    model = model or RandomCharModel(3)
    if model.ell != 3:
        raise PrecondError("implemented for ell = 3")
    ps = primes_in(PrimeRange(2, y))
    pf = ps.astype(np.float64)
    x = 1.0 / pf
    la = 2.0 * np.log1p(-x)
    lb = np.log1p(x + x * x)
    alpha = np.ones_like(pf)
    one = ps % 3 == 1
    alpha[one] = pf[one] / (pf[one] + 2.0)
    return float(np.sum(-(alpha / 6.0) * la - (alpha / 3.0) * lb))
