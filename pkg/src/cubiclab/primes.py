"""Prime generation with residue-class filters and Mertens-type partial products."""

import math
from dataclasses import dataclass

import numpy as np

from cubiclab import BudgetError, PrecondError
from cubiclab._kernels import sieve_range

ONE_MOD3 = (3, 1)
TWO_MOD3 = (3, 2)

# output budget: primes are materialized as int64, cap the estimated count
DEFAULT_MAX_PRIMES = 100_000_000


@dataclass(frozen=True)
class PrimeRange:
    """Primes in [lo, hi], optionally restricted to p = residue (mod modulus)."""

    lo: int
    hi: int
    class_filter: tuple[int, int] | None = None  # (modulus, residue)

    def __post_init__(self):
        if not (2 <= self.lo <= self.hi):
            raise PrecondError(f"need 2 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if self.hi > 2**63 - 1:
            raise PrecondError("hi exceeds 2**63 - 1")
        if self.class_filter is not None:
            m, r = self.class_filter
            if m < 2 or not (0 <= r < m):
                raise PrecondError(f"bad residue condition {self.class_filter}")

    def __iter__(self):
        return iter(primes_in(self).tolist())


def primes_in(rng: PrimeRange, max_primes: int = DEFAULT_MAX_PRIMES) -> np.ndarray:
    """The filtered primes of the range, ascending (int64 array)."""
    est = _count_estimate(rng.lo, rng.hi)
    if est > max_primes:
        raise BudgetError(
            f"range [{rng.lo}, {rng.hi}] holds ~{est:.2g} primes, over the {max_primes} budget"
        )
    ps = sieve_range(rng.lo, rng.hi)
    if rng.class_filter is not None:
        m, r = rng.class_filter
        ps = ps[ps % m == r]
    return ps


def _count_estimate(lo, hi):
    if hi <= 10:
        return 5
    return (hi - lo) / math.log(hi) + 2 * math.sqrt(hi) / math.log(hi)


def prime_count(x: int, class_filter=None) -> int:
    """pi(x), optionally restricted to a residue class."""
    if x < 2:
        return 0
    return int(primes_in(PrimeRange(2, x, class_filter)).size)


def mertens_product(y: int, form: str = "one_minus_inv", s: float | None = None) -> float:
    """Partial Euler product over p <= y.

    form "one_minus_inv": prod (1 - 1/p); "zeta3_partial": prod (1 - 1/p^3);
    "custom": prod (1 - 1/p^s).  Accumulated as a compensated sum of logs and
    exponentiated once.
    """
    if y < 2:
        raise PrecondError("need y >= 2")
    if form == "one_minus_inv":
        expo = 1.0
    elif form == "zeta3_partial":
        expo = 3.0
    elif form == "custom":
        if s is None:
            raise PrecondError("custom form needs exponent s")
        expo = float(s)
    else:
        raise PrecondError(f"unknown form {form!r}")
    ps = primes_in(PrimeRange(2, y))
    logs = np.log1p(-np.power(ps.astype(np.float64), -expo))
    return math.exp(math.fsum(logs.tolist()))
