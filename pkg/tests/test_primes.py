import math

import numpy as np
import pytest

from cubiclab import BudgetError, PrecondError
from cubiclab.primes import (ONE_MOD3, PrimeRange, mertens_product, prime_count,
                             primes_in)


def trial_division_primes(n):
    return [k for k in range(2, n + 1)
            if all(k % d for d in range(2, math.isqrt(k) + 1))]


def test_filtered_range_examples():
    assert primes_in(PrimeRange(2, 20, ONE_MOD3)).tolist() == [7, 13, 19]
    assert primes_in(PrimeRange(2, 10)).tolist() == [2, 3, 5, 7]


def test_count_one_mod3_below_100():
    # trial-division oracle: 7,13,19,31,37,43,61,67,73,79,97
    oracle = [p for p in trial_division_primes(100) if p % 3 == 1]
    assert len(oracle) == 11
    assert prime_count(100, ONE_MOD3) == 11


def test_sieve_matches_trial_division_exhaustive():
    oracle = np.array(trial_division_primes(10**4), dtype=np.int64)
    assert np.array_equal(primes_in(PrimeRange(2, 10**4)), oracle)


def test_segment_boundaries():
    # windows straddling the 2*2^20 segment span
    span = 2 * (1 << 20)
    lo, hi = span - 50, span + 50
    window = primes_in(PrimeRange(lo, hi))
    full = primes_in(PrimeRange(2, hi))
    assert np.array_equal(window, full[full >= lo])


def test_range_determinism_and_iteration():
    r = PrimeRange(100, 1000, ONE_MOD3)
    a, b = primes_in(r), primes_in(r)
    assert np.array_equal(a, b)
    assert list(r) == a.tolist()


def test_mertens_small_cases():
    assert mertens_product(10) == pytest.approx(8 / 35, rel=1e-15)
    assert mertens_product(2, form="custom", s=3) == pytest.approx(0.875, rel=1e-15)
    assert mertens_product(10, form="zeta3_partial") == pytest.approx(
        (1 - 1 / 8) * (1 - 1 / 27) * (1 - 1 / 125) * (1 - 1 / 343), rel=1e-14
    )


def test_mertens_third_theorem_limit():
    gamma = 0.57721566490153286061
    y = 10**6
    assert math.exp(gamma) * math.log(y) * mertens_product(y) == pytest.approx(1.0, abs=1e-2)


def test_mertens_ratio_monotone_approach():
    gamma = 0.57721566490153286061
    diffs = [abs(math.exp(gamma) * math.log(y) * mertens_product(y) - 1.0)
             for y in (10**3, 10**4, 10**5, 10**6)]
    assert all(b < a for a, b in zip(diffs, diffs[1:]))


def test_preconditions_and_budget():
    with pytest.raises(PrecondError):
        PrimeRange(10, 5)
    with pytest.raises(PrecondError):
        PrimeRange(1, 10)
    with pytest.raises(PrecondError):
        mertens_product(1)
    with pytest.raises(BudgetError):
        primes_in(PrimeRange(2, 10**9), max_primes=1000)
