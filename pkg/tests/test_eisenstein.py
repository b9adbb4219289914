import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubiclab import PrecondError
from cubiclab.eisenstein import (CubeRoot, EisensteinInt, cubic_symbol, gcd,
                                 is_prime, split_prime,
                                 symbol_totally_multiplicative_check)
from cubiclab.primes import ONE_MOD3, PrimeRange, primes_in


def test_norm_examples():
    assert EisensteinInt(2, 3).norm() == 7
    assert EisensteinInt(1, 0).norm() == 1
    assert EisensteinInt(3, 1).norm() == 7


def test_norm_multiplicative_exhaustive():
    rng = range(-10, 11)
    vals = [EisensteinInt(a, b) for a in rng for b in rng]
    sample = random.Random(0).sample(vals, 60)
    for z in sample:
        for w in sample[:20]:
            assert (z * w).norm() == z.norm() * w.norm()


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6),
       st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
@settings(max_examples=200)
def test_norm_multiplicative_random(a1, b1, a2, b2):
    z, w = EisensteinInt(a1, b1), EisensteinInt(a2, b2)
    assert (z * w).norm() == z.norm() * w.norm()


def test_conjugate_and_units():
    z = EisensteinInt(5, 2)
    assert z.conjugate().norm() == z.norm()
    assert len({(u.a, u.b) for u in z.associates()}) == 6


def test_split_prime_small():
    pp = split_prime(7)
    assert pp.value.norm() == 7
    assert pp.value.is_primary()
    assert pp.value.b > 0
    assert abs(pp.value.a) <= 3 and abs(pp.value.b) <= 3
    assert split_prime(13).value.norm() == 13
    with pytest.raises(PrecondError):
        split_prime(5)
    with pytest.raises(PrecondError):
        split_prime(21)


def test_every_split_prime_below_1e4():
    for p in primes_in(PrimeRange(2, 10**4, ONE_MOD3)).tolist():
        pp = split_prime(p)
        assert pp.value.norm() == p
        assert pp.value.is_primary()


def test_split_prime_descent_path():
    # above the exhaustive-search range, the gcd descent takes over
    for p in (10009, 1000003):
        assert is_prime(p) and p % 3 == 1
        pp = split_prime(p)
        assert pp.value.norm() == p
        assert pp.value.is_primary() and pp.value.b > 0


def test_cubic_symbol_examples():
    q = EisensteinInt(3, 1)  # norm 7: a non-primary associate also works
    assert cubic_symbol(2, q) == CubeRoot(1)
    assert cubic_symbol(1, q) == CubeRoot(0)
    assert cubic_symbol(14, q).is_zero


def test_symbol_cubes_to_one_and_periodicity():
    pp = split_prime(31)
    for m in range(1, 40):
        s = cubic_symbol(m, pp)
        if m % 31 == 0:
            assert s.is_zero
        else:
            assert (s * s * s) == CubeRoot(0)
            assert cubic_symbol(m + 31, pp) == s


def test_symbol_conjugation_is_complex_conjugate():
    for p in (7, 13, 61, 103):
        pp = split_prime(p)
        for m in (2, 3, 5, 11):
            assert cubic_symbol(m, pp.conjugate()) == cubic_symbol(m, pp).conjugate()


def test_symbol_multiplicative_randomized():
    rng = random.Random(1)
    qs = [split_prime(p) for p in (7, 13, 19, 103, 1009)]
    for _ in range(1000):
        q = rng.choice(qs)
        m1, m2 = rng.randrange(1, 10**6), rng.randrange(1, 10**6)
        assert symbol_totally_multiplicative_check(m1, m2, q)


def test_gcd_euclidean():
    z = EisensteinInt(7, 0) * EisensteinInt(4, 1)
    g = gcd(z, EisensteinInt(7, 0))
    assert g.norm() in (49,)  # the common factor 7 has norm 49
    g2 = gcd(EisensteinInt(4, 1), EisensteinInt(3, 5))
    assert g2.norm() >= 1


def test_cube_root_algebra():
    w = CubeRoot(1)
    assert (w * w) == CubeRoot(2)
    assert (w ** 3) == CubeRoot(0)
    assert w.conjugate() == CubeRoot(2)
    assert CubeRoot(None).is_zero
    assert abs(CubeRoot(1).to_complex() - complex(-0.5, 3**0.5 / 2)) < 1e-15
