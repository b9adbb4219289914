"""Backend equivalence: the compiled kernels and the numpy fallback must agree
(bitwise for integer/uniform streams, to near machine precision for sums)."""

import numpy as np
import pytest

from cubiclab._kernels import BACKEND, get_impl
from cubiclab.eisenstein import cubic_symbol, split_prime
from cubiclab.family import _primitive_root

native = pytest.importorskip("cubiclab._kernels._native", reason="extension not built")
pyk = get_impl("python")


def test_backend_selected():
    assert BACKEND in ("native", "python")


@pytest.mark.parametrize("lo,hi", [(2, 10), (2, 10**5), (999_000, 1_000_100),
                                   (2**21 - 64, 2**21 + 64), (5, 4), (2, 2)])
def test_sieve_backends_agree(lo, hi):
    assert np.array_equal(native.sieve_range(lo, hi), pyk.sieve_range(lo, hi))


def test_sieve_segmented_matches_whole_range():
    whole = native.sieve_range(2, 10**6)
    parts = [native.sieve_range(a, min(a + 99_999, 10**6))
             for a in range(2, 10**6, 100_000)]
    assert np.array_equal(whole, np.concatenate(parts))


@pytest.mark.parametrize("q", [7, 13, 103, 10009, 100003])
def test_symbol_tables_agree_and_match_symbols(q):
    pp = split_prime(q)
    g = _primitive_root(q)
    kg = cubic_symbol(g, pp).k
    t1 = np.zeros(q, dtype=np.uint8)
    t2 = np.zeros(q, dtype=np.uint8)
    native.fill_symbol_table(q, g, kg, t1)
    pyk.fill_symbol_table(q, g, kg, t2)
    assert np.array_equal(t1, t2)
    assert t1[0] == 3
    for m in (1, 2, 3, q - 1, 5 % q):
        s = cubic_symbol(m, pp)
        assert t1[m % q] == s.code


def test_sweep_backends_agree():
    q1, q2 = 7, 13
    pp1, pp2 = split_prime(q1), split_prime(q2)
    tabs = []
    for q, pp in ((q1, pp1), (q2, pp2)):
        g = _primitive_root(q)
        t = np.zeros(q, dtype=np.uint8)
        native.fill_symbol_table(q, g, cubic_symbol(g, pp).k, t)
        tabs.append(t)
    qs = np.array([q1, q2], dtype=np.int64)
    flat = np.concatenate(tabs)
    offs = np.array([0, q1, q1 + q2], dtype=np.int64)
    M = np.zeros((2, 16), dtype=np.uint8)
    for idx in range(16):
        k1, k2 = idx >> 2, idx & 3
        for c, (e1, e2) in enumerate([(1, 1), (1, 2)]):
            M[c, idx] = 3 if 3 in (k1, k2) else (e1 * k1 + e2 * k2) % 3
    N = 50_000
    inv = 1.0 / np.arange(1, N + 1)
    out = []
    for impl in (native, pyk):
        rstate = np.zeros(2, dtype=np.int64)
        acc = np.zeros((2, 4))
        # split into two chunks to exercise the resumable state
        impl.sweep_chars(qs, flat, offs, M, 1, 30_000, rstate, inv[:29_999], acc)
        impl.sweep_chars(qs, flat, offs, M, 30_000, N + 1, rstate, inv[29_999:], acc)
        out.append(acc.copy())
    assert np.allclose(out[0], out[1], rtol=1e-13, atol=1e-15)
    # the four classes partition sum(1/n) minus the dead class
    assert out[0].sum(axis=1) == pytest.approx(np.full(2, inv.sum()), rel=1e-12)


def test_uniform_streams_bitwise_equal():
    u1 = np.empty(4096)
    u2 = np.empty(4096)
    native.mc_uniforms(0xDEADBEEF, 10**6, 10**6 + 4096, 117, u1)
    pyk.mc_uniforms(0xDEADBEEF, 10**6, 10**6 + 4096, 117, u2)
    assert np.array_equal(u1, u2)
    assert ((0 <= u1) & (u1 < 1)).all()


def test_logabs3_bitwise_equal():
    from cubiclab.montecarlo import _law_arrays3

    _, t0, t1, c1, cw = _law_arrays3(500)
    o1 = np.empty(2000)
    o2 = np.empty(2000)
    native.mc_logabs3(42, 500, 2500, t0, t1, c1, cw, o1)
    pyk.mc_logabs3(42, 500, 2500, t0, t1, c1, cw, o2)
    assert np.array_equal(o1, o2)


def test_uniform_quality_rough():
    u = np.empty(200_000)
    native.mc_uniforms(7, 0, 200_000, 3, u)
    assert abs(u.mean() - 0.5) < 0.005
    assert abs(np.mean(u * u) - 1 / 3) < 0.005
