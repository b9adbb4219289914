import math

import numpy as np
import pytest

from cubiclab import PrecondError
from cubiclab import montecarlo as mc
from cubiclab import randmodel as rm
from cubiclab.moments import moment_euler_product


def test_reproducibility_and_chunk_invariance():
    cfg = mc.SamplerConfig(seed=123, y=100, n_samples=5000)
    a = mc.sample(cfg).log_abs
    b = mc.sample(cfg).log_abs
    c = mc.sample(cfg, chunk=777).log_abs
    d = mc.sample(cfg, threads=3, chunk=512).log_abs
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)
    assert np.array_equal(a, d)


def test_single_prime_exact_distribution():
    # y=2: |1 - X(2)/2| is 1/2 w.p. 1/3 and sqrt(7)/2 w.p. 2/3
    cfg = mc.SamplerConfig(seed=9, y=2, n_samples=10**6)
    la = mc.sample(cfg).log_abs
    vals = np.unique(np.round(la, 12))
    assert len(vals) == 2
    assert math.exp(-vals.min()) == pytest.approx(math.sqrt(7) / 2, rel=1e-9)
    assert math.exp(-vals.max()) == pytest.approx(0.5, rel=1e-9)
    # mean of |L|^2 matches E_2(1) = 12/7 within 3 SE
    x = np.exp(2 * la)
    se = x.std(ddof=1) / math.sqrt(len(x))
    assert abs(x.mean() - 12 / 7) < 3 * se


def test_atom_distribution_matches_law():
    cfg = mc.SamplerConfig(seed=31, y=20, n_samples=10**6)
    n = cfg.n_samples
    for p in (3, 5, 7, 13):
        counts = mc.sample_atoms(cfg, p)
        law = rm.x_law(rm.RandomCharModel(3), p)
        assert sum(counts.values()) == n
        for key, frac in law.items():
            expect = float(frac)
            se = math.sqrt(max(expect * (1 - expect), 1e-12) / n)
            assert abs(counts[key] / n - expect) < 4 * se + 1e-9


def test_mean_log_abs_vs_analytic():
    cfg = mc.SamplerConfig(seed=5, y=10**4, n_samples=10**6)
    la = mc.sample(cfg).log_abs
    se = la.std(ddof=1) / math.sqrt(len(la))
    assert abs(la.mean() - rm.expected_log_abs(10**4)) < 3 * se


def test_y_sensitivity_documented():
    # no rate is claimed; both cutoffs sit within MC error of their analytic means
    for y in (10**3, 10**4):
        cfg = mc.SamplerConfig(seed=6, y=y, n_samples=2 * 10**5)
        la = mc.sample(cfg).log_abs
        se = la.std(ddof=1) / math.sqrt(len(la))
        assert abs(la.mean() - rm.expected_log_abs(y)) < 3 * se


def test_variance_sanity_vs_moments():
    cfg = mc.SamplerConfig(seed=8, y=10**3, n_samples=10**6)
    x2 = np.exp(2 * mc.sample(cfg).log_abs)
    m2 = moment_euler_product(10**3, 1.0)
    m4 = moment_euler_product(10**3, 2.0)
    var_emp = x2.var(ddof=1)
    mu4 = float(np.mean((x2 - x2.mean()) ** 4))
    se_var = math.sqrt((mu4 - var_emp**2) / len(x2))
    assert abs(var_emp - (m4 - m2 * m2)) < 3 * se_var


def test_empirical_tails_contract():
    cfg = mc.SamplerConfig(seed=77, y=10**3, n_samples=20_000)
    batch = mc.sample(cfg)
    t = mc.empirical_tails(batch, [0.0, 1.0, 1.5, 2.0], "large")
    vals = t.values()
    assert vals[0] == 1.0
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert all(r.stderr is not None for r in t.rows)
    # deep tail rows are flagged, not silently trusted
    deep = mc.empirical_tails(batch, [3.5], "large").rows[0]
    assert deep.count < 25 and not deep.ok
    small = mc.empirical_tails(batch, [1.0, 1.3], "small")
    assert all(0 <= r.value <= 1 for r in small.rows)


def test_save_tails_schema(tmp_path):
    cfg = mc.SamplerConfig(seed=4, y=500, n_samples=5000)
    t = mc.empirical_tails(mc.sample(cfg), [1.0, 1.5], "large")
    out = tmp_path / "mc.csv"
    mc.save_tails(t, cfg, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "tau,side,estimate,stderr,n,seed,y"
    assert len(lines) == 3


def test_wilson_interval():
    c, h = mc.wilson_interval(50, 100, z=1.0)
    assert 0.4 < c - h < c + h < 0.6
    c0, h0 = mc.wilson_interval(0, 100)
    assert c0 - h0 >= 0  # never leaves [0, 1]


def test_general_ell_sampling():
    cfg = mc.SamplerConfig(seed=21, y=50, n_samples=50_000, ell=5)
    la = mc.sample(cfg).log_abs
    assert np.isfinite(la).all()
    counts = mc.sample_atoms(cfg, 11)  # 11 ≡ 1 mod 5
    law = rm.x_law(rm.RandomCharModel(5), 11)
    n = cfg.n_samples
    for key, frac in law.items():
        expect = float(frac)
        se = math.sqrt(expect * (1 - expect) / n)
        assert abs(counts[key] / n - expect) < 5 * se


def test_preconditions():
    with pytest.raises(PrecondError):
        mc.SamplerConfig(seed=1, y=1, n_samples=10)
    with pytest.raises(PrecondError):
        mc.SamplerConfig(seed=1, y=100, n_samples=10**9)
    cfg = mc.SamplerConfig(seed=1, y=100, n_samples=100)
    with pytest.raises(PrecondError):
        mc.empirical_tails(mc.sample(cfg), [1.0], "sideways")
