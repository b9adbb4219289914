import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cubiclab import BudgetError, PrecondError
from cubiclab import family as fam
from cubiclab.eisenstein import CubeRoot


def test_enumeration_counts(family_100):
    assert len(fam.enumerate_family(10)) == 2
    assert len(family_100) == 26
    assert len(fam.enumerate_family(6)) == 0


def test_enumeration_order_and_structure(family_100):
    chars = family_100.characters
    conds = [c.conductor for c in chars]
    assert conds == sorted(conds)
    assert sorted(set(conds)) == [7, 13, 19, 31, 37, 43, 61, 67, 73, 79, 91, 97]
    # within conductor 91 = 7*13: exponent vectors in lex order
    grp = [c for c in chars if c.conductor == 91]
    assert [tuple(e for _, e in c.factors) for c in grp] == [
        (1, 1), (1, 2), (2, 1), (2, 2)]
    for c in grp:
        ps = [pp.rational_norm for pp, _ in c.factors]
        assert ps == sorted(ps)


def test_closed_under_conjugation(family_100):
    keyset = {(c.conductor, tuple(e for _, e in c.factors)) for c in family_100.characters}
    for c in family_100.characters:
        conj = c.conjugate()
        assert (conj.conductor, tuple(e for _, e in conj.factors)) in keyset


def test_chi_eval_basics(family_100):
    chi7 = family_100.characters[0]
    assert chi7.conductor == 7
    assert fam.chi_eval(chi7, 7) == 0
    assert fam.chi_eval(chi7, 1) == 1
    rng = random.Random(2)
    for c in random.Random(0).sample(family_100.characters, 6):
        for _ in range(20):
            m = rng.randrange(1, 10**5)
            v = fam.chi_eval(c, m)
            if math.gcd(m, c.conductor) > 1:
                assert v == 0
            else:
                assert abs(v * v.conjugate() - 1) < 1e-12
                assert abs(v**3 - 1) < 1e-12


def test_chi_eval_totally_multiplicative(family_100):
    rng = random.Random(4)
    for c in random.Random(1).sample(family_100.characters, 4):
        for _ in range(30):
            m1, m2 = rng.randrange(1, 1000), rng.randrange(1, 1000)
            assert abs(fam.chi_eval(c, m1 * m2)
                       - fam.chi_eval(c, m1) * fam.chi_eval(c, m2)) < 1e-12


def test_lvalue_self_consistency_and_conjugates(family_100):
    chi = family_100.characters[0]
    a1 = fam.l_value(chi, n_or_y=7 * 10**5).abs
    a2 = fam.l_value(chi, n_or_y=14 * 10**5).abs
    assert abs(a1 - a2) < 1e-4  # stable to 4 digits under N -> 2N
    lv = fam.l_value(family_100.characters[0], n_or_y=10**5)
    lv_conj = fam.l_value(family_100.characters[1], n_or_y=10**5)
    assert lv.abs == pytest.approx(lv_conj.abs, rel=1e-12)
    assert lv.value.conjugate() == pytest.approx(lv_conj.value, rel=1e-12)


def test_short_product_vs_series(family_100):
    chi = family_100.characters[0]
    series = fam.l_value(chi, n_or_y=10**6)
    short = fam.l_value(chi, "short_euler_product", 10**3)
    assert abs(math.log(series.abs) - math.log(short.abs)) < 0.05


def test_bulk_matches_single(family_100):
    lvs = fam.l_values(family_100, n_or_y=10**5)
    for i in (0, 1, 11, 22, 23, 25):
        single = fam.l_value(family_100.characters[i], n_or_y=10**5)
        assert lvs[i].value == pytest.approx(single.value, rel=1e-13)
    # all conjugate pairs have equal |L|
    a = {(c.conductor, tuple(e for _, e in c.factors)): lv.abs
         for c, lv in zip(family_100.characters, lvs)}
    for c, lv in zip(family_100.characters, lvs):
        cj = c.conjugate()
        assert a[(cj.conductor, tuple(e for _, e in cj.factors))] == pytest.approx(lv.abs, rel=1e-14)


def test_bulk_threads_deterministic(family_100):
    lv1 = fam.l_values(family_100, n_or_y=10**5, threads=1)
    lv2 = fam.l_values(family_100, n_or_y=10**5, threads=3)
    assert all(a.value == b.value for a, b in zip(lv1, lv2))


def test_sweep_state_across_block_boundary(family_100):
    # the truncated series is chunked internally in 2^22 blocks; the increment
    # between two truncations must equal the directly evaluated extra terms
    chi = family_100.characters[0]
    n1 = (1 << 22) - 40
    n2 = (1 << 22) + 40
    l1 = fam.l_value(chi, n_or_y=n1).value
    l2 = fam.l_value(chi, n_or_y=n2).value
    extra = sum(fam.chi_eval(chi, n) / n for n in range(n1 + 1, n2 + 1))
    assert l2 - l1 == pytest.approx(extra, abs=1e-15)


def test_truncation_warning():
    slc = fam.enumerate_family(100)
    lv = fam.l_value(slc.characters[-1], n_or_y=980)  # N ~ 10*cond, loose tail
    assert lv.warning is not None


def test_empirical_tail_contract(family_100):
    lvs = fam.l_values(family_100, n_or_y=10**5)
    t = fam.empirical_tail(family_100, [0.0, 1.0, 2.0, 50.0], "large", lvalues=lvs)
    vals = t.values()
    assert vals[0] == 1.0
    assert vals[-1] == 0.0
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    t2 = fam.empirical_tail(family_100, [1.0, 2.0], "small", lvalues=lvs)
    assert all(0 <= r.value <= 1 for r in t2.rows)
    with pytest.raises(PrecondError):
        fam.empirical_tail(family_100, [2.0, 1.0], "large", lvalues=lvs)


def test_character_sum_average(family_1e4, family_1e5):
    assert fam.character_sum_average(family_1e4, 1) == 1
    # convergence toward 7/9 for m = 7^3 as X grows through 1e3, 1e4, 1e5
    dists = [abs(fam.character_sum_average(s, 343) - 7 / 9)
             for s in (fam.enumerate_family(10**3), family_1e4, family_1e5)]
    assert dists[2] < dists[1] < dists[0]
    assert abs(fam.character_sum_average(family_1e4, 2)) < 0.05


def test_forced_character_search(family_1e4):
    empty = fam.forced_character_search(10**4, 1, {})
    # all prime-conductor characters: two per split prime <= X
    n_prime_conds = len({c.conductor for c in family_1e4.characters
                         if len(c.factors) == 1})
    assert len(empty) == 2 * n_prime_conds
    forced = fam.forced_character_search(10**4, 5, {2: CubeRoot(0), 5: 0})
    assert forced
    for c in forced:
        assert abs(fam.chi_eval(c, 2) - 1) < 1e-12
        assert abs(fam.chi_eval(c, 5) - 1) < 1e-12
    with pytest.raises(PrecondError):
        fam.forced_character_search(100, 50, {2: 0})


def test_forced_set_boosts_lvalues():
    forced = fam.forced_character_search(10**4, 5, {2: 0, 5: 0})
    allp = fam.forced_character_search(10**4, 1, {})
    mean_forced = np.mean([fam.l_value(c, "short_euler_product", 10**3).abs for c in forced])
    mean_all = np.mean([fam.l_value(c, "short_euler_product", 10**3).abs
                        for c in allp[:: max(1, len(allp) // 300)]])
    assert mean_forced > mean_all


def test_mod_p2_heuristic_quotient_exact():
    for p in (7, 13, 19):
        for ell in (3, 5, 7):
            assert fam.mod_p2_quotient(p, ell) == Fraction(p, p + ell - 1)


def test_canonicalization_swap_invariance():
    slc = fam.enumerate_family(2000)
    swapped = fam.FamilySlice(X=2000, characters=tuple(
        fam.CubicCharacter(c.conductor, tuple((pp.conjugate(), e) for pp, e in c.factors))
        for c in slc.characters))
    a1 = np.sort([lv.abs for lv in fam.l_values(slc)])
    a2 = np.sort([lv.abs for lv in fam.l_values(swapped)])
    assert np.allclose(a1, a2, rtol=1e-12)
    t1 = fam.empirical_tail(slc, [1.0, 1.3], "large")
    t2 = fam.empirical_tail(swapped, [1.0, 1.3], "large")
    assert t1.values() == t2.values()


def test_slice_cache_roundtrip(tmp_path, family_100):
    path = tmp_path / "slice.csv"
    fam.save_slice(family_100, path)
    loaded = fam.load_slice(path, X=100)
    assert len(loaded) == len(family_100)
    for a, b in zip(loaded.characters, family_100.characters):
        assert a == b
    lvs = fam.l_values(family_100, n_or_y=10**5)
    out = tmp_path / "lv.csv"
    fam.save_lvalues(lvs, out)
    header = out.read_text().splitlines()[0]
    assert header == "idx,conductor,re,im,abs,method,trunc"


def test_budget_and_ceiling():
    with pytest.raises(PrecondError):
        fam.enumerate_family(10**9)
    with pytest.raises(BudgetError):
        fam.enumerate_family(10**7, max_characters=100)
