from fractions import Fraction

import pytest

import symon


def test_orders():
    assert symon.sp_order(2, 3) == 51840
    assert symon.gsp_order(2, 3) == 103680
    assert symon.gsp_order(2, 5, q=2) == 37440000
    rep = symon.orders(2, 15, q=2)
    assert list(rep)[0] == "g"


def test_enumeration_and_membership():
    mats = symon.enumerate_group(1, 3, lam=1)
    assert len(mats) == 24
    assert mats == sorted(mats)
    assert all(symon.is_member(a, 3) for a in mats)
    assert symon.multiplier([[2, 0], [0, 1]], 3) == 2
    assert symon.multiplier([[1, 1], [0, 2]], 5) == 2
    with pytest.raises(symon.BudgetExceeded):
        symon.enumerate_group(2, 5, budget=1000)


def test_sampling_is_deterministic():
    a = symon.sample(2, 15, q=2, e=2, seed=7, index=3)
    assert a == symon.sample(2, 15, q=2, e=2, seed=7, index=3)
    assert all(symon.is_member(m, 15, q=2) for m in a)


def test_densities():
    assert symon.density(2, 5, q=2) == Fraction(101, 1040)
    assert symon.exact_mu_x(1, 3, 2) == Fraction(47, 768)
    lo, hi = symon.part_b_term(2, 2, 5)
    assert lo <= hi and abs(float(hi) - 156 / 9360000 ** 0.5) < 1e-12
    with pytest.raises(symon.DomainError, match=r"\(l - 2\)"):
        symon.special_set(2, 2, q=None)


def test_special_set():
    s0 = symon.special_set(2, 3, q=2, level="S0", lam=1)
    assert s0.cardinality == "216" and len(s0) == 216
    assert all(s0.contains(s0[i]) for i in range(len(s0)))
    sq = symon.special_set(2, 5, q=2)
    assert int(sq.cardinality) == 3636000


def test_reports():
    rep = symon.verify_counts(g=[2], ells=[3], qs=[2])
    assert rep["ok"] and rep["failed"] == 0
    b = symon.series_part_b(2, 2, 200)
    assert list(b)[:3] == ["kind", "g", "e"]
    a = symon.series_part_a(2, 2, 200)
    assert a["rows"][0]["ell"] == 3
    hit = symon.hit_frequency(2, 5, samples=2000, seed=1)
    assert hit["exact_value"] == "101/1040"
    assert hit == symon.hit_frequency(2, 5, samples=2000, seed=1, threads=3)
    ind = symon.independence(2, [3, 5], samples=2000)
    assert "deviation_sigmas" in ind
    mx = symon.mu_x(1, 3, 2, q=None, samples=2000)
    assert mx["exact_value"] == "47/768"
    bc = symon.borel_cantelli(2, [3, 5, 7, 11, 13], 1, samples=500)
    assert bc["note"] == "finite-range evidence only"
