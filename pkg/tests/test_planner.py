import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

import brute
from vdwforge.groups import INF
from vdwforge.planner import (
    as_fraction,
    bound_table,
    check_gcol,
    check_synth,
    decompose,
    delta_exact,
    exponent_t,
    parse_window,
    primes_in_window,
    sieve,
)


def test_sieve_matches_trial_division():
    assert sieve(1000) == brute.primes_upto(1000)
    assert sieve(1) == []


@pytest.mark.parametrize(
    "k, eps, override, expected",
    [
        (100, Fraction(1, 20), None, [97]),
        (10, Fraction(1, 20), None, []),
        (7, Fraction(1, 20), None, [7]),
        (5, None, (5, 11), [7, 11]),
        (5, None, (2, 5), [3, 5]),
    ],
)
def test_primes_in_window(k, eps, override, expected):
    got = primes_in_window(k, eps or Fraction(1, 20), override)
    assert got == expected
    lo, hi = override or ((1 - eps) * k, k)
    assert got == [p for p in brute.primes_upto(int(hi)) if p > lo]


def test_window_is_half_open():
    # p = (1 - eps) k must be excluded: k = 20, eps = 1/20 gives lower end 19
    assert primes_in_window(20, Fraction(1, 20)) == []
    assert parse_window("2:5") == (2, 5)
    with pytest.raises(ValueError):
        parse_window("5:2")
    with pytest.raises(ValueError):
        parse_window("7")


def test_as_fraction_float_is_decimal():
    assert as_fraction(0.05) == Fraction(1, 20)


@pytest.mark.parametrize("r, a, b", [(2, 2, 0), (3, 3, 0), (4, 4, 0), (5, 2, 1), (8, 2, 2), (10, 4, 2), (11, 2, 3)])
def test_decompose(r, a, b):
    assert decompose(r) == (a, b)


def _t_oracle(k, r, eps):
    with mpmath.workdps(60):
        x = k * (1 - 2 * mpmath.mpf(eps.numerator) / eps.denominator) * mpmath.log(r) / mpmath.log(k)
        return int(mpmath.floor(x))


@pytest.mark.parametrize("k, r, expected", [(100, 3, 21), (5, 2, 1), (5, 3, 3), (7, 7, 6)])
def test_exponent_t(k, r, expected):
    assert exponent_t(k, r) == expected == _t_oracle(k, r, Fraction(1, 20))


def test_exponent_t_r_equals_k():
    # log r / log k = 1 exactly, so t = floor((1 - 2 eps) k) with no float slack
    for k in range(3, 200):
        assert exponent_t(k, k) == math.floor(Fraction(9, 10) * k)


@settings(max_examples=300, deadline=None)
@given(st.integers(3, 400), st.integers(2, 400), st.integers(1, 99))
def test_exponent_t_matches_high_precision(k, r, e):
    eps = Fraction(e, 1000)
    assert exponent_t(k, r, eps) == _t_oracle(k, r, eps)


def test_exponent_t_rejects_bad_eps():
    with pytest.raises(ValueError):
        exponent_t(10, 3, Fraction(1, 10))


def test_delta():
    assert delta_exact(3, 2) == Fraction(5, 9)
    assert delta_exact(3, 3) == Fraction(19, 27)
    assert delta_exact(5, 1) == Fraction(1, 5)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 11, 13]), st.integers(1, 30))
def test_delta_increases_in_t(p, t):
    assert 0 < delta_exact(p, t) < delta_exact(p, t + 1) < 1


def test_check_synth_examples():
    # (9)^5 = 59049 against 81 * 5^5 = 253125 and 16 * 5^5 = 50000
    rep = check_synth(3, 2, 5, 5, 9)
    assert rep.delta == Fraction(5, 9)
    assert rep.cond3 is False
    assert rep.margins["cond3"] == 59049 - 253125
    rep = check_synth(3, 2, 5, 5, 4)
    assert rep.cond3 is True
    assert rep.margins["cond3"] == 59049 - 50000


def test_check_synth_uses_min_of_q_and_k():
    assert check_synth(3, 2, 100, 5, 4).m == 5
    assert check_synth(3, 2, 2, 5, 4).m == 2


def test_check_synth_cond2():
    assert check_synth(3, 3, 5, 5, 135, h1_min_order=5).cond2 is True
    assert check_synth(3, 3, 5, 5, 135, h1_min_order=3).cond2 is False
    assert check_synth(3, 3, 5, 5, 135, h1_min_order=INF).cond2 is True
    assert check_synth(3, 3, 5, 5, 135).cond2 is None


@pytest.mark.parametrize("args", [(3, 0, 5, 5, 9), (4, 2, 5, 5, 9), (3, 2, 0, 5, 9)])
def test_check_synth_rejects(args):
    with pytest.raises(ValueError):
        check_synth(*args)


def test_report_rendering():
    rep = check_synth(3, 3, 5, 5, 135, h1_min_order=5, kappa_claim=True, r=2)
    text = rep.to_text()
    assert "cond3: false" in text and "delta: 19/27" in text
    assert "\n" not in rep.to_line()
    assert not rep.passed


def test_check_gcol():
    # 4 * 25 * 101 = 10100 > 2^4
    ok, margin = check_gcol(101, 2, 5, 101)
    assert not ok and margin == 16 - 10100
    ok, _ = check_gcol(1, 2, 5, INF)
    assert ok
    assert check_gcol(101, 10, 5, 101) == (False, 10**4 - 10100)
    assert check_gcol(7, 10, 5, 7) == (True, 10**4 - 4 * 25 * 7)
    assert check_gcol(7, 10, 11, 7)[0] is False  # min order below k


@pytest.mark.parametrize("r", [2, 5, 8, 1000])
def test_bound_table(r):
    rows = bound_table(r, [3, 10])
    for row in rows:
        assert row.a + 3 * row.b == r and row.a in (2, 3, 4)
        assert row.erdos_lovasz == Fraction(r ** (row.k - 1), 4 * row.k)
        assert row.blowup_bound == row.base**row.k
        assert row.beats == (r >= 5)


def test_bound_table_r8():
    row = bound_table(8, [4])[0]
    assert (row.a, row.b, row.base) == (2, 2, 18)
