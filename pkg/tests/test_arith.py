"""Tests for prime tables, factorization, smooth numbers, and constants.

Expected values are either computed here by independent brute force (trial
division, direct filtering) or are frozen classical constants checked against
mpmath's high-precision values.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirpoly.arith import (
    EULER_GAMMA,
    MERTENS_CONSTANT,
    PrimeTable,
    coprime_count,
    coprime_harmonic_sum,
    dickman_rho,
    enumerate_smooth,
    euler_weighted_product,
    factorize,
    largest_prime_factor_sieve,
    mertens_prime_sum,
    nth_prime_bound,
    p_plus,
    sieve_primes,
    smooth_harmonic_sum,
    smooth_harmonic_asymptotic_check,
    smooth_stats,
)
from dirpoly.errors import (
    DivergentFactor,
    InvalidArgument,
    ResourceLimit,
    TableTooSmall,
)


def is_prime_naive(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# sieve and table
# ---------------------------------------------------------------------------


def test_sieve_matches_trial_division():
    table = sieve_primes(1000)
    expected = [n for n in range(2, 1001) if is_prime_naive(n)]
    assert table.primes.tolist() == expected
    assert table.pi == 168


def test_sieve_first_primes(table_100):
    assert table_100.primes[:10].tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert table_100.prime(1) == 2
    assert table_100.prime(4) == 7
    assert table_100.rank(7) == 4
    assert table_100.rank(97) == 25


def test_sieve_rejects_tiny_limit():
    with pytest.raises(InvalidArgument):
        sieve_primes(1)


def test_rank_of_composite_raises(table_100):
    with pytest.raises(InvalidArgument):
        table_100.rank(8)


def test_pi_of(table_100):
    assert table_100.pi_of(10) == 4
    assert table_100.pi_of(2) == 1
    assert table_100.pi_of(1.5) == 0
    with pytest.raises(TableTooSmall):
        table_100.pi_of(101)


def test_is_prime_consistent(table_100):
    for n in range(1, 101):
        assert table_100.is_prime(n) == is_prime_naive(n)


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------


def test_factorize_360(table_100):
    fac = factorize(360, table_100)
    # 360 = 2^3 * 3^2 * 5, prime indices 1, 2, 3
    assert fac.factors == ((1, 3), (2, 2), (3, 1))
    assert fac.omega == 3
    assert fac.big_omega == 6
    assert fac.primes(table_100) == (2, 3, 5)


def test_factorize_one(table_100):
    fac = factorize(1, table_100)
    assert fac.factors == ()
    assert fac.omega == 0
    assert fac.big_omega == 0


def test_factorize_beyond_limit_by_trial_division(table_100):
    # 8633 = 89 * 97 exceeds the table limit but both factors are certified.
    fac = factorize(8633, table_100)
    assert fac.primes(table_100) == (89, 97)
    # 9409 = 97^2
    fac = factorize(9409, table_100)
    assert fac.factors == ((25, 2),)


def test_factorize_uncertified_factor_raises(table_100):
    # 101 * 103: prime factors beyond the table.
    with pytest.raises(TableTooSmall):
        factorize(101 * 103, table_100)
    small = sieve_primes(10)
    with pytest.raises(TableTooSmall):
        factorize(101, small)  # prime remainder beyond limit


def test_factorize_rejects_nonpositive(table_100):
    with pytest.raises(InvalidArgument):
        factorize(0, table_100)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10_000))
def test_factorize_round_trip(table_10k, n):
    fac = factorize(n, table_10k)
    prod = 1
    last = 0
    for j, a in fac.factors:
        assert j > last  # indices strictly ascending
        assert a >= 1
        prod *= table_10k.prime(j) ** a
        last = j
    assert prod == n


def test_p_plus(table_100):
    assert p_plus(1, table_100) == 1
    assert p_plus(12, table_100) == 3
    assert p_plus(97, table_100) == 97
    assert p_plus(2 * 3 * 5 * 7, table_100) == 7


def test_largest_prime_factor_sieve(table_10k):
    lpf = largest_prime_factor_sieve(500, table_10k)
    assert lpf[1] == 1
    for n in range(2, 501):
        assert lpf[n] == p_plus(n, table_10k)


# ---------------------------------------------------------------------------
# smooth numbers
# ---------------------------------------------------------------------------


def test_enumerate_smooth_small_cases(table_100):
    assert enumerate_smooth(10, 3, table_100).tolist() == [1, 2, 3, 4, 6, 8, 9]
    assert enumerate_smooth(10, 2, table_100).tolist() == [1, 2, 4, 8]
    assert enumerate_smooth(10, 1, table_100).tolist() == [1]
    assert enumerate_smooth(1, 50, table_100).tolist() == [1]


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=2000),
    st.integers(min_value=1, max_value=60),
)
def test_enumerate_smooth_matches_filter(table_10k, x, y):
    got = enumerate_smooth(x, y, table_10k).tolist()
    lpf = largest_prime_factor_sieve(max(x, 1), table_10k)
    expected = [n for n in range(1, x + 1) if lpf[n] <= y]
    assert got == expected


def test_enumerate_smooth_cap(table_100):
    with pytest.raises(ResourceLimit):
        enumerate_smooth(10_000, 97, table_100, cap=100)


def test_smooth_harmonic_sum(table_100):
    # 2-smooth n <= 10: 1, 2, 4, 8
    assert smooth_harmonic_sum(10, 2, 1.0, table_100) == pytest.approx(1.875)
    # beta = 0 counts the smooth integers
    assert smooth_harmonic_sum(10, 3, 0.0, table_100) == pytest.approx(7.0)


def test_smooth_stats(table_100):
    stats = smooth_stats(100, 5, [0.5, 1.0], table_100)
    ns = enumerate_smooth(100, 5, table_100)
    assert stats.count == ns.size
    assert stats.harmonic_sums[1.0] == pytest.approx(float(np.sum(1.0 / ns)))


def test_smooth_asymptotic_check(table_10k):
    chk = smooth_harmonic_asymptotic_check(10_000, 10, table_10k)
    assert chk.u == pytest.approx(4.0)
    assert chk.rhs == pytest.approx(math.exp(EULER_GAMMA) * math.log(10))
    # The truncated sum sits below the full Euler product 4.375 and near
    # the main term; the residual is a small fraction of it.
    assert 0 < chk.lhs < 4.375
    assert abs(chk.residual) < 0.5 * chk.rhs
    assert chk.residual_over_u == pytest.approx(chk.residual / 4.0)


# ---------------------------------------------------------------------------
# constants and Dickman's function
# ---------------------------------------------------------------------------


def test_constants_against_mpmath():
    mpmath.mp.dps = 30
    assert abs(EULER_GAMMA - float(mpmath.euler)) < 1e-15
    mertens = mpmath.mpf(
        "0.26149721284764278375542683860869585905"
    )  # Meissel-Mertens constant, standard expansion
    assert abs(MERTENS_CONSTANT - float(mertens)) < 1e-15


def test_dickman_closed_forms():
    for u in [0.0, 0.3, 1.0]:
        assert dickman_rho(u) == 1.0
    # On [1, 2]: rho(u) = 1 - log(u).
    for u in [1.1, 1.5, 1.9, 2.0]:
        assert abs(dickman_rho(u) - (1.0 - math.log(u))) < 1e-8


def test_dickman_u3_against_quadrature():
    # On [2, 3]: rho(u) = rho(2) - int_2^u (1 - log(t-1))/t dt.
    mpmath.mp.dps = 30
    expected = float(
        (1 - mpmath.log(2))
        - mpmath.quad(lambda t: (1 - mpmath.log(t - 1)) / t, [2, 3])
    )
    assert abs(dickman_rho(3.0) - expected) < 1e-8


def test_dickman_monotone_decreasing():
    us = np.linspace(1.0, 6.0, 101)
    vals = [dickman_rho(float(u)) for u in us]
    assert all(a >= b > 0 for a, b in zip(vals, vals[1:]))


def test_dickman_rejects_negative():
    with pytest.raises(InvalidArgument):
        dickman_rho(-0.1)


# ---------------------------------------------------------------------------
# prime sums and products
# ---------------------------------------------------------------------------


def test_mertens_prime_sum_x10(table_100):
    chk = mertens_prime_sum(10, table_100)
    assert chk.value == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7)
    assert chk.reference == pytest.approx(
        math.log(math.log(10)) + MERTENS_CONSTANT
    )
    assert chk.tolerance == pytest.approx(5 / math.log(10))
    assert chk.within


def test_mertens_within_tolerance_as_x_grows(table_1m):
    for x in [100, 10_000, 1_000_000]:
        assert mertens_prime_sum(x, table_1m).within


def test_mertens_preconditions(table_100):
    with pytest.raises(InvalidArgument):
        mertens_prime_sum(1.5, table_100)
    with pytest.raises(TableTooSmall):
        mertens_prime_sum(1000, table_100)


def test_euler_weighted_product_linear(table_100):
    assert euler_weighted_product(1, 1.0, "-", "linear", table_100) == pytest.approx(2.0)
    # (1 - 1/2)^-1 (1 - 1/3)^-1 = 3 for the power form with lam = 1
    assert euler_weighted_product(2, 1.0, "-", "power", table_100) == pytest.approx(3.0)
    assert euler_weighted_product(0, 1.0, "-", "linear", table_100) == 1.0
    # plus variant: (1 + 1/2)^-1 = 2/3
    assert euler_weighted_product(1, 1.0, "+", "linear", table_100) == pytest.approx(2 / 3)


def test_euler_weighted_product_brute(table_100):
    lam = 0.8
    expected = 1.0
    for p in [2, 3, 5, 7, 11]:
        expected *= 1.0 / (1.0 - lam / p)
    assert euler_weighted_product(5, lam, "-", "linear", table_100) == pytest.approx(expected)


def test_euler_weighted_product_divergent(table_100):
    with pytest.raises(DivergentFactor):
        euler_weighted_product(3, 2.0, "-", "linear", table_100)
    with pytest.raises(DivergentFactor):
        euler_weighted_product(3, 0.0, "-", "power", table_100)


def test_euler_weighted_product_without_table():
    # The helper sieves what it needs when no table is supplied.
    assert euler_weighted_product(25, 1.0, "-", "power") > 1.0


def test_nth_prime_bound(table_10k):
    for j in [1, 5, 6, 10, 100, 1000]:
        assert table_10k.prime(j) <= nth_prime_bound(j)


# ---------------------------------------------------------------------------
# coprime counts
# ---------------------------------------------------------------------------


def test_coprime_count_first_four_primes(table_100):
    # Excluding multiples of 2, 3, 5, 7 (prime indices 1..4) leaves only 1.
    res = coprime_count(10, {1, 2, 3, 4}, table_100)
    assert res.count == 1
    assert res.product_bound == pytest.approx(
        10 * (1 / 2) * (2 / 3) * (4 / 5) * (6 / 7)
    )


def test_coprime_count_brute(table_100):
    K = {2, 4}  # primes 3 and 7
    res = coprime_count(50, K, table_100)
    expected = sum(1 for k in range(1, 51) if k % 3 and k % 7)
    assert res.count == expected


def test_coprime_count_empty_K(table_100):
    res = coprime_count(25, set(), table_100)
    assert res.count == 25
    assert res.product_bound == 25.0


def test_coprime_harmonic_sum_brute(table_100):
    got = coprime_harmonic_sum(30, {1, 3}, 0.5, table_100)  # primes 2 and 5
    expected = sum(k ** -0.5 for k in range(1, 31) if k % 2 and k % 5)
    assert got == pytest.approx(expected)


def test_coprime_large_index_beyond_x(table_100):
    # p_25 = 97 > 20 divides nothing <= 20; bound product must skip it too.
    res = coprime_count(20, {25}, table_100)
    assert res.count == 20
    assert res.product_bound == 20.0
