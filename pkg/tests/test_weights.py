"""Tests for weight families, characteristic sums, and condition checks.

Brute-force oracles (direct divisor enumeration, explicit factor counting)
are built inline; the condition-check expectations are hand-derived and
frozen in the asserts.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirpoly.arith import factorize
from dirpoly.errors import InvalidArgument, UndefinedWeight
from dirpoly.weights import (
    MEAN_SQUARE_EXPONENT_LIMIT,
    WeightSpec,
    characteristic_sums,
    check_all_conditions,
    check_condition,
    eval_weight,
    log_power_ratios,
    parse_weight,
    sup_prime_value,
    weight_values,
)


def divisor_count(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if n % k == 0)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def test_eval_divisor(table_100):
    assert eval_weight(WeightSpec.divisor(), 12, table_100) == 6.0
    assert eval_weight(WeightSpec.divisor(), 1, table_100) == 1.0


def test_eval_lambda_big_omega(table_100):
    spec = WeightSpec.lambda_big_omega(1.2)
    assert eval_weight(spec, 8, table_100) == pytest.approx(1.2**3)
    assert eval_weight(spec, 1, table_100) == 1.0


def test_eval_lambda_omega(table_100):
    spec = WeightSpec.lambda_omega(1.5)
    assert eval_weight(spec, 12, table_100) == pytest.approx(1.5**2)  # 2^2*3
    assert eval_weight(spec, 30, table_100) == pytest.approx(1.5**3)


def test_eval_coprime_indicator(table_100):
    # indices {1, 2} are the primes 2 and 3
    spec = WeightSpec.coprime_indicator({1, 2})
    assert eval_weight(spec, 35, table_100) == 1.0
    assert eval_weight(spec, 6, table_100) == 0.0
    assert eval_weight(spec, 1, table_100) == 1.0


def test_eval_truncated_divisor(table_100):
    spec = WeightSpec.truncated_divisor(3)
    assert eval_weight(spec, 12, table_100) == 3.0  # divisors <= 3: 1, 2, 3
    assert eval_weight(spec, 1, table_100) == 1.0
    full = WeightSpec.truncated_divisor(100)
    for n in (1, 7, 36, 97):
        assert eval_weight(full, n, table_100) == divisor_count(n)


def test_eval_exp_log_alpha(table_100):
    spec = WeightSpec.exp_log_alpha(0.5)
    assert eval_weight(spec, 1, table_100) == 1.0
    assert eval_weight(spec, 55, table_100) == pytest.approx(
        math.exp(math.sqrt(math.log(55)))
    )


def test_eval_product(table_100):
    spec = WeightSpec.product(WeightSpec.divisor(), WeightSpec.lambda_omega(1.5))
    assert eval_weight(spec, 12, table_100) == pytest.approx(6 * 1.5**2)


def test_eval_custom(table_100):
    spec = WeightSpec.custom([1.0, 0.5, 2.0])
    assert eval_weight(spec, 2, table_100) == 0.5
    with pytest.raises(UndefinedWeight):
        eval_weight(spec, 4, table_100)
    assert spec.d1_is_one
    assert not WeightSpec.custom([2.0]).d1_is_one


def test_eval_rejects_bad_args(table_100):
    with pytest.raises(InvalidArgument):
        eval_weight(WeightSpec.one(), 0, table_100)
    with pytest.raises(InvalidArgument):
        WeightSpec.lambda_omega(0.0)
    with pytest.raises(InvalidArgument):
        WeightSpec.exp_log_alpha(1.0)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=3000))
def test_vector_matches_scalar(table_10k, n):
    specs = [
        WeightSpec.one(),
        WeightSpec.divisor(),
        WeightSpec.lambda_omega(1.3),
        WeightSpec.lambda_big_omega(0.8),
        WeightSpec.coprime_indicator({1, 3}),
        WeightSpec.truncated_divisor(10),
        WeightSpec.exp_log_alpha(0.4),
        WeightSpec.product(WeightSpec.divisor(), WeightSpec.coprime_indicator({2})),
    ]
    for spec in specs:
        vals = weight_values(spec, n, table_10k)
        assert vals[n] == pytest.approx(eval_weight(spec, n, table_10k))
        assert vals[0] == 0.0


def test_weight_values_divisor_brute(table_100):
    vals = weight_values(WeightSpec.divisor(), 60, table_100)
    for n in range(1, 61):
        assert vals[n] == divisor_count(n)


# ---------------------------------------------------------------------------
# parsing / formatting
# ---------------------------------------------------------------------------


def test_parse_round_trip():
    for text in [
        "one",
        "divisor",
        "lambda_omega(1.2)",
        "lambda_big_omega(1.5)",
        "coprime_indicator(1,2,5)",
        "truncated_divisor(50)",
        "exp_log_alpha(0.5)",
        "product(divisor;lambda_omega(1.2))",
    ]:
        spec = parse_weight(text)
        assert spec.text() == text
        assert parse_weight(spec.text()) == spec


def test_parse_rejects_garbage():
    with pytest.raises(InvalidArgument):
        parse_weight("frobnicate(3)")
    with pytest.raises(InvalidArgument):
        parse_weight("divisor(")


# ---------------------------------------------------------------------------
# characteristic sums
# ---------------------------------------------------------------------------


def test_characteristic_sums_one(table_100):
    cs = characteristic_sums(WeightSpec.one(), 50, table_100)
    assert cs.D1 == 50.0
    assert cs.D1_tilde == 1.0
    assert cs.D2_tilde == 1.0


def test_characteristic_sums_divisor_m4(table_100):
    cs = characteristic_sums(WeightSpec.divisor(), 4, table_100)
    assert cs.D1 == 8.0  # 1 + 2 + 2 + 3
    assert cs.D2 == 18.0  # 1 + 4 + 4 + 9
    assert cs.D1_tilde == 2.0  # max(1, 3/2, 5/3, 8/4)
    assert cs.D2_tilde == pytest.approx(math.sqrt(18 / 4))


def test_characteristic_sums_coprime_below_one(table_100):
    cs = characteristic_sums(WeightSpec.coprime_indicator({1, 2}), 100, table_100)
    assert cs.D1_tilde <= 1.0
    assert cs.D2_tilde <= 1.0


def test_characteristic_sums_monotone(table_100):
    spec = WeightSpec.divisor()
    prev = characteristic_sums(spec, 2, table_100)
    for M in range(3, 40):
        cur = characteristic_sums(spec, M, table_100)
        assert cur.D1 >= prev.D1
        assert cur.D2 >= prev.D2
        assert cur.D1_tilde >= prev.D1_tilde
        assert cur.D2_tilde >= prev.D2_tilde
        prev = cur


def test_sup_prime_value(table_100):
    assert sup_prime_value(WeightSpec.one(), 50, table_100) == 1.0
    assert sup_prime_value(WeightSpec.divisor(), 50, table_100) == 2.0
    assert sup_prime_value(WeightSpec.lambda_omega(1.3), 50, table_100) == 1.3


def test_log_power_ratios_one_weight(table_100):
    r1, r2 = log_power_ratios(WeightSpec.one(), 100, table_100)
    assert r1 == pytest.approx(1 / math.log(100))
    assert r2 == pytest.approx(1 / math.log(100))


def test_log_power_ratios_trend(table_10k):
    # lambda_omega(1.2): ratios bounded, r1 non-increasing across the grid
    spec = WeightSpec.lambda_omega(1.2)
    r1s = [log_power_ratios(spec, N, table_10k)[0] for N in (1000, 3000, 10_000)]
    assert all(a >= b for a, b in zip(r1s, r1s[1:]))


def test_log_power_ratios_divisor_stable(table_10k):
    r1a, _ = log_power_ratios(WeightSpec.divisor(), 1000, table_10k)
    r1b, _ = log_power_ratios(WeightSpec.divisor(), 10_000, table_10k)
    assert 0 < r1b < 2 * r1a  # same order of magnitude, no blow-up


# ---------------------------------------------------------------------------
# condition checks
# ---------------------------------------------------------------------------

SUBMULT_FAMILIES = [
    WeightSpec.divisor(),
    WeightSpec.lambda_omega(1.3),
    WeightSpec.lambda_big_omega(1.3),
    WeightSpec.coprime_indicator({1, 4}),
    WeightSpec.truncated_divisor(12),
    WeightSpec.exp_log_alpha(0.5),
    WeightSpec.product(WeightSpec.divisor(), WeightSpec.lambda_omega(1.2)),
]


@pytest.mark.parametrize("spec", SUBMULT_FAMILIES, ids=lambda s: s.text())
def test_submultiplicative_witness_free(spec, table_10k):
    rep = check_condition(spec, "submultiplicative", 2000, table_10k)
    assert rep.holds
    assert rep.witnesses == ()
    assert rep.fitted_constants["C_min"] <= 1.0 + 1e-9


def test_submultiplicative_violation_detected(table_100):
    # d(6) = 10 > d(2) d(3) = 1: the pair (2, 3) must be the first witness.
    vals = [1.0] * 10
    vals[5] = 10.0  # d(6)
    spec = WeightSpec.custom(vals)
    rep = check_condition(spec, "submultiplicative", 10, table_100)
    assert not rep.holds
    assert rep.witnesses[0] == (2, 3)


def test_prime_step_one_weight(table_100):
    rep = check_condition(WeightSpec.one(), "prime_step", 100, table_100)
    assert rep.holds
    assert rep.fitted_constants["C"] == 1.0
    assert rep.fitted_constants["C1"] == 1.0
    assert rep.fitted_constants["lam"] == 1.0


def test_prime_step_coprime_exact_constants(table_10k):
    rep = check_condition(
        WeightSpec.coprime_indicator({1, 2}), "prime_step", 10_000, table_10k
    )
    assert rep.holds
    assert rep.fitted_constants["C"] == 1.0
    assert rep.fitted_constants["lam"] == 1.0


def test_prime_step_truncated_divisor(table_10k):
    rep = check_condition(
        WeightSpec.truncated_divisor(50), "prime_step", 10_000, table_10k
    )
    assert rep.holds
    assert rep.fitted_constants["C"] <= 2.0 + 1e-9


def test_prime_step_divisor_constants(table_100):
    rep = check_condition(WeightSpec.divisor(), "prime_step", 100, table_100)
    assert rep.holds
    assert rep.fitted_constants["C"] == pytest.approx(2.0)  # d(p)/d(1)
    assert rep.fitted_constants["C1"] == pytest.approx(2.0)  # max d(p)
    # lam = max_j ((j+1)/2)^(1/j) over p^j <= 100: the max sits at j=3
    assert rep.fitted_constants["lam"] == pytest.approx(2.0 ** (1 / 3))


def test_prime_step_geometric_cap(table_10k):
    # lambda_big_omega(1.5): d(2^j) = 1.5^j forces lam -> 1.5 > sqrt(2),
    # first breaching sqrt(2) at j = 7 (1.5^(6/7) > sqrt(2)).
    spec = WeightSpec.lambda_big_omega(1.5)
    ok = check_condition(spec, "prime_step", 64, table_10k)
    assert ok.holds  # up to 2^6 the fitted ratio is 1.5^(5/6) < sqrt(2)
    bad = check_condition(spec, "prime_step", 200, table_10k)
    assert not bad.holds
    assert ("power", 2, 7) in bad.witnesses
    assert bad.fitted_constants["lam_min"] == pytest.approx(1.5 ** (6 / 7))


def test_prime_step_rejects_lam_cap(table_100):
    with pytest.raises(InvalidArgument):
        check_condition(
            WeightSpec.one(), "prime_step", 100, table_100, {"lam": 1.5}
        )


def test_prime_power_poly_divisor_passes(table_10k):
    # d(k p^j) <= 2 d(k) j holds for the divisor function everywhere.
    rep = check_condition(WeightSpec.divisor(), "prime_power_poly", 2000, table_10k)
    assert rep.holds
    assert rep.fitted_constants["C"] == 2.0
    assert rep.fitted_constants["H"] == 1.0
    assert rep.fitted_constants["C_min"] <= 2.0


def test_prime_power_poly_lambda_fails(table_10k):
    # 1.5^j outgrows 2j starting at j = 7: witness (k=1, p=2, j=7).
    spec = WeightSpec.lambda_big_omega(1.5)
    rep = check_condition(spec, "prime_power_poly", 10_000, table_10k)
    assert not rep.holds
    assert rep.witnesses[0] == (1, 2, 7)
    below = check_condition(spec, "prime_power_poly", 100, table_10k)
    assert below.holds  # 1.5^6 = 11.39 <= 12


def test_prime_power_ratio_fit(table_100):
    rep = check_condition(
        WeightSpec.lambda_big_omega(1.5), "prime_power_ratio", 100, table_100
    )
    assert rep.holds
    assert rep.fitted_constants["lam"] == pytest.approx(1.5)
    rep = check_condition(WeightSpec.divisor(), "prime_power_ratio", 100, table_100)
    assert rep.fitted_constants["lam"] == pytest.approx(2.0)  # d(p)/d(1)


def test_prime_power_ratio_verify(table_100):
    rep = check_condition(
        WeightSpec.divisor(), "prime_power_ratio", 100, table_100, {"lam": 1.2}
    )
    assert not rep.holds
    assert rep.witnesses[0] == (2, 1)  # d(2) = 2 > 1.2 * d(1)


def test_prime_power_geom(table_100, table_10k):
    rep = check_condition(
        WeightSpec.lambda_big_omega(1.5), "prime_power_geom", 128, table_10k
    )
    assert rep.holds  # lam2 = 1.5 ** ((m-?)/m) stays below 2
    assert rep.fitted_constants["lam2_min"] < 2.0
    rep = check_condition(WeightSpec.one(), "prime_power_geom", 100, table_100)
    assert rep.holds
    assert rep.fitted_constants["lam1"] == 1.0


def test_mean_square_power(table_100):
    rep = check_condition(WeightSpec.one(), "mean_square_power", 100, table_100)
    assert rep.holds
    assert rep.fitted_constants["b"] == 0.0
    # the divisor weight needs b = log D2_tilde(2)/log 2 = 0.66 > cap at C=1
    rep = check_condition(WeightSpec.divisor(), "mean_square_power", 100, table_100)
    assert not rep.holds
    assert rep.fitted_constants["b"] > MEAN_SQUARE_EXPONENT_LIMIT
    assert rep.witnesses  # the achieving m is reported


def test_mean_square_power_coprime(table_10k):
    spec = WeightSpec.coprime_indicator({1, 2})
    rep = check_condition(spec, "mean_square_power", 10_000, table_10k)
    assert rep.holds  # D2_tilde <= 1 gives b = 0
    assert rep.fitted_constants["b"] == 0.0


def test_condition_report_invariant(table_10k):
    # holds must equal witness-freeness in every mode
    for spec in (WeightSpec.one(), WeightSpec.lambda_big_omega(1.5)):
        for cid in (
            "submultiplicative",
            "prime_step",
            "prime_power_poly",
            "prime_power_ratio",
            "prime_power_geom",
            "mean_square_power",
        ):
            rep = check_condition(spec, cid, 150, table_10k)
            assert rep.holds == (rep.witnesses == ())


def test_ratio_implies_step(table_10k):
    # a fitted one-prime-power ratio lam < sqrt(2) forces prime_step to hold
    specs = [
        WeightSpec.one(),
        WeightSpec.lambda_omega(1.3),
        WeightSpec.lambda_big_omega(1.3),
        WeightSpec.coprime_indicator({2, 3}),
        WeightSpec.truncated_divisor(20),
    ]
    for spec in specs:
        ratio = check_condition(spec, "prime_power_ratio", 2000, table_10k)
        if ratio.holds and ratio.fitted_constants["lam"] < math.sqrt(2):
            step = check_condition(spec, "prime_step", 2000, table_10k)
            assert step.holds, spec.text()


def test_poly_implies_step(table_10k):
    # polynomial prime-power growth forces prime_step over the grid
    specs = [WeightSpec.divisor(), WeightSpec.truncated_divisor(30)]
    for spec in specs:
        poly = check_condition(spec, "prime_power_poly", 2000, table_10k)
        if poly.holds:
            step = check_condition(spec, "prime_step", 2000, table_10k)
            assert step.holds, spec.text()


def test_single_prime_custom_example(table_100):
    # d(2^j) = C1 lam^j on powers of 2, d(n) = 1 elsewhere: the fitted
    # one-step constant must absorb the first jump d(2)/d(1) = C1*lam.
    C1, lam = 3.0, 1.3
    vals = []
    for n in range(1, 101):
        j = 0
        m = n
        while m % 2 == 0:
            m //= 2
            j += 1
        vals.append(C1 * lam**j if (j >= 1 and m == 1) else 1.0)
    spec = WeightSpec.custom(vals)
    sub = check_condition(spec, "submultiplicative", 100, table_100)
    assert sub.holds
    step = check_condition(spec, "prime_step", 100, table_100)
    assert step.holds
    assert step.fitted_constants["C"] >= C1 * lam - 1e-9


def test_check_all_conditions(table_100):
    reports = check_all_conditions(WeightSpec.one(), 100, table_100)
    assert set(reports) == {
        "submultiplicative",
        "prime_step",
        "prime_power_poly",
        "prime_power_ratio",
        "prime_power_geom",
        "mean_square_power",
    }
    assert all(rep.holds for rep in reports.values())


def test_unknown_condition(table_100):
    with pytest.raises(InvalidArgument):
        check_condition(WeightSpec.one(), "mystery", 100, table_100)
