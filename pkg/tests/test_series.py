"""Partial-sum series against exact rational brute-force enumerations.

Every evaluator is checked from scratch here: terms are rebuilt with trial
division and Fraction arithmetic, summed naively, and compared with the
chunked float engine at tolerance 1e-12 (the float engine itself carries
sub-ulp error per chunk, the slack covers term rounding).
"""

from fractions import Fraction
from math import gcd

import pytest

from csumlab import (
    PrimeWeight,
    SeriesSpec,
    alladi_partial_sum,
    difference_term,
    lpf_density,
    mertens_restricted,
    mu_baseline,
    mu_mn_partial_sum,
    mu_over_n_restricted,
    ramanujan_alladi_partial_sum,
    run_series,
    weighted_lhs,
)

from conftest import csum_totient, lpf_naive, mu_naive, spf_naive

EPS = 1e-12


def frac_rows(series):
    return [(r.x, r.value) for r in series.rows]


# --- brute-force term builders ----------------------------------------------


def brute_sum(x, term):
    total = Fraction(0)
    for n in range(2, x + 1):
        total += term(n)
    return total


def weight_naive(w: PrimeWeight, p: int) -> Fraction:
    if w.kind == "one":
        return Fraction(1)
    if w.kind == "residue":
        return Fraction(1) if p % w.k == w.l % w.k else Fraction(0)
    for q, v in w.table:
        if q == p:
            return Fraction(v)
    return Fraction(0)


# --- mu-baseline ------------------------------------------------------------


def test_mu_baseline_hand_values(table_small):
    s = mu_baseline(table_small, [2, 4])
    assert s.rows[0].value == 0.5
    assert abs(s.rows[1].value - (0.5 + Fraction(1, 3))) < EPS
    assert s.spec.target == 1.0


def test_mu_baseline_bruteforce(table_small):
    s = mu_baseline(table_small, [317])
    expected = brute_sum(317, lambda n: Fraction(-mu_naive(n), n))
    assert abs(s.rows[0].value - expected) < EPS


# --- alladi -----------------------------------------------------------------

ALLADI_CASES = [(3, 1), (3, 2), (4, 1), (4, 3), (5, 2)]


@pytest.mark.parametrize("k,l", ALLADI_CASES)
def test_alladi_bruteforce(table_small, k, l):
    s = alladi_partial_sum(table_small, k, l, [251])

    def term(n):
        if spf_naive(n) % k != l % k:
            return Fraction(0)
        return Fraction(-mu_naive(n), n)

    assert abs(s.rows[0].value - brute_sum(251, term)) < EPS
    assert s.rows[0].error == abs(s.rows[0].value - s.spec.target)


def test_alladi_frozen_small_case(table_small):
    # k=4, l=1, x=10: only n=5 contributes (p=5, mu=-1), value 1/5
    s = alladi_partial_sum(table_small, 4, 1, [10])
    assert s.rows[0].value == 0.2


def test_alladi_modulus_one_equals_baseline(table_small):
    cps = [100, 1000, 9973]
    assert frac_rows(alladi_partial_sum(table_small, 1, 1, cps)) == frac_rows(
        mu_baseline(table_small, cps)
    )


def test_alladi_rejects_bad_residue(table_small):
    with pytest.raises(ValueError):
        alladi_partial_sum(table_small, 4, 2, [100])


# --- ramanujan-alladi -------------------------------------------------------


def test_ramanujan_alladi_frozen_small_case(table_small):
    # m=2, k=3, l=2 at x=20, enumerated exactly over qualifying n
    s = ramanujan_alladi_partial_sum(table_small, 2, 3, 2, [20])
    expected = brute_sum(
        20,
        lambda n: Fraction(-csum_totient(n, 2), n)
        if spf_naive(n) % 3 == 2
        else Fraction(0),
    )
    assert abs(s.rows[0].value - expected) < EPS


@pytest.mark.parametrize("m", [1, 2, 6, 12])
@pytest.mark.parametrize("k,l", [(3, 1), (4, 3)])
def test_ramanujan_alladi_bruteforce(table_small, m, k, l):
    s = ramanujan_alladi_partial_sum(table_small, m, k, l, [300])

    def term(n):
        if spf_naive(n) % k != l % k:
            return Fraction(0)
        return Fraction(-csum_totient(n, m), n)

    assert abs(s.rows[0].value - brute_sum(300, term)) < EPS


def test_specialization_chain_bit_identical(table_mid):
    cps = [10**3, 10**4, 10**5]
    a = alladi_partial_sum(table_mid, 4, 1, cps)
    ra = ramanujan_alladi_partial_sum(table_mid, 1, 4, 1, cps)
    wl = weighted_lhs(table_mid, 1, PrimeWeight.residue_class(4, 1), cps)
    assert frac_rows(a) == frac_rows(ra) == frac_rows(wl)


def test_weighted_constant_one_is_baseline(table_small):
    cps = [50, 500, 5000]
    assert frac_rows(weighted_lhs(table_small, 1, PrimeWeight.constant_one(), cps)) == (
        frac_rows(mu_baseline(table_small, cps))
    )


# --- mu(mn) variant ---------------------------------------------------------


def mu_product_naive(m, n):
    return mu_naive(m * n)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 10])
def test_mu_mn_bruteforce(table_small, m):
    k, l = 3, 1
    s = mu_mn_partial_sum(table_small, m, k, l, [200])

    def term(n):
        if spf_naive(n) % k != l % k:
            return Fraction(0)
        return Fraction(-mu_product_naive(m, n), n)

    assert abs(s.rows[0].value - brute_sum(200, term)) < EPS
    assert s.spec.target == mu_naive(m) / (k - 1)


def test_mu_mn_squarefull_m_identically_zero(table_small):
    s = mu_mn_partial_sum(table_small, 4, 3, 1, [10, 100, 1000, 10**4])
    assert all(r.value == 0.0 for r in s.rows)
    assert s.spec.target == 0.0


def test_mu_mn_m_one_equals_alladi(table_small):
    cps = [100, 5000]
    assert frac_rows(mu_mn_partial_sum(table_small, 1, 4, 3, cps)) == frac_rows(
        alladi_partial_sum(table_small, 4, 3, cps)
    )


# --- restricted sums --------------------------------------------------------


def test_mertens_restricted_hand_case(table_small):
    # x=10, y=2: qualifying n are 1,3,5,7,9 with mu 1,-1,-1,-1,0
    s = mertens_restricted(table_small, 2, [10])
    assert s.rows[0].value == -2.0


def test_mertens_restricted_bruteforce(table_small):
    for y in (1, 2, 3, 7):
        s = mertens_restricted(table_small, y, [500])
        expected = 1 + sum(
            mu_naive(n) for n in range(2, 501) if spf_naive(n) > y
        )
        assert s.rows[0].value == float(expected), y


def test_mertens_sentinel_when_threshold_covers_range(table_small):
    for x in (1, 10, 1000):
        s = mertens_restricted(table_small, max(x, 5000), [x])
        assert s.rows[0].value == 1.0, x


def test_mu_over_n_restricted_hand_case(table_small):
    # x=10, y=2: 1 - 1/3 - 1/5 - 1/7 = 34/105
    s = mu_over_n_restricted(table_small, 2, [10])
    assert abs(s.rows[0].value - Fraction(34, 105)) < EPS


def test_mu_over_n_restricted_bruteforce(table_small):
    for y in (2, 5):
        s = mu_over_n_restricted(table_small, y, [400])
        expected = Fraction(1) + brute_sum(
            400,
            lambda n: Fraction(mu_naive(n), n) if spf_naive(n) > y else Fraction(0),
        )
        assert abs(s.rows[0].value - expected) < EPS, y


def test_mu_over_n_restricted_trivial_endpoint(table_small):
    s = mu_over_n_restricted(table_small, 3, [1])
    assert s.rows[0].value == 1.0
    assert s.spec.target == 0.0


def test_restricted_threshold_validation(table_small):
    with pytest.raises(ValueError):
        mertens_restricted(table_small, 0, [10])
    with pytest.raises(ValueError):
        mu_over_n_restricted(table_small, -1, [10])


# --- weighted lhs with explicit table ---------------------------------------


def test_weighted_lhs_table_weight_bruteforce(table_small):
    w = PrimeWeight.from_table({2: 0.5, 3: -0.25})
    s = weighted_lhs(table_small, 2, w, [30])

    def term(n):
        f = weight_naive(w, spf_naive(n))
        if f == 0:
            return Fraction(0)
        return -Fraction(csum_totient(n, 2)) * f / n

    assert abs(s.rows[0].value - brute_sum(30, term)) < EPS
    assert s.rows[0].error is None


def test_weighted_lhs_accepts_explicit_target(table_small):
    s = weighted_lhs(
        table_small, 1, PrimeWeight.residue_class(3, 2), [100], target=0.5
    )
    assert s.rows[0].error == abs(s.rows[0].value - 0.5)


# --- largest-prime-factor density -------------------------------------------


def test_lpf_density_bruteforce_count(table_small):
    s = lpf_density(table_small, PrimeWeight.residue_class(4, 3), [100])
    expected = sum(1 for n in range(2, 101) if lpf_naive(n) % 4 == 3)
    assert s.rows[0].count == expected
    assert s.rows[0].value == expected / 100


def test_lpf_density_constant_one_ratio(table_small):
    s = lpf_density(table_small, PrimeWeight.constant_one(), [10, 1000])
    assert s.rows[0].value == 9 / 10
    assert s.rows[1].value == 999 / 1000
    assert s.rows[0].count == 9


def test_lpf_density_table_weight(table_small):
    w = PrimeWeight.from_table({3: 2.0, 7: -1.0})
    s = lpf_density(table_small, w, [50])
    expected = sum(
        weight_naive(w, lpf_naive(n)) for n in range(2, 51)
    ) / Fraction(50)
    assert abs(s.rows[0].value - expected) < EPS
    assert s.rows[0].count is None


# --- rearrangement identity -------------------------------------------------

IDENTITY_WEIGHTS = [
    PrimeWeight.constant_one(),
    PrimeWeight.residue_class(3, 1),
    PrimeWeight.from_table({2: 0.5, 3: -0.25, 7: 1.0}),
]


def test_difference_term_trivial_m_one(table_small):
    lhs, rhs = difference_term(table_small, 1, PrimeWeight.constant_one(), 1000)
    assert lhs == 0.0 and rhs == 0.0


def test_difference_term_hand_case(table_small):
    # m=2, f=1, x=10: both sides equal sum of mu(n)/n for n <= 5 = -1/30
    lhs, rhs = difference_term(table_small, 2, PrimeWeight.constant_one(), 10)
    assert abs(lhs - Fraction(-1, 30)) < EPS
    assert abs(rhs - Fraction(-1, 30)) < EPS
    lhs_e, rhs_e = difference_term(
        table_small, 2, PrimeWeight.constant_one(), 10, exact=True
    )
    assert lhs_e == rhs_e == Fraction(-1, 30)


def test_difference_term_lhs_matches_definition(table_small):
    w = PrimeWeight.from_table({2: 0.5, 3: -0.25, 7: 1.0})
    for m in (2, 6):
        lhs, _ = difference_term(table_small, m, w, 200)
        expected = brute_sum(
            200,
            lambda n: (Fraction(csum_totient(n, m) - mu_naive(n), n))
            * weight_naive(w, spf_naive(n)),
        )
        assert abs(lhs - expected) < EPS, m


def test_difference_term_rhs_matches_definition(table_small):
    w = PrimeWeight.residue_class(3, 1)
    m = 12
    _, rhs = difference_term(table_small, m, w, 150)
    expected = Fraction(0)
    for d in range(2, m + 1):
        if m % d:
            continue
        for n in range(1, 150 // d + 1):
            expected += Fraction(mu_naive(n), n) * weight_naive(w, spf_naive(d * n))
    assert abs(rhs - expected) < EPS


@pytest.mark.parametrize("m", [2, 3, 4, 6, 12, 30])
@pytest.mark.parametrize("weight", IDENTITY_WEIGHTS)
def test_difference_identity_float_and_exact(table_small, m, weight):
    for x in (100, 1000):
        lhs, rhs = difference_term(table_small, m, weight, x)
        assert abs(lhs - rhs) < 1e-9, (m, x)
        lhs_e, rhs_e = difference_term(table_small, m, weight, x, exact=True)
        assert lhs_e == rhs_e, (m, x)
        # the float route lands on the exact value too
        assert abs(lhs - lhs_e) < EPS


def test_weighted_sum_tracks_lpf_density(table_big):
    # the negated c_n(m) f(p(n))/n sum and the f(P(n)) density head for the
    # same limit; at 10^7 the two routes sit within 0.1 of each other
    x_max = 10**7
    for k, l in ((3, 1), (3, 2), (4, 1), (4, 3)):
        w = PrimeWeight.residue_class(k, l)
        density = lpf_density(table_big, w, [x_max]).rows[0].value
        for m in (1, 2, 6):
            lhs = weighted_lhs(table_big, m, w, [x_max]).rows[0].value
            assert abs(lhs - density) < 0.1, (k, l, m)


# --- engine determinism and plumbing ----------------------------------------


def test_worker_count_never_changes_rows(table_mid):
    cps = [999, 12345, 10**5]
    for workers in (2, 3, 8, "auto"):
        base = ramanujan_alladi_partial_sum(table_mid, 2, 4, 1, cps, workers=1)
        multi = ramanujan_alladi_partial_sum(table_mid, 2, 4, 1, cps, workers=workers)
        assert frac_rows(base) == frac_rows(multi), workers


def test_checkpoint_prefix_consistency(table_small):
    # evaluating at [a, b, c] must agree with three standalone runs
    joint = mu_baseline(table_small, [37, 503, 9001])
    for row in joint.rows:
        alone = mu_baseline(table_small, [row.x])
        assert alone.rows[0].value == row.value, row.x


def test_run_series_dispatch_matches_direct_calls(table_small):
    spec = SeriesSpec(kind="alladi", k=4, l=3, checkpoints=(100, 1000), target=0.5)
    via_dispatch = run_series(table_small, spec)
    direct = alladi_partial_sum(table_small, 4, 3, [100, 1000])
    assert frac_rows(via_dispatch) == frac_rows(direct)
    with pytest.raises(ValueError):
        run_series(table_small, SeriesSpec(kind="difference-term", checkpoints=(10,)))


def test_spec_validation():
    with pytest.raises(ValueError):
        SeriesSpec(kind="nope", checkpoints=(10,))
    with pytest.raises(ValueError):
        SeriesSpec(kind="alladi", k=4, l=2, checkpoints=(10,))
    with pytest.raises(ValueError):
        SeriesSpec(kind="mu-baseline", checkpoints=(10, 10))
    with pytest.raises(ValueError):
        SeriesSpec(kind="mu-baseline", checkpoints=(100, 10))


def test_checkpoint_beyond_limit_rejected(table_small):
    with pytest.raises(ValueError):
        mu_baseline(table_small, [10**4 + 1])


def test_prime_weight_validation():
    with pytest.raises(ValueError):
        PrimeWeight(kind="???")
    with pytest.raises(ValueError):
        PrimeWeight.residue_class(4, 2)
    w = PrimeWeight.residue_class(4, 1)
    assert w.value_at(5) == 1.0
    assert w.value_at(7) == 0.0
    assert w.bound >= 1.0
    wt = PrimeWeight.from_table({2: -3.5})
    assert wt.value_at(2) == -3.5
    assert wt.value_at(11) == 0.0
    assert wt.bound == 3.5
