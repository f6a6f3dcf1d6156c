import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kl_by_summation, scaled_renyi_by_summation
from popinfo.divergence import (
    BETA_MAX,
    DivergenceMatrix,
    bhattacharyya_matrix,
    brute_force_divergence,
    chernoff_coefficient_matrix,
    chernoff_information,
    chernoff_information_matrix,
    hellinger_sq,
    kl_matrix,
    poisson_product_pmf,
    poisson_support,
    truncated_pair_pmfs,
)
from popinfo.errors import ConfigurationError
from popinfo.stimulus import population_from_rates


def pair(a, b):
    """Two-stimulus population with rate vectors ``a`` and ``b``."""
    return population_from_rates(np.column_stack([a, b]), [0.5, 0.5])


rate_vectors = st.integers(1, 3).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0, 10) | st.just(0.0), min_size=n, max_size=n),
        st.lists(st.floats(0, 10) | st.just(0.0), min_size=n, max_size=n),
    )
)


# -- KL ---------------------------------------------------------------------


def test_kl_identical_columns_is_zero():
    assert kl_matrix(pair([1.0, 4.0], [1.0, 4.0])).values[0, 1] == 0.0


def test_kl_silent_to_active_neuron():
    D = kl_matrix(pair([0.0], [10.0])).values
    assert D[0, 1] == 10.0
    assert math.exp(-D[0, 1] / math.e) == pytest.approx(math.exp(-10 / math.e))


def test_kl_active_to_silent_neuron_is_infinite():
    D = kl_matrix(pair([10.0], [0.0])).values
    assert D[0, 1] == math.inf
    assert math.exp(-D[0, 1] / math.e) == 0.0


def test_kl_two_neuron_example():
    # frozen from the summation oracle: 2 ln(1/2) + 2 + 3 ln 3 - 2
    expected = 1.9095425048844383
    assert kl_by_summation([2, 3], [4, 1]) == pytest.approx(expected, rel=1e-12)
    assert kl_matrix(pair([2.0, 3.0], [4.0, 1.0])).values[0, 1] == pytest.approx(expected, rel=1e-13)


# -- Chernoff coefficient / Bhattacharyya ---------------------------------------


def test_bhattacharyya_example():
    assert scaled_renyi_by_summation([2], [8], 0.5) == pytest.approx(1.0, abs=1e-12)
    B = bhattacharyya_matrix(pair([2.0], [8.0]))
    assert B.values[0, 1] == pytest.approx(1.0, abs=1e-14)
    assert B.values[1, 0] == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("beta", [0.1, 0.3, 0.5, 0.9])
def test_chernoff_with_one_silent_side(beta):
    A = 7.0
    C = chernoff_coefficient_matrix(pair([0.0], [A]), beta).values
    assert C[0, 1] == pytest.approx(beta * A, rel=1e-15)
    assert C[1, 0] == pytest.approx((1 - beta) * A, rel=1e-15)
    assert scaled_renyi_by_summation([0.0], [A], beta) == pytest.approx(beta * A, rel=1e-12)


def test_chernoff_identical_is_zero():
    C = chernoff_coefficient_matrix(pair([3.0, 0.0, 1.5], [3.0, 0.0, 1.5]), 0.3)
    assert C.values[0, 1] == 0.0


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.2, 1.5])
def test_chernoff_rejects_beta_outside_open_interval(beta):
    with pytest.raises(ConfigurationError):
        chernoff_coefficient_matrix(pair([1.0], [2.0]), beta)


def test_bhattacharyya_is_symmetric(rng):
    pop = population_from_rates(rng.uniform(0, 10, size=(4, 9)) * (rng.random((4, 9)) > 0.3), np.full(9, 1 / 9))
    B = bhattacharyya_matrix(pop).values
    np.testing.assert_allclose(B, B.T, rtol=0, atol=1e-12)


def test_bhattacharyya_identical_columns_give_zero_row():
    rates = np.array([[1.0, 1.0, 4.0], [2.0, 2.0, 0.0]])
    B = bhattacharyya_matrix(population_from_rates(rates, np.full(3, 1 / 3))).values
    assert B[0, 1] == B[1, 0] == 0.0


# -- Hellinger ----------------------------------------------------------------


def test_hellinger_examples():
    assert hellinger_sq(pair([1.0, 2.0], [1.0, 2.0]), 0, 1) == 0.0
    assert hellinger_sq(pair([2.0], [8.0]), 0, 1) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert hellinger_sq(pair([60.0, 0.0], [0.0, 60.0]), 0, 1) == pytest.approx(1.0, abs=1e-25)


@given(rate_vectors)
@settings(max_examples=60, deadline=None)
def test_hellinger_in_unit_interval_and_linked_to_bhattacharyya(vectors):
    a, b = (np.array(v) for v in vectors)
    pop = pair(a, b)
    h2 = hellinger_sq(pop, 0, 1)
    assert 0.0 <= h2 <= 1.0
    bd = bhattacharyya_matrix(pop).values[0, 1]
    if h2 < 1.0:
        # h2 is stored to one ulp, so recovering bd from it is ill-conditioned
        # as h2 -> 1: the round trip is only good to about eps / (1 - h2)
        slack = 1e-12 + 4 * np.finfo(float).eps / (1.0 - h2)
        assert abs(-math.log1p(-h2) - bd) <= slack


# -- Chernoff information -------------------------------------------------------


def test_chernoff_information_symmetric_pair_peaks_at_half():
    result = chernoff_information(pair([2.0, 9.0], [9.0, 2.0]), 0, 1, tol=1e-9)
    assert abs(result.beta - 0.5) <= 1e-9
    assert result.value == pytest.approx(chernoff_coefficient_matrix(pair([2.0, 9.0], [9.0, 2.0]), 0.5).values[0, 1])
    assert not result.clamped


def test_chernoff_information_identical_is_zero():
    assert chernoff_information(pair([3.0], [3.0]), 0, 1).value == 0.0


def test_chernoff_information_disjoint_support_hits_the_clamp():
    A = 10.0
    result = chernoff_information(pair([0.0], [A]), 0, 1, tol=1e-9)
    assert result.value == pytest.approx(BETA_MAX * A, rel=1e-9)
    assert result.clamped
    assert result.beta == pytest.approx(BETA_MAX, abs=1e-9)


def test_chernoff_information_argmax_against_dense_scan():
    a, b = np.array([1.0, 6.0, 0.5]), np.array([4.0, 2.0, 3.0])
    betas = np.linspace(0.001, 0.999, 99_801)
    closed = (1 - betas)[:, None] * a + betas[:, None] * b - a ** (1 - betas[:, None]) * b ** betas[:, None]
    g = closed.sum(axis=1)
    result = chernoff_information(pair(a, b), 0, 1, tol=1e-10)
    assert abs(result.beta - betas[np.argmax(g)]) <= 2e-5
    assert result.value >= g.max() - 1e-12


@given(rate_vectors)
@settings(max_examples=60, deadline=None)
def test_chernoff_information_dominates_fixed_beta(vectors):
    a, b = (np.array(v) for v in vectors)
    pop = pair(a, b)
    tol = 1e-9
    result = chernoff_information(pop, 0, 1, tol)
    for beta in (0.1, 0.25, 0.5, 0.75, 0.9):
        assert result.value >= chernoff_coefficient_matrix(pop, beta).values[0, 1] - tol


def test_chernoff_information_matrix_matches_pairwise(rng):
    rates = rng.uniform(0, 5, size=(2, 5))
    rates[0, 1] = 0.0
    pop = population_from_rates(rates, np.full(5, 0.2))
    mat, betas = chernoff_information_matrix(pop, tol=1e-10)
    for m in range(5):
        for k in range(5):
            if m == k:
                continue
            single = chernoff_information(pop, m, k, tol=1e-10)
            assert mat.values[m, k] == pytest.approx(single.value, rel=1e-9, abs=1e-12)


# -- invariants -----------------------------------------------------------------


def random_population(rng, N, M, zero_fraction=0.25):
    rates = rng.uniform(0, 10, size=(N, M))
    rates[rng.random((N, M)) < zero_fraction] = 0.0
    return population_from_rates(rates, np.full(M, 1 / M))


def test_diagonals_vanish_and_entries_are_nonnegative(rng):
    pop = random_population(rng, 5, 12)
    for mat in (kl_matrix(pop), bhattacharyya_matrix(pop), chernoff_coefficient_matrix(pop, 0.2)):
        assert np.all(np.diag(mat.values) == 0.0)
        assert np.all(mat.values >= 0.0)


def test_renyi_scaled_by_beta_never_exceeds_kl(rng):
    for _ in range(30):
        pop = random_population(rng, int(rng.integers(1, 4)), 6)
        D = kl_matrix(pop).values
        for beta in (0.05, 0.2, 0.5, 0.8, 0.95):
            C = chernoff_coefficient_matrix(pop, beta).values
            finite = np.isfinite(D)
            assert np.all(C[finite] / beta <= D[finite] * (1 + 1e-12) + 1e-12)


def test_scaled_renyi_is_concave_in_beta(rng):
    pop = random_population(rng, 3, 2, zero_fraction=0.0)
    betas = np.linspace(0.01, 0.99, 99)
    g = np.array([chernoff_coefficient_matrix(pop, b).values[0, 1] for b in betas])
    assert np.all(np.diff(g, 2) <= 1e-12)


def test_small_beta_limit_recovers_kl(rng):
    for _ in range(20):
        pop = random_population(rng, 3, 2, zero_fraction=0.0)
        D = kl_matrix(pop).values[0, 1]
        beta = 1e-4
        C = chernoff_coefficient_matrix(pop, beta).values[0, 1]
        assert C / beta == pytest.approx(D, rel=1e-3)


@given(rate_vectors)
@settings(max_examples=40, deadline=None)
def test_closed_forms_agree_with_summation(vectors):
    a, b = (np.array(v) for v in vectors)
    pop = pair(a, b)
    kl = kl_by_summation(a, b)
    closed = kl_matrix(pop).values[0, 1]
    if math.isinf(kl):
        assert math.isinf(closed)
    else:
        assert closed == pytest.approx(kl, rel=1e-10, abs=1e-13)
    for beta in (0.1, 0.5, 0.9):
        ref = scaled_renyi_by_summation(a, b, beta)
        assert chernoff_coefficient_matrix(pop, beta).values[0, 1] == pytest.approx(ref, rel=1e-10, abs=1e-13)


def test_fill_is_independent_of_stimulus_order(rng):
    pop = random_population(rng, 4, 10)
    perm = rng.permutation(10)
    permuted = population_from_rates(pop.rates[:, perm], np.full(10, 0.1))
    for build in (kl_matrix, bhattacharyya_matrix):
        np.testing.assert_array_equal(build(permuted).values, build(pop).values[np.ix_(perm, perm)])


# -- brute-force oracle ---------------------------------------------------------


def test_brute_force_identical_pmfs():
    p = poisson_product_pmf([2.0, 1.0], [poisson_support(2.0), poisson_support(1.0)])
    for kind in ("kl", "bhattacharyya"):
        assert brute_force_divergence(p, p, kind) == 0.0
    assert brute_force_divergence(p, p, "chernoff", 0.3) == 0.0


def test_brute_force_poisson_kl():
    r = np.arange(41)
    from scipy import stats

    p, q = stats.poisson.pmf(r, 2.0), stats.poisson.pmf(r, 4.0)
    closed = 2 * math.log(2 / 4) + 4 - 2
    assert brute_force_divergence(p, q, "kl") == pytest.approx(closed, rel=1e-10)
    assert kl_matrix(pair([2.0], [4.0])).values[0, 1] == pytest.approx(closed, rel=1e-14)


def test_brute_force_bhattacharyya():
    p, q = truncated_pair_pmfs([2.0], [8.0])
    assert brute_force_divergence(p, q, "chernoff", 0.5) == pytest.approx(1.0, abs=1e-10)
    assert brute_force_divergence(p, q, "bhattacharyya") == pytest.approx(1.0, abs=1e-10)


def test_brute_force_rejects_mismatched_supports():
    with pytest.raises(ConfigurationError):
        brute_force_divergence(np.ones(3) / 3, np.ones(4) / 4)


def test_truncation_rule_leaves_small_tail():
    from scipy import stats

    for rate in (0.3, 2.0, 10.0, 40.0):
        r = poisson_support(rate)
        assert stats.poisson.sf(r[-1], rate) < 1e-14
        assert stats.poisson.sf(r[-1] - 1, rate) >= 1e-14


# -- CSV ------------------------------------------------------------------------


def test_csv_roundtrip_keeps_infinity():
    D = kl_matrix(pair([10.0, 1.0], [0.0, 2.0]))
    text = D.to_csv()
    assert "inf" in text
    back = DivergenceMatrix.from_csv(text, "kl")
    np.testing.assert_array_equal(back.values, D.values)


def test_non_square_matrix_is_rejected():
    with pytest.raises(ConfigurationError):
        DivergenceMatrix(np.zeros((2, 3)), "kl")


def test_kl_tiny_rate_against_silent_is_still_infinite():
    # the mass at r > 0 is ~1e-179, far below any truncation, yet it has no support under q
    assert kl_matrix(pair([1.2924132434384398e-179], [0.0])).values[0, 1] == math.inf
    assert kl_by_summation([1.2924132434384398e-179], [0.0]) == math.inf
