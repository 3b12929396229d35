import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from brokenstick.exact import (
    BetaVector,
    InvalidDomainError,
    beta_backward,
    beta_forward,
    expected_bad_subsets,
    log_of,
    prob_all_exact,
    prob_none_exact,
    prob_none_float,
    prob_not_all_exact,
    prob_random_subset,
    term_coefficients,
)


# --- independent oracles -----------------------------------------------------


def beta_by_matrix_inverse(k, n):
    """beta' = 1' A^{-1}, with A the matrix of the difference map x = A y."""
    A = sympy.zeros(n, n)
    for r in range(n):
        A[r, r] = 1
        if 0 < r < k - 1:
            A[r, r - 1] = -1
        elif r >= k - 1:
            for u in range(1, k):
                A[r, r - u] = -1
    row = sympy.ones(1, n) * A.inv()
    return tuple(int(v) for v in row)


def not_all_by_exponential_spacings(k, n):
    """P(Y_n > Y_1 + ... + Y_{k-1}) for exponential order statistics Y.

    Writing Y_r = sum_{i<=r} E_i / (n-i+1) with iid unit exponentials E_i,
    the event is sum_i a_i E_i > 0.  With distinct nonzero a_i the law of the
    sum is a signed mixture of scaled exponentials, giving
    P = sum_{a_i > 0} prod_{j != i} a_i / (a_i - a_j).
    """
    a = [Fraction(1 - max(k - i, 0), n - i + 1) for i in range(1, n + 1)]
    a = [x for x in a if x != 0]
    assert len(set(a)) == len(a)
    total = Fraction(0)
    for i, ai in enumerate(a):
        if ai > 0:
            total += math.prod((ai / (ai - aj) for j, aj in enumerate(a) if j != i), start=Fraction(1))
    return total


def pairs(n_max, n_min=3):
    return [(k, n) for n in range(n_min, n_max + 1) for k in range(3, n + 1)]


# --- beta weights ------------------------------------------------------------


@pytest.mark.parametrize(
    "k, n, betas",
    [(3, 3, (4, 2, 1)), (3, 4, (7, 4, 2, 1)), (4, 4, (6, 4, 2, 1))],
)
def test_beta_examples(k, n, betas):
    assert beta_forward(k, n).betas == betas
    assert beta_backward(k, n).betas == betas


@pytest.mark.parametrize("k, n", pairs(9))
def test_beta_matches_matrix_inverse(k, n):
    assert beta_backward(k, n).betas == beta_by_matrix_inverse(k, n)


def test_beta_forward_equals_backward_up_to_100():
    for k, n in pairs(100):
        assert beta_forward(k, n) == beta_backward(k, n), (k, n)


@given(st.integers(3, 120).flatmap(lambda n: st.tuples(st.integers(3, n), st.just(n))))
def test_beta_invariants(kn):
    k, n = kn
    b = beta_backward(k, n)
    assert b[n] == 1
    assert all(x > y for x, y in zip(b.betas, b.betas[1:]))
    assert b[n + 1] == 0


def test_beta_vector_length_checked():
    with pytest.raises(ValueError):
        BetaVector(3, 4, (1, 2, 3))


@pytest.mark.parametrize("fn", [beta_forward, beta_backward, prob_none_exact, prob_not_all_exact,
                                prob_all_exact, prob_random_subset, expected_bad_subsets, prob_none_float])
@pytest.mark.parametrize("k, n", [(2, 5), (4, 3), (0, 0), (-3, 4)])
def test_domain_rejected(fn, k, n):
    with pytest.raises(InvalidDomainError):
        fn(k, n)


# --- problem I ---------------------------------------------------------------


@pytest.mark.parametrize("k, n, want", [(3, 3, Fraction(3, 4)), (5, 5, Fraction(5, 16)), (3, 4, Fraction(3, 7))])
def test_prob_none_examples(k, n, want):
    assert prob_none_exact(k, n) == want


def test_prob_none_is_reduced_fraction():
    p = prob_none_exact(4, 10)
    assert math.gcd(p.numerator, p.denominator) == 1 and p.denominator > 0


def test_prob_none_float_small():
    p, log_p = prob_none_float(3, 3)
    assert p == pytest.approx(0.75, rel=1e-15)
    assert log_p == pytest.approx(math.log(0.75), rel=1e-12)
    assert round(log_p, 5) == -0.28768


def test_prob_none_float_large_instance():
    # n = 200 pieces, k = 196
    p, log_p = prob_none_float(196, 200)
    exact = prob_none_exact(196, 200)
    assert math.isfinite(log_p)
    assert abs(log_p - log_of(exact)) <= 1e-9 * abs(log_of(exact))


def test_prob_none_float_underflow_keeps_log():
    p, log_p = prob_none_float(3, 300)
    assert p == 0.0
    exact_log = log_of(prob_none_exact(3, 300))
    assert abs(log_p - exact_log) <= 1e-9 * abs(exact_log)


@given(st.integers(3, 300).flatmap(lambda n: st.tuples(st.integers(3, n), st.just(n))))
@settings(max_examples=60)
def test_prob_none_float_agrees_with_exact(kn):
    k, n = kn
    p, log_p = prob_none_float(k, n)
    exact = prob_none_exact(k, n)
    exact_log = log_of(exact)
    if float(exact) > 1e-300:
        assert abs(p - float(exact)) <= 1e-9 * float(exact)
    assert abs(log_p - exact_log) <= 1e-9 * max(abs(exact_log), 1.0)


# --- problem II --------------------------------------------------------------


def test_term_coefficients_invariants():
    for k, n in pairs(15):
        tc = term_coefficients(k, n)
        for j in range(n - k + 1):
            assert tc.c[(k - 1, j)] == n - k + 2
        assert all(v > 0 for v in tc.c.values())
        assert all(v > 0 for v in tc.lam.values())
        for j in range(2, n - k + 3):
            lhs = math.prod((tc.lam[(r, j)] for r in range(k - 2)), start=Fraction(1))
            rhs = Fraction(math.prod(tc.c[(r, j - 2)] for r in range(1, k - 1)), j ** (k - 2))
            assert lhs == rhs


def test_term_coefficients_lambda_product_at_one():
    for k, n in pairs(12):
        tc = term_coefficients(k, n)
        prod = math.prod((tc.lam[(r, 1)] for r in range(k - 2)), start=Fraction(1))
        assert prod == Fraction(math.factorial(n), math.factorial(n - k + 2))


@pytest.mark.parametrize("k, n, want", [(3, 3, Fraction(3, 4)), (6, 6, Fraction(3, 16)), (3, 4, Fraction(14, 15))])
def test_prob_not_all_examples(k, n, want):
    assert prob_not_all_exact(k, n) == want


@pytest.mark.parametrize("k, n", pairs(14))
def test_prob_not_all_matches_spacings_oracle(k, n):
    assert prob_not_all_exact(k, n) == not_all_by_exponential_spacings(k, n)


@pytest.mark.parametrize("k, n, want", [(3, 3, Fraction(1, 4)), (3, 4, Fraction(1, 15))])
def test_prob_all_examples(k, n, want):
    assert prob_all_exact(k, n) == want


def test_complement_identity_up_to_30():
    for k, n in pairs(30):
        assert prob_all_exact(k, n) + prob_not_all_exact(k, n) == 1, (k, n)


def test_none_bounded_by_not_all():
    for k, n in pairs(30):
        assert prob_none_exact(k, n) <= prob_not_all_exact(k, n), (k, n)


def test_diagonal_closed_form():
    for n in range(3, 26):
        want = Fraction(n, 2 ** (n - 1))
        assert prob_none_exact(n, n) == want
        assert prob_not_all_exact(n, n) == want


# --- problem III -------------------------------------------------------------


@pytest.mark.parametrize("k, n, want", [(3, 10, Fraction(3, 4)), (4, 100, Fraction(1, 2)), (5, 5, Fraction(5, 16))])
def test_prob_random_subset_examples(k, n, want):
    assert prob_random_subset(k, n) == want


def test_prob_random_subset_independent_of_n():
    for k in range(3, 12):
        values = {prob_random_subset(k, n) for n in range(k, 31)}
        assert values == {not_all_by_exponential_spacings(k, k)}


@pytest.mark.parametrize("k, n, want", [(3, 4, Fraction(3)), (3, 3, Fraction(3, 4)), (4, 6, Fraction(15, 2))])
def test_expected_bad_examples(k, n, want):
    assert expected_bad_subsets(k, n) == want


def test_values_in_range():
    for k, n in pairs(20):
        for fn in (prob_none_exact, prob_not_all_exact, prob_all_exact, prob_random_subset):
            assert 0 <= fn(k, n) <= 1
        assert 0 <= expected_bad_subsets(k, n) <= math.comb(n, k)
