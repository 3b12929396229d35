"""Exact probabilities for the broken-stick k-gon problems.

Every probability is returned as a reduced :class:`fractions.Fraction`.
Three quantities are computed here:

* ``prob_none_exact``: no k of the n pieces form a k-gon,
  ``n! / prod(beta)`` with the integer weights ``beta`` from a linear
  recursion over order-statistic differences.
* ``prob_not_all_exact`` / ``prob_all_exact``: at least one k-subset fails
  to form a k-gon, and its complement, each by its own alternating sum.
* ``prob_random_subset`` / ``expected_bad_subsets``: a uniformly chosen
  k-subset fails, which does not depend on n.

Indices in public docs and reports are 1-based (``beta_1 .. beta_n``);
storage is 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

ExactRational = Fraction


class InvalidDomainError(ValueError):
    """Raised when (k, n) falls outside 3 <= k <= n."""


def check_domain(k: int, n: int) -> None:
    if not (isinstance(k, int) and isinstance(n, int)):
        raise InvalidDomainError(f"k and n must be integers, got k={k!r}, n={n!r}")
    if k < 3:
        raise InvalidDomainError(f"k must be at least 3, got k={k}")
    if k > n:
        raise InvalidDomainError(f"k must not exceed n, got k={k}, n={n}")


@dataclass(frozen=True)
class BetaVector:
    """The weights beta_1..beta_n; ``betas[r - 1]`` holds beta_r."""

    k: int
    n: int
    betas: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.betas) != self.n:
            raise ValueError(f"expected {self.n} betas, got {len(self.betas)}")

    def __getitem__(self, r: int) -> int:
        """1-based access, ``bv[r] == beta_r``; indices above n read as 0."""
        if r < 1:
            raise IndexError(r)
        return self.betas[r - 1] if r <= self.n else 0


def beta_forward(k: int, n: int) -> BetaVector:
    """Sum the recursion vectors b_1..b_n.

    b_1 = e_1, b_r = e_r + b_{r-1} for r < k, and
    b_r = e_r + b_{r-1} + ... + b_{r-k+1} for r >= k.  The last sum is kept
    as a running window so each step costs O(n) integer additions.
    """
    check_domain(k, n)
    total = [0] * n
    history: list[list[int]] = []
    window = [0] * n  # sum of the last k-1 vectors b
    for r in range(n):
        if r == 0:
            b = [0] * n
        elif r < k - 1:
            b = list(history[-1])
        else:
            b = list(window)
        b[r] += 1
        history.append(b)
        for i in range(r + 1):
            total[i] += b[i]
            window[i] += b[i]
        if len(history) > k - 1:
            old = history[-k]
            for i in range(r + 1):
                window[i] -= old[i]
    return BetaVector(k, n, tuple(total))


def beta_backward(k: int, n: int) -> BetaVector:
    """Right-to-left recursion for the same weights.

    beta_n = 1;  beta_j = 1 + beta_{j+1} + ... + beta_{j+k-1} for
    j = n-1 .. k-2;  beta_j = 1 + beta_{j+1} + beta_k + ... + beta_{j+k-1}
    for j = k-3 .. 1.  Indices above n read as 0.
    """
    check_domain(k, n)
    beta = [0] * (n + k)  # 1-based, zero padded past n
    beta[n] = 1
    window = 1  # beta_{j+1} + ... + beta_{j+k-1} for the next j
    for j in range(n - 1, k - 3, -1):
        beta[j] = 1 + window
        window += beta[j] - beta[j + k - 1]
    if k >= 4:
        tail = sum(beta[k : 2 * k - 3])  # beta_k + ... + beta_{2k-4}, j = k-3
        for j in range(k - 3, 0, -1):
            beta[j] = 1 + beta[j + 1] + tail
            tail -= beta[j + k - 1]
    return BetaVector(k, n, tuple(beta[1 : n + 1]))


def prob_none_exact(k: int, n: int) -> Fraction:
    """Probability that no choice of k pieces out of n forms a k-gon."""
    bv = beta_backward(k, n)
    return Fraction(math.factorial(n), math.prod(bv.betas))


def prob_none_float(k: int, n: int) -> tuple[float, float]:
    """Float evaluation of :func:`prob_none_exact` as ``(prob, log_prob)``.

    Accumulates ``sum(log(n - r + 1) - log(beta_r))`` so neither ``n!`` nor
    ``prod(beta)`` is ever formed.  ``prob`` may underflow to 0.0 for large
    n; ``log_prob`` stays finite.
    """
    bv = beta_backward(k, n)
    terms = [math.log(n - r) - math.log(b) for r, b in enumerate(bv.betas)]
    log_prob = math.fsum(terms)
    return math.exp(log_prob), log_prob


def log_of(value: Fraction) -> float:
    """Natural log of a positive rational without converting it to float."""
    if value <= 0:
        raise ValueError("log of non-positive value")
    return math.log(value.numerator) - math.log(value.denominator)


@dataclass(frozen=True)
class TermCoefficients:
    """Coefficients of the two alternating sums for problem II.

    ``c[(r, j)] = (j + 2)(k - 1 - r) + n - k + 2`` for r = 1..k-1,
    j = 0..n-k, and ``lam[(r, j)] = r + 1 + (n - k + 2) / j`` for
    r = 0..k-3, j = 1..n-k+2.  Keys use 1-based r and j as in the formulas above.
    """

    k: int
    n: int
    c: dict[tuple[int, int], int]
    lam: dict[tuple[int, int], Fraction]


def term_coefficients(k: int, n: int) -> TermCoefficients:
    check_domain(k, n)
    m = n - k + 2
    c = {
        (r, j): (j + 2) * (k - 1 - r) + m
        for r in range(1, k)
        for j in range(0, n - k + 1)
    }
    lam = {
        (r, j): r + 1 + Fraction(m, j)
        for r in range(0, k - 2)
        for j in range(1, m + 1)
    }
    return TermCoefficients(k, n, c, lam)


def prob_not_all_exact(k: int, n: int) -> Fraction:
    """Probability that at least one k-subset fails to form a k-gon.

    ``n!/(n-k+2)! * sum_j (-1)^j C(n-k+1, j+1) / prod_{r=1}^{k-2} c_rj``
    over j = 0..n-k, summed exactly.
    """
    tc = term_coefficients(k, n)
    total = Fraction(0)
    for j in range(n - k + 1):
        denom = math.prod(tc.c[(r, j)] for r in range(1, k - 1))
        term = Fraction(math.comb(n - k + 1, j + 1), denom)
        total += -term if j % 2 else term
    return Fraction(math.factorial(n), math.factorial(n - k + 2)) * total


def prob_all_exact(k: int, n: int) -> Fraction:
    """Probability that every k-subset forms a k-gon.

    Evaluated from its own alternating sum over j = 1..n-k+2 with the
    rational factors ``lam``; equals ``1 - prob_not_all_exact(k, n)``.
    """
    tc = term_coefficients(k, n)
    m = n - k + 2
    total = Fraction(0)
    for j in range(1, m + 1):
        lam_prod = math.prod((tc.lam[(r, j)] for r in range(k - 2)), start=Fraction(1))
        term = Fraction(math.comb(m, j), j ** (k - 3)) / lam_prod
        total += term if j % 2 else -term
    return Fraction(math.factorial(n), math.factorial(m) * m) * total


def prob_random_subset(k: int, n: int) -> Fraction:
    """Probability that a uniformly random k-subset fails to form a k-gon.

    Independent of n: it is the k-piece value of :func:`prob_none_exact`,
    which is cross-checked against ``k / 2**(k-1)``.
    """
    check_domain(k, n)
    value = prob_none_exact(k, k)
    closed = Fraction(k, 2 ** (k - 1))
    if value != closed:
        raise ArithmeticError(f"P({k},{k}) = {value} disagrees with k/2^(k-1) = {closed}")
    return value


def expected_bad_subsets(k: int, n: int) -> Fraction:
    """Expected number of k-subsets that fail to form a k-gon: C(n,k) k / 2^(k-1)."""
    check_domain(k, n)
    return Fraction(math.comb(n, k) * k, 2 ** (k - 1))


PROBLEMS = {
    "none": prob_none_exact,
    "not_all": prob_not_all_exact,
    "all": prob_all_exact,
    "random_subset": prob_random_subset,
    "expected_bad": expected_bad_subsets,
}
