"""Generalized-Fibonacci sequence system and its agreement with the beta weights.

The no-k-gon probability has a second closed form,

    n! / (prod_{j=k-2}^{n} f(j) * prod_{j=2}^{k-2} h(j)),

where F is an order-(k-1) Fibonacci recurrence seeded with a single one,
f its partial sums and g, h further partial sums.  The beta weights,
re-indexed as xi_j = beta_{n+k-2-j} and mu_j = beta_{k-1-j}, reproduce f
and h term by term.  This module builds both families independently and
reports every identity that links them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import BetaVector, beta_backward, beta_forward, check_domain, prob_none_exact


@dataclass(frozen=True)
class ReconcileSequences:
    """All sequences for one (k, n).

    ``F``, ``f`` and ``xi`` are tuples indexed 0..n.  ``g``, ``h`` and ``mu``
    are dicts keyed by their 1-based index 2..k-2 and are empty for k = 3.
    """

    k: int
    n: int
    F: tuple[int, ...]
    f: tuple[int, ...]
    g: dict[int, int]
    h: dict[int, int]
    xi: tuple[int, ...]
    mu: dict[int, int]


def fibonacci_sequence(k: int, n: int) -> list[int]:
    """F_0..F_n: zeros up to k-3, F_{k-2} = 1, then each term the sum of the previous k-1."""
    F = [0] * (n + 1)
    F[k - 2] = 1
    window = 1
    for u in range(k - 1, n + 1):
        F[u] = window
        window += F[u] - F[u - k + 1]
    return F


def build_sequences(k: int, n: int, beta: BetaVector | None = None) -> ReconcileSequences:
    """Build F, f, g, h from their definitions and xi, mu from the beta weights.

    ``beta`` overrides the weights (defaults to :func:`beta_backward`); used
    to inject faults.
    """
    check_domain(k, n)
    if beta is None:
        beta = beta_backward(k, n)
    F = fibonacci_sequence(k, n)
    f = [0] * (n + 1)
    running = 0
    for j in range(k - 2, n + 1):
        running += F[j]
        f[j] = running
    g = {u: 1 + sum(f[n - r] for r in range(2, u + 1)) for u in range(2, k - 1)}
    h = {j: f[n] + sum(g[k - r] for r in range(2, j + 1)) for j in range(2, k - 1)}
    xi = tuple(beta[n + k - 2 - j] for j in range(n + 1))
    mu = {j: beta[k - 1 - j] for j in range(2, k - 1)}
    return ReconcileSequences(k, n, tuple(F), tuple(f), g, h, xi, mu)


@dataclass
class IdentityCheck:
    name: str
    checked: int = 0
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    def expect(self, lhs: object, rhs: object, where: str) -> None:
        self.checked += 1
        if lhs != rhs and self.first_failure is None:
            self.first_failure = f"{where}: {lhs} != {rhs}"


@dataclass
class Report:
    k: int
    n: int
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    @property
    def total_checked(self) -> int:
        return sum(c.checked for c in self.checks)

    def first_failure(self) -> str | None:
        for c in self.checks:
            if not c.passed:
                return f"{c.name} (k={self.k}, n={self.n}) {c.first_failure}"
        return None


def check_simplified_recursions(seqs: ReconcileSequences) -> Report:
    """Check that f and h also obey the shorter recursions that skip F and g.

    f(j) = 1 + f(j-1) + ... + f(j-k+1) for j = k-1..n, with f zero below
    k-2 and f(k-2) = 1;  h(2) = 1 + f(n) + sum_{r=2}^{k-2} f(n-r) and
    h(j) = 1 + h(j-1) + sum_{r=2}^{k-j} f(n-r) for j = 3..k-2.
    """
    k, n, f, h = seqs.k, seqs.n, seqs.f, seqs.h
    rf = IdentityCheck("f simplified recursion")
    for j in range(k - 2):
        rf.expect(f[j], 0, f"f({j})")
    rf.expect(f[k - 2], 1, f"f({k - 2})")
    for j in range(k - 1, n + 1):
        rf.expect(f[j], 1 + sum(f[j - r] for r in range(1, k)), f"f({j})")
    rh = IdentityCheck("h simplified recursion")
    for j in range(2, k - 1):
        prev = f[n] if j == 2 else h[j - 1]
        rh.expect(h[j], 1 + prev + sum(f[n - r] for r in range(2, k - j + 1)), f"h({j})")
    return Report(k, n, [rf, rh])


def prob_none_verreault(k: int, n: int) -> Fraction:
    """No-k-gon probability from the f, h sequence system."""
    s = build_sequences(k, n)
    denom = math.prod(s.f[j] for j in range(k - 2, n + 1)) * math.prod(s.h.values())
    return Fraction(math.factorial(n), denom)


def reconcile_report(k: int, n: int, beta: BetaVector | None = None) -> Report:
    """Exact element-wise comparison of the two sequence families for (k, n)."""
    s = build_sequences(k, n, beta)
    report = Report(k, n)

    bv = beta if beta is not None else beta_backward(k, n)
    fb = IdentityCheck("beta forward = backward")
    fwd = beta_forward(k, n)
    for r in range(1, n + 1):
        fb.expect(bv[r], fwd[r], f"beta_{r}")
    report.checks.append(fb)

    xi_init = IdentityCheck("xi initial conditions")
    for j in range(k - 2):
        xi_init.expect(s.xi[j], 0, f"xi_{j}")
    xi_init.expect(s.xi[k - 2], 1, f"xi_{k - 2}")
    report.checks.append(xi_init)

    xf = IdentityCheck("xi_j = f(j)")
    for j in range(k - 2, n + 1):
        xf.expect(s.xi[j], s.f[j], f"j={j}")
    report.checks.append(xf)

    mh = IdentityCheck("mu_j = h(j)")
    for j in range(2, k - 1):
        mh.expect(s.mu[j], s.h[j], f"j={j}")
    report.checks.append(mh)

    report.checks.extend(check_simplified_recursions(s).checks)

    pv = IdentityCheck("P via f,h = P via beta")
    denom = math.prod(s.xi[j] for j in range(k - 2, n + 1)) * math.prod(s.mu.values())
    from_beta = Fraction(math.factorial(n), denom) if denom else None
    if beta is None:
        pv.expect(from_beta, prob_none_exact(k, n), "P(k,n) from xi, mu")
    pv.expect(prob_none_verreault(k, n), from_beta, "P(k,n) from f, h")
    report.checks.append(pv)
    return report
