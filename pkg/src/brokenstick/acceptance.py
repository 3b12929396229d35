"""Acceptance criteria, runnable from ``brokenstick selftest`` and pytest.

Each criterion returns a :class:`CriterionResult`; the thresholds below are
fixed and must not be tuned per run.
"""

from __future__ import annotations

import contextlib
import io
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact, reconcile
from .oracle import count_bad_subsets_batch
from .sim import (
    all_kgon_batch,
    estimate_mean_bad_subsets,
    estimate_probability,
    make_rng,
    no_kgon_batch,
    sample_uniform_batch,
)

ACCEPTANCE_SEED = 20240611
MC_TRIALS = 10**6
MC_SIGMAS = 4.0
MC_GRID = ((3, 3), (3, 4), (3, 7), (4, 6), (5, 5), (4, 9))
MC_EVENTS = {
    "none": exact.prob_none_exact,
    "not_all": exact.prob_not_all_exact,
    "random_subset": exact.prob_random_subset,
}
H_TRIALS = 10**5
ORACLE_SAMPLES = 10**4
ORACLE_N_MAX = 12
FLOAT_REL_TOL = 1e-9


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.seconds:.2f}s): {self.detail}"


def _timed(number: int, name: str, limit: float | None, fn) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok, detail = False, f"{detail}; runtime {dt:.2f}s exceeds {limit}s"
    return CriterionResult(number, name, ok, detail, dt)


def closed_form_equality() -> CriterionResult:
    def run():
        for n in range(3, 26):
            target = Fraction(n, 2 ** (n - 1))
            p, q = exact.prob_none_exact(n, n), exact.prob_not_all_exact(n, n)
            if not p == q == target:
                return False, f"n={n}: P={p}, Qbar={q}, n/2^(n-1)={target}"
        return True, "P(n,n) = Qbar(n,n) = n/2^(n-1) for 3 <= n <= 25"

    return _timed(1, "closed form P(n,n) = Qbar(n,n)", 1.0, run)


def identity_suite() -> CriterionResult:
    def run():
        count = 0
        for n in range(3, 31):
            for k in range(3, n + 1):
                q, qbar, p = exact.prob_all_exact(k, n), exact.prob_not_all_exact(k, n), exact.prob_none_exact(k, n)
                if q + qbar != 1:
                    return False, f"(k,n)=({k},{n}): Q + Qbar = {q + qbar}"
                if p > qbar:
                    return False, f"(k,n)=({k},{n}): P = {p} > Qbar = {qbar}"
                count += 1
        return True, f"Q + Qbar = 1 and P <= Qbar on {count} pairs"

    return _timed(2, "identity suite Q + Qbar = 1, P <= Qbar", 10.0, run)


def triple_path_agreement() -> CriterionResult:
    def run():
        count = 0
        for n in range(3, 51):
            for k in range(3, n + 1):
                if exact.beta_forward(k, n) != exact.beta_backward(k, n):
                    return False, f"(k,n)=({k},{n}): forward and backward beta differ"
                if reconcile.prob_none_verreault(k, n) != exact.prob_none_exact(k, n):
                    return False, f"(k,n)=({k},{n}): f,h form differs from beta form"
                report = reconcile.reconcile_report(k, n)
                if not report.passed:
                    return False, report.first_failure()
                count += 1
        return True, f"beta forward = backward, both P forms and xi=f, mu=h on {count} pairs"

    return _timed(3, "triple-path agreement for no-k-gon probability", 30.0, run)


def random_subset_independence() -> CriterionResult:
    def run():
        for k in (3, 4, 5, 6):
            values = {exact.prob_random_subset(k, n) for n in (k, k + 3, k + 10, k + 50)}
            if values != {Fraction(k, 2 ** (k - 1))}:
                return False, f"k={k}: values {sorted(values)}"
        return True, "P_rand(k,n) = k/2^(k-1) for k in 3..6, four n each"

    return _timed(4, "random-subset probability independent of n", 1.0, run)


def expected_bad_formula() -> CriterionResult:
    def run():
        cases = {(3, 4): Fraction(3), (3, 3): Fraction(3, 4), (4, 6): Fraction(15, 2)}
        for (k, n), want in cases.items():
            got = exact.expected_bad_subsets(k, n)
            if got != want:
                return False, f"E[H({k},{n})] = {got}, expected {want}"
        return True, "E[H] = 3, 3/4, 15/2"

    return _timed(5, "expected number of failing subsets", None, run)


def monte_carlo_validation(seed: int = ACCEPTANCE_SEED) -> CriterionResult:
    def run():
        worst = 0.0
        for k, n in MC_GRID:
            for event, fn in MC_EVENTS.items():
                est = estimate_probability(event, k, n, MC_TRIALS, seed)
                z = abs(est.p_hat - float(fn(k, n))) / est.std_err
                worst = max(worst, z)
                if not z <= MC_SIGMAS:
                    return False, f"{event} (k,n)=({k},{n}): p_hat={est.p_hat}, z={z:.2f}"
        mean = estimate_mean_bad_subsets(3, 4, H_TRIALS, seed)
        zh = abs(mean.mean - 3) / mean.std_err
        if not zh <= MC_SIGMAS:
            return False, f"E[H(3,4)]: mean={mean.mean}, z={zh:.2f}"
        return True, f"18 estimates, max |z| = {worst:.2f}; H(3,4) mean {mean.mean:.4f} (|z| = {zh:.2f}); seed {seed}"

    return _timed(6, "Monte Carlo within 4 standard errors", None, run)


def oracle_equivalence(seed: int = ACCEPTANCE_SEED) -> CriterionResult:
    def run():
        pairs = 0
        for n in range(3, ORACLE_N_MAX + 1):
            rng = make_rng(seed, 1000 + n)
            pieces = sample_uniform_batch(rng, ORACLE_SAMPLES, n)
            d = np.sort(pieces, axis=1)
            for k in range(3, n + 1):
                bad = count_bad_subsets_batch(pieces, k)
                total = math.comb(n, k)
                if not np.array_equal(no_kgon_batch(d, k), bad == total):
                    return False, f"no-k-gon check disagrees with enumeration at (k,n)=({k},{n})"
                if not np.array_equal(all_kgon_batch(d, k), bad == 0):
                    return False, f"all-k-gon check disagrees with enumeration at (k,n)=({k},{n})"
                pairs += 1
        return True, f"{ORACLE_SAMPLES} samples on each of {pairs} pairs, n <= {ORACLE_N_MAX}"

    return _timed(7, "sorted checks agree with brute-force enumeration", 60.0, run)


def large_instance_stability() -> CriterionResult:
    k, n = 196, 200

    def run():
        t0 = time.perf_counter()
        _, log_p = exact.prob_none_float(k, n)
        t_float = time.perf_counter() - t0
        t0 = time.perf_counter()
        p = exact.prob_none_exact(k, n)
        t_exact = time.perf_counter() - t0
        exact_log = exact.log_of(p)
        rel = abs(log_p - exact_log) / abs(exact_log)
        ok = math.isfinite(log_p) and rel <= FLOAT_REL_TOL and t_float < 0.05 and t_exact < 2.0
        return ok, f"log P = {log_p:.12g}, rel err {rel:.2e}, float {t_float * 1e3:.2f} ms, exact {t_exact * 1e3:.2f} ms"

    return _timed(8, "large instance (n, k) = (200, 196)", None, run)


def simulate_determinism(seed: int = ACCEPTANCE_SEED) -> CriterionResult:
    from .cli import main

    def capture(argv):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(argv)
        return code, buf.getvalue().encode()

    def run():
        for problem in ("none", "not_all", "all", "random_subset", "expected_bad"):
            for streams, workers in ((1, 1), (4, 1), (4, 4)):
                argv = ["simulate", "--problem", problem, "-k", "3", "-n", "5", "--trials", "20000",
                        "--seed", str(seed), "--streams", str(streams), "--workers", str(workers), "--format", "json"]
                first, second = capture(argv), capture(argv)
                if first != second or first[0] != 0:
                    return False, f"{problem} streams={streams}: outputs differ"
            # thread scheduling must not change the result
            a = capture(argv[:-4] + ["--workers", "1", "--format", "json"])
            if a != first:
                return False, f"{problem}: result depends on worker count"
        return True, "repeated simulate runs byte-identical for every problem and stream layout"

    return _timed(9, "simulate determinism", None, run)


def run_all(seed: int = ACCEPTANCE_SEED, quick: bool = False) -> list[CriterionResult]:
    results = [
        closed_form_equality(),
        identity_suite(),
        triple_path_agreement(),
        random_subset_independence(),
        expected_bad_formula(),
    ]
    if not quick:
        results += [monte_carlo_validation(seed), oracle_equivalence(seed)]
    results.append(large_instance_stability())
    if not quick:
        results.append(simulate_determinism(seed))
    return results
