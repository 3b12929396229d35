"""Timing and accuracy of the float log-domain path against exact rationals."""

import time

from brokenstick.exact import log_of, prob_none_exact, prob_none_float

CASES = [(196, 200), (3, 200), (50, 400), (100, 1000), (3, 2000)]

for k, n in CASES:
    t0 = time.perf_counter()
    p, log_p = prob_none_float(k, n)
    t_float = time.perf_counter() - t0
    t0 = time.perf_counter()
    exact_log = log_of(prob_none_exact(k, n))
    t_exact = time.perf_counter() - t0
    rel = abs(log_p - exact_log) / abs(exact_log)
    print(f"k={k:4d} n={n:5d}  log P = {log_p:14.6f}  P = {p:.4g}  rel err {rel:.1e}"
          f"  float {t_float * 1e3:7.2f} ms  exact {t_exact * 1e3:8.2f} ms")
