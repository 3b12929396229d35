"""Exact and Monte Carlo probabilities for broken-stick k-gon problems."""

from .exact import (
    BetaVector,
    ExactRational,
    InvalidDomainError,
    TermCoefficients,
    beta_backward,
    beta_forward,
    expected_bad_subsets,
    prob_all_exact,
    prob_none_exact,
    prob_none_float,
    prob_not_all_exact,
    prob_random_subset,
    term_coefficients,
)
from .oracle import BudgetExceededError, count_bad_subsets, enumerate_subsets, kgon_feasible, no_kgon_bruteforce
from .reconcile import ReconcileSequences, build_sequences, check_simplified_recursions, prob_none_verreault, reconcile_report
from .sim import (
    Estimate,
    MeanEstimate,
    StickSample,
    all_kgon_event,
    break_stick,
    break_stick_exponential,
    estimate_mean_bad_subsets,
    estimate_probability,
    no_kgon_event,
    random_subset_event,
)

__version__ = "0.1.0"
