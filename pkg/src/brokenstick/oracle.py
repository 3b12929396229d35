"""Brute-force k-subset enumeration: ground truth for the sorted-order checks."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from typing import TYPE_CHECKING

import numpy as np

from .exact import InvalidDomainError, check_domain

if TYPE_CHECKING:
    from .sim import StickSample

DEFAULT_BUDGET = 10**6


class BudgetExceededError(RuntimeError):
    """C(n, k) is larger than the enumeration budget."""


SubsetChoice = tuple[int, ...]
"""Strictly increasing 1-based piece indices (i_1 < ... < i_k)."""


def kgon_feasible(lengths: Sequence[float]) -> bool:
    """True iff the lengths form a k-gon: max strictly below the sum of the rest."""
    if len(lengths) < 3:
        raise InvalidDomainError(f"need at least 3 lengths, got {len(lengths)}")
    if any(x <= 0 for x in lengths):
        raise InvalidDomainError("lengths must be positive")
    longest = max(lengths)
    return longest < sum(lengths) - longest


def _check_budget(n: int, k: int, budget: int) -> int:
    count = math.comb(n, k)
    if count > budget:
        raise BudgetExceededError(f"C({n},{k}) = {count} exceeds budget {budget}")
    return count


def enumerate_subsets(n: int, k: int, budget: int = DEFAULT_BUDGET) -> Iterator[SubsetChoice]:
    """Yield every k-subset of 1..n once, in lexicographic order."""
    check_domain(k, n)
    _check_budget(n, k, budget)
    return itertools.combinations(range(1, n + 1), k)


def count_bad_subsets(sample: StickSample | Sequence[float], k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of k-subsets of the pieces that fail to form a k-gon."""
    pieces = _pieces(sample)
    return sum(
        not kgon_feasible([pieces[i - 1] for i in choice])
        for choice in enumerate_subsets(len(pieces), k, budget)
    )


def no_kgon_bruteforce(sample: StickSample | Sequence[float], k: int, budget: int = DEFAULT_BUDGET) -> bool:
    n = len(_pieces(sample))
    return count_bad_subsets(sample, k, budget) == math.comb(n, k)


def all_kgon_bruteforce(sample: StickSample | Sequence[float], k: int, budget: int = DEFAULT_BUDGET) -> bool:
    return count_bad_subsets(sample, k, budget) == 0


def count_bad_subsets_batch(
    pieces: np.ndarray, k: int, budget: int = DEFAULT_BUDGET, chunk_cells: int = 2**22
) -> np.ndarray:
    """Vectorised :func:`count_bad_subsets` over the rows of ``pieces``.

    ``pieces`` has shape (trials, n) and need not be sorted.  Returns an
    int64 array of per-row counts.
    """
    pieces = np.asarray(pieces, dtype=np.float64)
    trials, n = pieces.shape
    check_domain(k, n)
    n_subsets = _check_budget(n, k, budget)
    idx = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.intp,
        count=n_subsets * k,
    ).reshape(n_subsets, k)
    out = np.empty(trials, dtype=np.int64)
    rows = max(1, chunk_cells // (n_subsets * k))
    for start in range(0, trials, rows):
        block = pieces[start : start + rows][:, idx]  # (rows, subsets, k)
        longest = block.max(axis=2)
        bad = longest >= block.sum(axis=2) - longest
        out[start : start + rows] = bad.sum(axis=1)
    return out


def _pieces(sample) -> Sequence[float]:
    return getattr(sample, "pieces", sample)
