"""Monte Carlo estimates for the broken-stick events.

Two samplers are provided.  ``break_stick`` cuts the unit interval at n-1
uniform points and takes the spacings.  ``break_stick_exponential``
normalises n unit-mean exponentials by their sum, whose order statistics
have the same joint law as the sorted spacings.  Having both lets the
equivalence be checked empirically.

Random streams: stream ``i`` of a run with master seed ``s`` is a PCG64
generator seeded by ``SeedSequence(entropy=s, spawn_key=(i,))``.  Trials are
split as evenly as possible across streams (the first ``trials % streams``
streams get one extra), and every stream draws in fixed chunks of
``CHUNK`` rows, so results depend only on (event, k, n, trials, seed,
streams, method).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import InvalidDomainError, check_domain
from .oracle import DEFAULT_BUDGET, BudgetExceededError, count_bad_subsets_batch, kgon_feasible

Z95 = 1.96
CHUNK = 1 << 16
SEED_MAX = 2**64

EVENTS = ("none", "not_all", "all", "random_subset")
METHODS = ("uniform", "exponential")

Sampler = Callable[[np.random.Generator, int, int], np.ndarray]


@dataclass
class StickSample:
    """Piece lengths of one broken stick plus their ascending order statistics."""

    pieces: np.ndarray
    sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.pieces = np.asarray(self.pieces, dtype=np.float64)
        self.sorted = np.sort(self.pieces)

    @property
    def n(self) -> int:
        return len(self.pieces)


# --- random streams --------------------------------------------------------


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if not 0 <= seed < SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def split_trials(trials: int, streams: int) -> list[int]:
    base, extra = divmod(trials, streams)
    return [base + (i < extra) for i in range(streams)]


# --- single samples ----------------------------------------------------------


def break_stick(n: int, rng: np.random.Generator | None = None, cuts: Sequence[float] | None = None) -> StickSample:
    """Break the unit stick at n-1 uniform points.

    ``cuts`` injects the cut points instead of drawing them.  Draws with a
    repeated cut or a zero-length piece are discarded and redrawn.
    """
    if n < 1:
        raise InvalidDomainError(f"n must be positive, got {n}")
    while True:
        u = np.sort(np.asarray(cuts, dtype=np.float64) if cuts is not None else rng.random(n - 1))
        if len(u) != n - 1:
            raise ValueError(f"expected {n - 1} cuts, got {len(u)}")
        pieces = np.diff(np.concatenate(([0.0], u, [1.0])))
        if np.all(pieces > 0):
            return StickSample(pieces)
        if cuts is not None:
            raise ValueError("injected cuts produce a zero-length piece")


def break_stick_exponential(
    n: int, rng: np.random.Generator | None = None, exponentials: Sequence[float] | None = None
) -> StickSample:
    """Pieces Y_i / W for n unit-mean exponentials Y_i with sum W."""
    if n < 1:
        raise InvalidDomainError(f"n must be positive, got {n}")
    while True:
        y = np.asarray(exponentials, dtype=np.float64) if exponentials is not None else rng.standard_exponential(n)
        if len(y) != n:
            raise ValueError(f"expected {n} exponentials, got {len(y)}")
        pieces = y / y.sum()
        if np.all(pieces > 0):
            return StickSample(pieces)
        if exponentials is not None:
            raise ValueError("injected exponentials produce a zero-length piece")


# --- events on one sample ----------------------------------------------------


def _check_event_domain(sample: StickSample, k: int) -> None:
    check_domain(k, sample.n)


def no_kgon_event(sample: StickSample, k: int) -> bool:
    """True iff every sorted piece from the k-th on exceeds the k-1 pieces below it."""
    _check_event_domain(sample, k)
    d = sample.sorted
    window = math.fsum(d[: k - 1])
    for r in range(k - 1, sample.n):
        if not d[r] > window:
            return False
        window += d[r] - d[r - k + 1]
    return True


def all_kgon_event(sample: StickSample, k: int) -> bool:
    """True iff every k-subset forms a k-gon: largest piece < sum of the k-1 smallest."""
    _check_event_domain(sample, k)
    d = sample.sorted
    return bool(d[-1] < math.fsum(d[: k - 1]))


def random_subset_event(
    sample: StickSample,
    k: int,
    rng: np.random.Generator | None = None,
    subset: Sequence[int] | None = None,
) -> bool:
    """True iff a uniformly chosen k-subset of pieces FAILS to form a k-gon.

    ``subset`` injects 0-based piece indices instead of drawing them.
    """
    _check_event_domain(sample, k)
    if subset is None:
        subset = rng.choice(sample.n, size=k, replace=False)
    return not kgon_feasible(sample.pieces[np.asarray(subset)].tolist())


# --- batched versions used by the estimators ---------------------------------


def sample_uniform_batch(rng: np.random.Generator, rows: int, n: int) -> np.ndarray:
    out = np.empty((rows, n))
    todo = np.arange(rows)
    while len(todo):
        u = np.sort(rng.random((len(todo), n - 1)), axis=1)
        z = np.zeros((len(todo), 1))
        p = np.diff(np.hstack((z, u, z + 1.0)), axis=1)
        ok = np.all(p > 0, axis=1)
        out[todo[ok]] = p[ok]
        todo = todo[~ok]
    return out


def sample_exponential_batch(rng: np.random.Generator, rows: int, n: int) -> np.ndarray:
    out = np.empty((rows, n))
    todo = np.arange(rows)
    while len(todo):
        y = rng.standard_exponential((len(todo), n))
        p = y / y.sum(axis=1, keepdims=True)
        ok = np.all(p > 0, axis=1)
        out[todo[ok]] = p[ok]
        todo = todo[~ok]
    return out


SAMPLERS: dict[str, Sampler] = {"uniform": sample_uniform_batch, "exponential": sample_exponential_batch}


def _lower_sums(d: np.ndarray, k: int) -> np.ndarray:
    """Sum of the k-1 sorted pieces preceding positions k-1..n-1 (0-based)."""
    n = d.shape[1]
    acc = np.zeros((d.shape[0], n - k + 1))
    for u in range(1, k):
        acc += d[:, k - 1 - u : n - u]
    return acc


def no_kgon_batch(sorted_pieces: np.ndarray, k: int) -> np.ndarray:
    check_domain(k, sorted_pieces.shape[1])
    return np.all(sorted_pieces[:, k - 1 :] > _lower_sums(sorted_pieces, k), axis=1)


def all_kgon_batch(sorted_pieces: np.ndarray, k: int) -> np.ndarray:
    check_domain(k, sorted_pieces.shape[1])
    return sorted_pieces[:, -1] < sorted_pieces[:, : k - 1].sum(axis=1)


def random_subset_batch(pieces: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    rows, n = pieces.shape
    check_domain(k, n)
    if k == n:
        chosen = pieces
    else:
        idx = np.argpartition(rng.random((rows, n)), k - 1, axis=1)[:, :k]
        chosen = np.take_along_axis(pieces, idx, axis=1)
    longest = chosen.max(axis=1)
    return longest >= chosen.sum(axis=1) - longest


def evaluate_batch(event: str, pieces: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    if event == "random_subset":
        return random_subset_batch(pieces, k, rng)
    d = np.sort(pieces, axis=1)
    if event == "none":
        return no_kgon_batch(d, k)
    if event == "not_all":
        return ~all_kgon_batch(d, k)
    if event == "all":
        return all_kgon_batch(d, k)
    raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")


# --- estimates ---------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    p = successes / trials
    z2 = z * z
    centre = (p + z2 / (2 * trials)) / (1 + z2 / trials)
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / (1 + z2 / trials)
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


@dataclass(frozen=True)
class Estimate:
    event_name: str
    trials: int
    successes: int
    p_hat: float
    std_err: float
    ci_low: float
    ci_high: float
    seed: int
    streams: int = 1

    @classmethod
    def from_counts(cls, event_name: str, successes: int, trials: int, seed: int, streams: int = 1) -> Estimate:
        p = successes / trials
        low, high = wilson_interval(successes, trials)
        return cls(event_name, trials, successes, p, math.sqrt(p * (1 - p) / trials), low, high, seed, streams)


@dataclass(frozen=True)
class MeanEstimate:
    """Sample mean of the number of failing k-subsets, with a normal 95% CI."""

    k: int
    n: int
    trials: int
    mean: float
    std_dev: float
    std_err: float
    ci_low: float
    ci_high: float
    seed: int
    streams: int = 1


def _validate_run(k: int, n: int, trials: int, streams: int, seed: int) -> None:
    check_domain(k, n)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if streams < 1:
        raise ValueError(f"streams must be at least 1, got {streams}")
    if not 0 <= seed < SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")


def _run_streams(fn, trials: int, seed: int, streams: int, workers: int | None) -> list:
    jobs = [(make_rng(seed, i), t) for i, t in enumerate(split_trials(trials, streams))]
    if workers and workers > 1 and streams > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: fn(*job), jobs))
    return [fn(*job) for job in jobs]


def estimate_probability(
    event: str,
    k: int,
    n: int,
    trials: int,
    seed: int,
    streams: int = 1,
    method: str = "uniform",
    workers: int | None = None,
    sampler: Sampler | None = None,
) -> Estimate:
    """Estimate the probability of ``event`` from ``trials`` broken sticks.

    Events: ``none`` (no k-subset forms a k-gon), ``not_all`` (some k-subset
    fails), ``all`` (every k-subset forms) and ``random_subset`` (a random
    k-subset fails).  ``sampler`` replaces the stick generator, for tests.
    """
    _validate_run(k, n, trials, streams, seed)
    if event not in EVENTS:
        raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")
    draw = sampler or SAMPLERS[method]

    def run(rng: np.random.Generator, count: int) -> int:
        hits = 0
        for start in range(0, count, CHUNK):
            rows = min(CHUNK, count - start)
            hits += int(evaluate_batch(event, draw(rng, rows, n), k, rng).sum())
        return hits

    successes = sum(_run_streams(run, trials, seed, streams, workers))
    return Estimate.from_counts(event, successes, trials, seed, streams)


def estimate_mean_bad_subsets(
    k: int,
    n: int,
    trials: int,
    seed: int,
    streams: int = 1,
    method: str = "uniform",
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> MeanEstimate:
    """Estimate E[H], H = number of failing k-subsets, by full enumeration per stick."""
    _validate_run(k, n, trials, streams, seed)
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard deviation")
    if math.comb(n, k) > budget:
        raise BudgetExceededError(f"C({n},{k}) = {math.comb(n, k)} exceeds budget {budget}")
    draw = SAMPLERS[method]

    def run(rng: np.random.Generator, count: int) -> tuple[int, int]:
        s = s2 = 0
        for start in range(0, count, CHUNK):
            h = count_bad_subsets_batch(draw(rng, min(CHUNK, count - start), n), k, budget)
            s += int(h.sum())
            s2 += int((h * h).sum())
        return s, s2

    parts = _run_streams(run, trials, seed, streams, workers)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / trials
    var = (trials * total_sq - total * total) / (trials * (trials - 1))
    sd = math.sqrt(var)
    se = sd / math.sqrt(trials)
    return MeanEstimate(k, n, trials, mean, sd, se, mean - Z95 * se, mean + Z95 * se, seed, streams)
