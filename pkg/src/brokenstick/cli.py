"""Command-line front end.

Subcommands: ``exact``, ``table``, ``simulate``, ``reconcile``, ``selftest``.
Data goes to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 identity or selftest failure, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from importlib import resources

from . import exact
from .exact import InvalidDomainError, check_domain, log_of
from .oracle import BudgetExceededError
from .reconcile import IdentityCheck, reconcile_report
from .sim import METHODS, SEED_MAX, estimate_mean_bad_subsets, estimate_probability

SCHEMA_VERSION = 1
SEED_ENV = "BROKENSTICK_SEED"
DEFAULT_SEED = 20240611
PROBLEMS = tuple(exact.PROBLEMS)
TABLE_COLUMNS = ("problem", "k", "n", "num", "den", "decimal")
RECORD_COLUMNS = (
    "problem", "k", "n", "num", "den", "decimal", "float", "log_value", "rel_diff",
    "event_name", "trials", "successes", "p_hat", "mean", "std_dev", "std_err",
    "ci_low", "ci_high", "seed", "streams", "method", "z_score",
)  # fmt: skip

_DECIMAL_CTX = Context(prec=15, rounding=ROUND_HALF_EVEN)


class UsageError(Exception):
    pass


def decimal_string(value: Fraction) -> str:
    """Round-to-nearest, 15 significant digits, '.' separator."""
    return str(_DECIMAL_CTX.divide(Decimal(value.numerator), Decimal(value.denominator)))


def load_schema() -> dict:
    return json.loads(resources.files("brokenstick").joinpath("schema/result.schema.json").read_text())


def exact_record(problem: str, k: int, n: int, mode: str = "exact") -> dict:
    value = exact.PROBLEMS[problem](k, n)
    rec: dict = {"schema_version": SCHEMA_VERSION, "problem": problem, "k": k, "n": n}
    if mode in ("exact", "both"):
        rec.update(num=str(value.numerator), den=str(value.denominator), decimal=decimal_string(value))
    if mode in ("float", "both"):
        if problem == "none":
            fval, flog = exact.prob_none_float(k, n)
        else:
            fval = float(value)
            flog = log_of(value) if value > 0 else None
        rec["float"] = fval
        rec["log_value"] = flog
        if mode == "both":
            exact_log = log_of(value) if value > 0 else None
            rec["rel_diff"] = _rel_diff(flog, exact_log, fval, value)
    return rec


def _rel_diff(flog, exact_log, fval, value):
    # compare in the log domain once the value underflows a double
    if exact_log is None or flog is None:
        return None
    if float(value) == 0.0:
        return abs(flog - exact_log) / abs(exact_log)
    return abs(fval - float(value)) / float(value)


def emit(records: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        for rec in records:
            out.write(json.dumps(rec, separators=(", ", ": ")) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for rec in records:
            flat = {**rec, **rec.get("estimate", {})}
            w.writerow(["" if flat.get(c) is None else _fmt(flat[c]) for c in RECORD_COLUMNS])
    else:
        for rec in records:
            flat = {**rec, **rec.get("estimate", {})}
            out.write(" ".join(f"{c}={_fmt(flat[c])}" for c in RECORD_COLUMNS if flat.get(c) is not None) + "\n")


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# --- subcommands -------------------------------------------------------------


def cmd_exact(args) -> int:
    emit([exact_record(args.problem, args.k, args.n, args.mode)], args.format)
    return 0


def cmd_table(args) -> int:
    if not 3 <= args.k_max <= args.n_max:
        raise UsageError(f"need 3 <= k_max <= n_max, got k_max={args.k_max}, n_max={args.n_max}")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for n in range(3, args.n_max + 1):
        for k in range(3, min(n, args.k_max) + 1):
            for problem in PROBLEMS:
                value = exact.PROBLEMS[problem](k, n)
                w.writerow([problem, k, n, value.numerator, value.denominator, decimal_string(value)])
    return 0


def simulate_record(problem: str, k: int, n: int, trials: int, seed: int, streams: int = 1,
                    method: str = "uniform", workers: int | None = None) -> dict:
    rec = exact_record(problem, k, n)
    value = exact.PROBLEMS[problem](k, n)
    if problem == "expected_bad":
        est = estimate_mean_bad_subsets(k, n, trials, seed, streams, method, workers=workers)
        fields = dataclasses.asdict(est)
        del fields["k"], fields["n"]
        centre = est.mean
    else:
        est = estimate_probability(problem, k, n, trials, seed, streams, method, workers=workers)
        fields = dataclasses.asdict(est)
        centre = est.p_hat
    fields["method"] = method
    rec["estimate"] = fields
    diff = abs(centre - float(value))
    rec["z_score"] = diff / est.std_err if est.std_err > 0 else (0.0 if diff == 0 else None)
    return rec


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.streams < 1:
        raise UsageError("--streams must be at least 1")
    if args.problem == "expected_bad" and args.trials < 2:
        raise UsageError("expected_bad needs --trials >= 2")
    rec = simulate_record(args.problem, args.k, args.n, args.trials, args.seed, args.streams, args.method, args.workers)
    emit([rec], args.format)
    return 0


def reconcile_pairs(pairs, beta_fault: int | None = None) -> tuple[int, int, str | None]:
    """Run every identity over ``pairs``; returns (pairs checked, identities checked, first failure)."""
    n_pairs = n_checks = 0
    for k, n in pairs:
        beta = None
        if beta_fault is not None:
            b = list(exact.beta_backward(k, n).betas)
            b[(beta_fault - 1) % n] += 1
            beta = exact.BetaVector(k, n, tuple(b))
        report = reconcile_report(k, n, beta)
        comp = IdentityCheck("Q + Qbar = 1")
        comp.expect(exact.prob_all_exact(k, n) + exact.prob_not_all_exact(k, n), 1, "sum")
        report.checks.append(comp)
        n_pairs += 1
        n_checks += report.total_checked
        if not report.passed:
            return n_pairs, n_checks, report.first_failure()
    return n_pairs, n_checks, None


def cmd_reconcile(args) -> int:
    if args.all:
        if args.n_max < 3:
            raise UsageError("--n-max must be at least 3")
        pairs = [(k, n) for n in range(3, args.n_max + 1) for k in range(3, n + 1)]
    else:
        if args.k is None or args.n is None:
            raise UsageError("reconcile needs -k and -n, or --all --n-max N")
        check_domain(args.k, args.n)
        pairs = [(args.k, args.n)]
    n_pairs, n_checks, failure = reconcile_pairs(pairs, args.inject_beta_fault)
    if failure:
        print(f"FAILED after {n_pairs} (k, n) pairs: {failure}")
        return 1
    print(f"all identities hold: {n_pairs} (k, n) pairs, {n_checks} identities checked")
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(seed=args.seed, quick=args.quick)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("selftest: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


# --- argument parsing --------------------------------------------------------


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits unsigned")
    return value


def default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    return _seed(env) if env else DEFAULT_SEED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="brokenstick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def kn(p, required=True):
        p.add_argument("-k", type=int, required=required, help="polygon side count (k >= 3)")
        p.add_argument("-n", type=int, required=required, help="number of pieces (n >= k)")

    p = sub.add_parser("exact", help="exact probability for one (k, n)")
    kn(p)
    p.add_argument("--problem", choices=PROBLEMS, default="none")
    p.add_argument("--mode", choices=("exact", "float", "both"), default="exact")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("table", help="CSV table of every problem for 3 <= k <= n")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="Monte Carlo estimate compared with the exact value")
    kn(p)
    p.add_argument("--problem", choices=PROBLEMS, default="none")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=_seed, default=None, help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--method", choices=METHODS, default="uniform")
    p.add_argument("--workers", type=int, default=1, help="threads for running streams")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconcile", help="check every identity linking the exact formulas")
    kn(p, required=False)
    p.add_argument("--all", action="store_true", help="check every 3 <= k <= n <= N")
    p.add_argument("--n-max", type=int, default=25)
    p.add_argument("--inject-beta-fault", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_reconcile)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="exact criteria only")
    p.add_argument("--seed", type=_seed, default=None)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", "absent") is None:
        try:
            args.seed = default_seed()
        except (ValueError, argparse.ArgumentTypeError):
            print(f"brokenstick: error: bad ${SEED_ENV}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (UsageError, InvalidDomainError, BudgetExceededError) as exc:
        print(f"brokenstick {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
