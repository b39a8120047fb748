"""Command-line front door: sieve caches, Ramanujan sums, series runs, reports.

Subcommands and their exit codes (stable API):
    sieve      build an SPF table and write it to a cache file
    csum       print c_n(m) values as CSV, optionally cross-checked against
               the exponential-sum oracle
    verify     run one partial-sum series, emit its convergence report CSV,
               optionally assert a final-checkpoint tolerance
    identity   evaluate both sides of the finite-x rearrangement identity

    0  success
    2  usage error (bad flags, invalid (k, l), limit < 2, ...)
    3  oracle mismatch in csum --check-oracle
    4  verify --assert-tol breached at the last checkpoint
    5  identity sides differ beyond tolerance

Counts may be written as plain integers (underscores allowed), scientific
shorthand (1e7), or caret powers (10^7); all are parsed to exact integers.
The environment variable CSUMLAB_CACHE_DIR names a directory where sieve
tables are cached as spf_<limit>.bin and reused across runs.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .ramanujan import (
    DIRECT_EVAL_CAP,
    WeightFunction,
    generalized_ramanujan_sum,
    ramanujan_sum,
    ramanujan_sum_direct,
)
from .report import build_report, emit_csv
from .series import (
    SERIES_KINDS,
    PrimeWeight,
    SeriesSpec,
    difference_term,
    run_series,
)
from .sieve import SpfTable, build_spf_table, load_spf_table, save_spf_table

CACHE_ENV = "CSUMLAB_CACHE_DIR"

#: Float-mode agreement threshold for the rearrangement identity.
IDENTITY_TOL = 1e-9

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ORACLE = 3
EXIT_TOLERANCE = 4
EXIT_IDENTITY = 5

VERIFY_KINDS = tuple(k for k in SERIES_KINDS if k != "difference-term")


class UsageError(Exception):
    """Invalid arguments detected after argparse; maps to exit 2."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by the table-driven subcommands."""

    limit: int
    checkpoints: tuple[int, ...]
    out: str | None = None
    exact: bool = False
    workers: int = 1
    cache: str | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")
        if any(c > self.limit for c in self.checkpoints):
            raise UsageError(
                f"checkpoint {max(self.checkpoints)} exceeds limit {self.limit}"
            )


def parse_count(text: str) -> int:
    """Parse '1000000', '1_000_000', '1e6', or '10^6' to an exact int."""
    s = text.strip().replace("_", "")
    try:
        if "^" in s:
            base, _, exp = s.partition("^")
            e = int(exp)
            if e < 0:
                raise UsageError(f"negative exponent in count: {text!r}")
            return int(base) ** e
        if "e" in s or "E" in s:
            d = Decimal(s)
            n = int(d)
            if d != n:
                raise UsageError(f"count is not an integer: {text!r}")
            return n
        return int(s)
    except (ValueError, InvalidOperation):
        raise UsageError(f"cannot parse count: {text!r}") from None


def parse_range(text: str) -> tuple[int, int]:
    """'4' -> (4, 4); '1..200' -> (1, 200)."""
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo, hi = parse_count(lo_s), parse_count(hi_s)
    else:
        lo = hi = parse_count(text)
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range: {text!r}")
    return lo, hi


def parse_weight(text: str) -> PrimeWeight:
    """'one' | 'residue:K,L' | 'table:P=V,P=V,...'."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "one":
            return PrimeWeight.constant_one()
        if kind == "residue":
            k_s, _, l_s = rest.partition(",")
            return PrimeWeight.residue_class(parse_count(k_s), int(l_s))
        if kind == "table":
            values = {}
            for item in rest.split(","):
                p_s, _, v_s = item.partition("=")
                values[parse_count(p_s)] = float(v_s)
            return PrimeWeight.from_table(values)
    except (ValueError, UsageError) as exc:
        raise UsageError(f"bad weight spec {text!r}: {exc}") from None
    raise UsageError(f"unknown weight kind {kind!r} (one, residue:K,L, table:P=V,...)")


def parse_checkpoints(text: str | None, limit: int) -> tuple[int, ...]:
    """Comma list, 'start:factor:count' geometric spec, or decades default."""
    if text is None:
        cps = []
        c = 10
        while c <= limit:
            cps.append(c)
            c *= 10
        if not cps or cps[-1] != limit:
            cps.append(limit)
        return tuple(cps)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"geometric spec must be start:factor:count, got {text!r}")
        start, factor, count = (parse_count(p) for p in parts)
        if start < 1 or factor < 2 or count < 1:
            raise UsageError(f"bad geometric spec: {text!r}")
        cps = tuple(start * factor**i for i in range(count))
    else:
        cps = tuple(parse_count(p) for p in text.split(","))
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise UsageError(f"checkpoints must be strictly ascending: {text!r}")
    if cps[-1] > limit:
        raise UsageError(f"checkpoint {cps[-1]} exceeds limit {limit}")
    return cps


def resolve_workers(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    try:
        w = int(text)
    except ValueError:
        raise UsageError(f"workers must be an integer or 'auto', got {text!r}") from None
    if w < 1:
        raise UsageError(f"workers must be >= 1, got {w}")
    return w


def obtain_table(limit: int, cache: str | None, workers: int) -> SpfTable:
    """Load a cached table covering `limit` if one exists, else build.

    Explicit --cache wins; otherwise CSUMLAB_CACHE_DIR is consulted, and a
    freshly built table is saved there for next time.
    """
    if cache and os.path.exists(cache):
        t = load_spf_table(cache)
        if t.limit >= limit:
            return t
        print(
            f"cache {cache} only covers {t.limit} < {limit}; rebuilding",
            file=sys.stderr,
        )
    cache_dir = os.environ.get(CACHE_ENV)
    default = os.path.join(cache_dir, f"spf_{limit}.bin") if cache_dir else None
    if default and os.path.exists(default):
        return load_spf_table(default)
    t = build_spf_table(limit, workers=workers)
    if cache:
        save_spf_table(t, cache)
    elif default:
        os.makedirs(cache_dir, exist_ok=True)
        save_spf_table(t, default)
    return t


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_sieve(args) -> int:
    limit = parse_count(args.limit)
    workers = resolve_workers(args.workers)
    out = args.out
    if out is None:
        cache_dir = os.environ.get(CACHE_ENV)
        if cache_dir is None:
            raise UsageError(f"--out is required when {CACHE_ENV} is not set")
        os.makedirs(cache_dir, exist_ok=True)
        out = os.path.join(cache_dir, f"spf_{limit}.bin")
    t0 = time.perf_counter()
    table = build_spf_table(limit, workers=workers)
    build_s = time.perf_counter() - t0
    save_spf_table(table, out)
    print(f"limit {limit}: built in {build_s:.2f}s, wrote {out}")
    return EXIT_OK


def cmd_csum(args) -> int:
    n_lo, n_hi = parse_range(args.n)
    m_lo, m_hi = parse_range(args.m)
    weight = WeightFunction.power(args.s) if args.s is not None else None
    if weight is not None and args.check_oracle:
        raise UsageError("--check-oracle applies to classical sums only (drop --s)")
    workers = resolve_workers(args.workers)
    t = obtain_table(max(n_hi, 2), args.cache, workers)
    dest = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        dest.write("n,m,c\n")
        for n in range(n_lo, n_hi + 1):
            for m in range(m_lo, m_hi + 1):
                if weight is None:
                    c = ramanujan_sum(t, n, m)
                    if args.check_oracle and n <= DIRECT_EVAL_CAP:
                        oracle = ramanujan_sum_direct(n, m)
                        if oracle != c:
                            print(
                                f"oracle mismatch at n={n}, m={m}: "
                                f"divisor form {c}, exponential form {oracle}",
                                file=sys.stderr,
                            )
                            return EXIT_ORACLE
                else:
                    c = generalized_ramanujan_sum(t, n, m, weight)
                dest.write(f"{n},{m},{c}\n")
    finally:
        if dest is not sys.stdout:
            dest.close()
    return EXIT_OK


def _series_spec_from_args(args, checkpoints) -> SeriesSpec:
    kind = args.kind
    need = {
        "mu-baseline": (),
        "alladi": ("k", "l"),
        "ramanujan-alladi": ("m", "k", "l"),
        "mu-mn": ("m", "k", "l"),
        "mertens-restricted": ("y",),
        "mu-over-n-restricted": ("y",),
        "weighted-lhs": ("m", "weight"),
        "lpf-density": ("weight",),
    }[kind]
    for name in need:
        if getattr(args, name) is None:
            raise UsageError(f"{kind} requires --{name}")
    weight = parse_weight(args.weight) if args.weight is not None else None
    try:
        return SeriesSpec(
            kind=kind,
            m=args.m,
            k=args.k,
            l=args.l,
            y=args.y,
            weight=weight,
            checkpoints=checkpoints,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args) -> int:
    limit = parse_count(args.limit)
    workers = resolve_workers(args.workers)
    checkpoints = parse_checkpoints(args.checkpoints, limit)
    cfg = RunConfig(
        limit=limit,
        checkpoints=checkpoints,
        out=args.out,
        workers=workers,
        cache=args.cache,
    )
    spec = _series_spec_from_args(args, cfg.checkpoints)
    t = obtain_table(cfg.limit, cfg.cache, cfg.workers)
    series = run_series(t, spec, workers=cfg.workers)
    report = build_report(series)
    if cfg.out:
        emit_csv(report, cfg.out)
        print(f"wrote {cfg.out}")
    else:
        emit_csv(report, sys.stdout)
    if args.assert_tol is not None:
        last = series.rows[-1]
        if last.error is None:
            raise UsageError(
                f"--assert-tol needs a targeted series; {spec.kind} has no target"
            )
        if last.error > args.assert_tol:
            print(
                f"tolerance breach: |{last.value!r} - {series.spec.target!r}| "
                f"= {last.error!r} > {args.assert_tol!r} at x={last.x}",
                file=sys.stderr,
            )
            return EXIT_TOLERANCE
    return EXIT_OK


def cmd_identity(args) -> int:
    m = args.m
    x = parse_count(args.x)
    if m < 1 or x < 1:
        raise UsageError(f"need m >= 1 and x >= 1, got m={m}, x={x}")
    weight = parse_weight(args.weight)
    workers = resolve_workers(args.workers)
    t = obtain_table(max(x, m, 2), args.cache, workers)
    lhs, rhs = difference_term(t, m, weight, x, exact=args.exact)
    if args.exact:
        diff = lhs - rhs
        print(f"lhs  = {lhs}")
        print(f"rhs  = {rhs}")
        print(f"diff = {diff}")
        if diff != 0:
            print("identity breach: sides differ in exact arithmetic", file=sys.stderr)
            return EXIT_IDENTITY
    else:
        diff = abs(lhs - rhs)
        print(f"lhs  = {lhs!r}")
        print(f"rhs  = {rhs!r}")
        print(f"diff = {diff!r}")
        if diff > IDENTITY_TOL:
            print(
                f"identity breach: |lhs - rhs| = {diff!r} > {IDENTITY_TOL!r}",
                file=sys.stderr,
            )
            return EXIT_IDENTITY
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csumlab",
        description="Ramanujan-sum series laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--workers", default="auto", help="worker count or 'auto'")
        p.add_argument("--cache", default=None, help="path to an spf table cache file")

    p = sub.add_parser("sieve", help="build an SPF table and write a cache file")
    p.add_argument("--limit", required=True, help="sieve limit (1e7, 10^7, ...)")
    p.add_argument("--out", default=None, help="output path for the table")
    p.add_argument("--workers", default="auto", help="worker count or 'auto'")
    p.set_defaults(fn=cmd_sieve)

    p = sub.add_parser("csum", help="print Ramanujan sums c_n(m) as CSV")
    p.add_argument("--n", required=True, help="n or range n1..n2")
    p.add_argument("--m", required=True, help="m or range m1..m2")
    p.add_argument("--s", type=int, default=None,
                   help="power-weight degree for the generalized sum")
    p.add_argument("--check-oracle", action="store_true",
                   help="cross-check against the exponential-sum evaluation")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    common(p)
    p.set_defaults(fn=cmd_csum)

    p = sub.add_parser("verify", help="run a series and report convergence")
    p.add_argument("kind", choices=VERIFY_KINDS)
    p.add_argument("--limit", required=True, help="largest checkpoint / sieve limit")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="modulus")
    p.add_argument("--l", type=int, default=None, help="residue, coprime to k")
    p.add_argument("--y", type=int, default=None, help="smallest-prime threshold")
    p.add_argument("--weight", default=None,
                   help="one | residue:K,L | table:P=V,... (weighted kinds)")
    p.add_argument("--checkpoints", default=None,
                   help="comma list or start:factor:count (default: decades)")
    p.add_argument("--assert-tol", type=float, default=None,
                   help="fail with exit 4 if the final error exceeds this")
    p.add_argument("--out", default=None, help="write the report CSV here")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("identity", help="check the finite-x rearrangement identity")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", required=True, help="upper limit (1e5, 10^5, ...)")
    p.add_argument("--weight", default="one",
                   help="one | residue:K,L | table:P=V,... (default: one)")
    p.add_argument("--exact", action="store_true",
                   help="rational arithmetic; sides must match exactly")
    common(p)
    p.set_defaults(fn=cmd_identity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
