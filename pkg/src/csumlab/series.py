"""Partial sums and densities over smallest/largest-prime-factor classes.

Every series here is conditionally convergent (or a counting ratio), so the
summation order is part of its definition: terms are always accumulated in
ascending n.  Evaluation is chunked; each chunk is summed exactly-rounded
with math.fsum (an error-free-transformation summation), and chunk results
are combined in ascending index order.  Chunk boundaries depend only on the
checkpoint schedule, never on the worker count, so rows are bit-identical
for any parallelism.

Series kinds and their limits:
    mu-baseline            -sum mu(n)/n over 2 <= n <= x             -> 1
    alladi                 same, restricted to p(n) = l (mod k)      -> 1/phi(k)
    ramanujan-alladi       -sum c_n(m)/n over p(n) = l (mod k)       -> 1/phi(k)
    mu-mn                  -sum mu(m*n)/n over p(n) = l (mod k)      -> mu(m)/phi(k)
    mertens-restricted     sum mu(n) over n <= x with p(n) > y       (integer)
    mu-over-n-restricted   sum mu(n)/n over n <= x with p(n) > y     -> 0
    weighted-lhs           -sum c_n(m) f(p(n))/n                     (caller target)
    lpf-density            (1/x) sum f(P(n)) over 2 <= n <= x        -> 1/phi(k) for
                           residue-indicator weights
    difference-term        both sides of the exact finite-x identity relating
                           sum (c_n(m)-mu(n)) f(p(n))/n to its divisor-swapped
                           rearrangement (see difference_term)

The restricted kinds include n = 1 through the convention p(1) = infinity,
which exceeds every threshold y.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import fsum, gcd

import numpy as np

from .sieve import SpfTable, euler_phi, factorize, moebius

try:
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _rational = Fraction

#: Sentinel for p(1): larger than every prime, used by restricted sums.
INFINITE_PRIME = math.inf

#: Terms per summation chunk.  Fixed so that chunk boundaries (and hence
#: the exact floating-point result) never depend on worker scheduling.
CHUNK = 1 << 20

SERIES_KINDS = (
    "mu-baseline",
    "alladi",
    "ramanujan-alladi",
    "mu-mn",
    "mertens-restricted",
    "mu-over-n-restricted",
    "weighted-lhs",
    "lpf-density",
    "difference-term",
)


@dataclass(frozen=True)
class PrimeWeight:
    """A bounded weight f on primes, plus a value for the p(1) sentinel.

    Kinds:
        "residue": f(p) = 1 if p = l (mod k) else 0, with gcd(l, k) = 1.
        "one":     f(p) = 1 everywhere.
        "table":   explicit finite map prime -> value; 0 off the table.

    ``at_infinity`` is f at the sentinel p(1) = infinity (default 0).
    ``bound`` records an explicit B with |f| <= B.
    """

    kind: str
    k: int = 0
    l: int = 0
    table: tuple[tuple[int, float], ...] = field(default=())
    at_infinity: float = 0.0

    def __post_init__(self):
        if self.kind not in ("residue", "one", "table"):
            raise ValueError(f"unknown prime-weight kind {self.kind!r}")
        if self.kind == "residue":
            if self.k < 1:
                raise ValueError(f"modulus k must be >= 1, got {self.k}")
            if gcd(self.l, self.k) != 1:
                raise ValueError(f"residue l={self.l} is not coprime to k={self.k}")

    @classmethod
    def residue_class(cls, k: int, l: int, at_infinity: float = 0.0) -> "PrimeWeight":
        return cls(kind="residue", k=k, l=l, at_infinity=at_infinity)

    @classmethod
    def constant_one(cls, at_infinity: float = 0.0) -> "PrimeWeight":
        return cls(kind="one", at_infinity=at_infinity)

    @classmethod
    def from_table(cls, values: dict[int, float], at_infinity: float = 0.0) -> "PrimeWeight":
        return cls(kind="table", table=tuple(sorted(values.items())), at_infinity=at_infinity)

    @property
    def bound(self) -> float:
        if self.kind in ("residue", "one"):
            return max(1.0, abs(self.at_infinity))
        return max([abs(self.at_infinity)] + [abs(v) for _, v in self.table])

    def value_at(self, p) -> float:
        """f(p) for a prime p, or f at the INFINITE_PRIME sentinel."""
        if p == INFINITE_PRIME:
            return self.at_infinity
        if self.kind == "one":
            return 1.0
        if self.kind == "residue":
            return 1.0 if p % self.k == self.l % self.k else 0.0
        for key, val in self.table:
            if key == p:
                return val
        return 0.0

    # --- vectorized helpers over arrays of primes (spf/lpf slices) ---

    def mask(self, primes: np.ndarray) -> np.ndarray | None:
        """Boolean support mask for 0/1 kinds; None means "all ones"."""
        if self.kind == "one":
            return None
        if self.kind == "residue":
            return (primes % np.uint32(self.k)) == np.uint32(self.l % self.k)
        vals = self.values(primes)
        return vals != 0.0

    def values(self, primes: np.ndarray) -> np.ndarray:
        """f applied elementwise (float64); only needed for table weights."""
        out = np.zeros(primes.shape, dtype=np.float64)
        for p, v in self.table:
            out[primes == p] = v
        return out

    def describe(self) -> str:
        """Stable one-token description used in report metadata."""
        if self.kind == "one":
            base = "one"
        elif self.kind == "residue":
            base = f"residue:{self.k},{self.l}"
        else:
            base = "table:" + ",".join(f"{p}={v!r}" for p, v in self.table)
        if self.at_infinity:
            base += f";inf={self.at_infinity!r}"
        return base


@dataclass(frozen=True)
class SeriesSpec:
    """Parameters of one partial-sum experiment."""

    kind: str
    m: int | None = None
    k: int | None = None
    l: int | None = None
    y: int | None = None
    weight: PrimeWeight | None = None
    checkpoints: tuple[int, ...] = ()
    target: float | None = None

    def __post_init__(self):
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.k is not None:
            if self.k < 1:
                raise ValueError(f"modulus k must be >= 1, got {self.k}")
            if self.l is None or gcd(self.l, self.k) != 1:
                raise ValueError(f"residue l={self.l} is not coprime to k={self.k}")
        cps = self.checkpoints
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError(f"checkpoints must be strictly ascending: {cps}")
        if cps and cps[0] < 1:
            raise ValueError(f"checkpoints must be >= 1: {cps}")

    def describe(self) -> str:
        parts = [f"kind={self.kind}"]
        for name in ("m", "k", "l", "y"):
            val = getattr(self, name)
            if val is not None:
                parts.append(f"{name}={val}")
        if self.weight is not None:
            parts.append(f"weight={self.weight.describe()}")
        if self.target is not None:
            parts.append(f"target={self.target!r}")
        parts.append("checkpoints=" + ",".join(str(c) for c in self.checkpoints))
        return " ".join(parts)


@dataclass(frozen=True)
class SeriesRow:
    """One checkpoint: x, accumulated value, |value - target| if targeted.

    ``count`` carries the unnormalized integer count for density series
    with indicator weights; None elsewhere.
    """

    x: int
    value: float
    error: float | None = None
    count: int | None = None


@dataclass(frozen=True)
class PartialSumSeries:
    spec: SeriesSpec
    rows: tuple[SeriesRow, ...]


# ---------------------------------------------------------------------------
# evaluation engine
# ---------------------------------------------------------------------------


def _plan_units(start: int, checkpoints: tuple[int, ...]):
    """Work units and per-checkpoint assembly plans.

    Full units live on the fixed CHUNK grid, so their sums are reusable
    across any checkpoint schedule; each checkpoint additionally gets a
    probe unit covering the partial chunk [grid floor, checkpoint].  The
    value at a checkpoint is therefore a function of the checkpoint alone,
    never of which other checkpoints share the run.

    Returns (units, plans): units is a list of half-open (lo, hi) ranges;
    plans[i] = (n_full, probe_index) says checkpoint i combines the first
    n_full grid sums plus units[probe_index] (None when the checkpoint
    lands on a grid boundary or below start).
    """
    stop = checkpoints[-1] + 1
    bounds = [start] + list(range((start // CHUNK + 1) * CHUNK, stop + 1, CHUNK))
    cells = list(zip(bounds, bounds[1:]))
    units = list(cells)
    plans = []
    for cp in checkpoints:
        top = cp + 1
        if top <= start:
            plans.append((0, None))
            continue
        g = max(start, (top // CHUNK) * CHUNK)
        n_full = sum(1 for _, hi in cells if hi <= g)
        if g < top:
            units.append((g, top))
            plans.append((n_full, len(units) - 1))
        else:
            plans.append((n_full, None))
    return units, plans


def _map_units(unit_fn, units, workers: int) -> list:
    if workers <= 1 or len(units) <= 1:
        return [unit_fn(lo, hi) for lo, hi in units]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda u: unit_fn(*u), units))


def _resolve_workers(workers) -> int:
    if workers in (None, "auto"):
        import os

        return os.cpu_count() or 1
    w = int(workers)
    if w < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return w


def _run_float_series(
    spec: SeriesSpec,
    t: SpfTable,
    unit_fn,
    start: int,
    workers,
    head_terms: tuple[float, ...] = (),
) -> PartialSumSeries:
    """Drive unit_fn over the checkpoint schedule and assemble rows.

    head_terms are exact leading contributions (the n = 1 sentinel term)
    prepended before the first numeric unit.
    """
    cps = spec.checkpoints
    if not cps:
        raise ValueError("at least one checkpoint is required")
    if cps[-1] > t.limit:
        raise ValueError(f"checkpoint {cps[-1]} exceeds sieve limit {t.limit}")
    units, plans = _plan_units(start, cps) if cps[-1] >= start else ([], [(0, None)] * len(cps))
    sums = _map_units(unit_fn, units, _resolve_workers(workers))
    rows = []
    for cp, (n_full, probe) in zip(cps, plans):
        acc = list(head_terms) + sums[:n_full]
        if probe is not None:
            acc.append(sums[probe])
        value = fsum(acc)
        err = abs(value - spec.target) if spec.target is not None else None
        rows.append(SeriesRow(x=cp, value=value, error=err))
    return PartialSumSeries(spec=spec, rows=tuple(rows))


def _weighted_unit_factory(t: SpfTable, m: int, weight: PrimeWeight, sign: int):
    """Unit summer for -sum c_n(m) f(p(n)) / n style series (sign=-1)."""
    spf = t.spf
    mu = t.mu_table()
    divs = [1] if m == 1 else factorize(t, m).divisors()

    def c_column(lo: int, hi: int) -> np.ndarray:
        # c_n(m) = sum over divisors d of m dividing n of d * mu(n/d),
        # assembled with contiguous mu slices (n = d*j walks j0..j1).
        col = np.zeros(hi - lo, dtype=np.int64)
        for d in divs:
            j0 = (lo + d - 1) // d
            j1 = (hi - 1) // d
            if j1 < j0:
                continue
            col[j0 * d - lo : j1 * d - lo + 1 : d] += d * mu[j0 : j1 + 1].astype(np.int64)
        return col

    def unit(lo: int, hi: int) -> float:
        col = c_column(lo, hi)
        wmask = weight.mask(spf[lo:hi])
        if weight.kind == "table":
            fv = weight.values(spf[lo:hi])
            sel = np.flatnonzero((fv != 0.0) & (col != 0))
            num = (sign * col[sel]).astype(np.float64) * fv[sel]
        else:
            nz = col != 0
            sel = np.flatnonzero(nz if wmask is None else (wmask & nz))
            num = (sign * col[sel]).astype(np.float64)
        den = (sel + lo).astype(np.float64)
        return fsum((num / den).tolist())

    return unit


def mu_baseline(t: SpfTable, checkpoints, workers=1) -> PartialSumSeries:
    """-sum mu(n)/n for 2 <= n <= x at each checkpoint; target 1."""
    spec = SeriesSpec(kind="mu-baseline", checkpoints=tuple(checkpoints), target=1.0)
    unit = _weighted_unit_factory(t, 1, PrimeWeight.constant_one(), -1)
    return _run_float_series(spec, t, unit, 2, workers)


def alladi_partial_sum(t: SpfTable, k: int, l: int, checkpoints, workers=1) -> PartialSumSeries:
    """-sum mu(n)/n over n <= x with p(n) = l (mod k); target 1/phi(k)."""
    spec = SeriesSpec(
        kind="alladi",
        k=k,
        l=l,
        checkpoints=tuple(checkpoints),
        target=1.0 / euler_phi(t, k),
    )
    unit = _weighted_unit_factory(t, 1, PrimeWeight.residue_class(k, l), -1)
    return _run_float_series(spec, t, unit, 2, workers)


def ramanujan_alladi_partial_sum(
    t: SpfTable, m: int, k: int, l: int, checkpoints, workers=1
) -> PartialSumSeries:
    """-sum c_n(m)/n over n <= x with p(n) = l (mod k); target 1/phi(k).

    With m = 1 this is row-for-row bit-identical to alladi_partial_sum:
    both run the same weighted engine and c_n(1) is assembled from the
    exact same mu table entries.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    spec = SeriesSpec(
        kind="ramanujan-alladi",
        m=m,
        k=k,
        l=l,
        checkpoints=tuple(checkpoints),
        target=1.0 / euler_phi(t, k),
    )
    unit = _weighted_unit_factory(t, m, PrimeWeight.residue_class(k, l), -1)
    return _run_float_series(spec, t, unit, 2, workers)


def weighted_lhs(
    t: SpfTable, m: int, weight: PrimeWeight, checkpoints, workers=1, target=None
) -> PartialSumSeries:
    """-sum c_n(m) f(p(n)) / n for a bounded prime weight f.

    No target is recorded unless the caller supplies the density it
    expects the dual largest-prime-factor count to have.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    spec = SeriesSpec(
        kind="weighted-lhs",
        m=m,
        weight=weight,
        checkpoints=tuple(checkpoints),
        target=target,
    )
    unit = _weighted_unit_factory(t, m, weight, -1)
    return _run_float_series(spec, t, unit, 2, workers)


def mu_mn_partial_sum(
    t: SpfTable, m: int, k: int, l: int, checkpoints, workers=1
) -> PartialSumSeries:
    """-sum mu(m*n)/n over n <= x with p(n) = l (mod k); target mu(m)/phi(k).

    mu(m*n) never factors m*n directly: it is mu(m)*mu(n) when
    gcd(m, n) = 1 and 0 otherwise (a shared prime makes m*n non-squarefree),
    so m only needs to fit inside this table, not m*x.
    """
    if not 1 <= m <= t.limit:
        raise ValueError(f"m={m} outside table range [1, {t.limit}]")
    mu_m = moebius(t, m)
    spec = SeriesSpec(
        kind="mu-mn",
        m=m,
        k=k,
        l=l,
        checkpoints=tuple(checkpoints),
        target=mu_m / euler_phi(t, k),
    )
    spf = t.spf
    mu = t.mu_table()
    m_primes = [p for p, _ in factorize(t, m).factors] if m > 1 else []
    lmod = np.uint32(l % k)
    ku32 = np.uint32(k)

    def unit(lo: int, hi: int) -> float:
        if mu_m == 0:
            return 0.0
        mask = (spf[lo:hi] % ku32) == lmod
        mask &= mu[lo:hi] != 0
        if m_primes:
            n_idx = np.arange(lo, hi, dtype=np.int64)
            for p in m_primes:
                mask &= (n_idx % p) != 0
        sel = np.flatnonzero(mask)
        num = (-mu_m * mu[lo:hi][sel]).astype(np.float64)
        den = (sel + lo).astype(np.float64)
        return fsum((num / den).tolist())

    return _run_float_series(spec, t, unit, 2, workers)


def mertens_restricted(t: SpfTable, y: int, checkpoints, workers=1) -> PartialSumSeries:
    """M(x, y) = sum mu(n) over 1 <= n <= x with p(n) > y (integer values).

    n = 1 always qualifies via the sentinel p(1) = infinity, so
    M(x, y) = 1 exactly whenever y >= x.
    """
    if y < 1:
        raise ValueError(f"threshold y must be >= 1, got {y}")
    spec = SeriesSpec(kind="mertens-restricted", y=y, checkpoints=tuple(checkpoints))
    spf = t.spf
    mu = t.mu_table()

    def unit(lo: int, hi: int) -> int:
        sel = spf[lo:hi] > np.uint32(y)
        return int(mu[lo:hi][sel].astype(np.int64).sum())

    cps = spec.checkpoints
    if not cps:
        raise ValueError("at least one checkpoint is required")
    if cps[-1] > t.limit:
        raise ValueError(f"checkpoint {cps[-1]} exceeds sieve limit {t.limit}")
    units, plans = _plan_units(2, cps) if cps[-1] >= 2 else ([], [(0, None)] * len(cps))
    sums = _map_units(unit, units, _resolve_workers(workers))
    rows = []
    for cp, (n_full, probe) in zip(cps, plans):
        total = 1 + sum(sums[:n_full])  # 1 is the n = 1 sentinel term
        if probe is not None:
            total += sums[probe]
        rows.append(SeriesRow(x=cp, value=float(total)))
    return PartialSumSeries(spec=spec, rows=tuple(rows))


def mu_over_n_restricted(t: SpfTable, y: int, checkpoints, workers=1) -> PartialSumSeries:
    """sum mu(n)/n over 1 <= n <= x with p(n) > y; target 0.

    Includes the n = 1 term (value 1) via the p(1) = infinity sentinel.
    """
    if y < 1:
        raise ValueError(f"threshold y must be >= 1, got {y}")
    spec = SeriesSpec(
        kind="mu-over-n-restricted", y=y, checkpoints=tuple(checkpoints), target=0.0
    )
    spf = t.spf
    mu = t.mu_table()

    def unit(lo: int, hi: int) -> float:
        mask = (spf[lo:hi] > np.uint32(y)) & (mu[lo:hi] != 0)
        sel = np.flatnonzero(mask)
        num = mu[lo:hi][sel].astype(np.float64)
        den = (sel + lo).astype(np.float64)
        return fsum((num / den).tolist())

    return _run_float_series(spec, t, unit, 2, workers, head_terms=(1.0,))


def lpf_density(
    t: SpfTable, weight: PrimeWeight, checkpoints, workers=1, target=None
) -> PartialSumSeries:
    """(1/x) sum f(P(n)) over 2 <= n <= x, P the largest prime factor.

    For residue-indicator weights the target defaults to 1/phi(k) and each
    row keeps the exact integer count alongside the ratio.
    """
    if target is None:
        if weight.kind == "residue":
            target = 1.0 / euler_phi(t, weight.k)
        elif weight.kind == "one":
            target = 1.0
    spec = SeriesSpec(
        kind="lpf-density", weight=weight, checkpoints=tuple(checkpoints), target=target
    )
    cps = spec.checkpoints
    if not cps:
        raise ValueError("at least one checkpoint is required")
    if cps[-1] > t.limit:
        raise ValueError(f"checkpoint {cps[-1]} exceeds sieve limit {t.limit}")
    lpf = t.lpf_table()
    indicator = weight.kind in ("residue", "one")

    def unit(lo: int, hi: int):
        wmask = weight.mask(lpf[lo:hi])
        if indicator:
            cnt = int(hi - lo) if wmask is None else int(np.count_nonzero(wmask))
            return float(cnt), cnt
        vals = weight.values(lpf[lo:hi])
        sel = vals[vals != 0.0]
        return fsum(sel.tolist()), None

    units, plans = _plan_units(2, cps) if cps[-1] >= 2 else ([], [(0, None)] * len(cps))
    results = _map_units(unit, units, _resolve_workers(workers))
    rows = []
    for cp, (n_full, probe) in zip(cps, plans):
        picked = results[:n_full] + ([results[probe]] if probe is not None else [])
        value = fsum(s for s, _ in picked) / cp
        count = sum(c for _, c in picked if c is not None)
        err = abs(value - target) if target is not None else None
        rows.append(
            SeriesRow(x=cp, value=value, error=err, count=count if indicator else None)
        )
    return PartialSumSeries(spec=spec, rows=tuple(rows))


def run_series(t: SpfTable, spec: SeriesSpec, workers=1) -> PartialSumSeries:
    """Dispatch a SeriesSpec to its evaluator (difference-term excluded)."""
    kind = spec.kind
    cps = spec.checkpoints
    if kind == "mu-baseline":
        return mu_baseline(t, cps, workers)
    if kind == "alladi":
        return alladi_partial_sum(t, spec.k, spec.l, cps, workers)
    if kind == "ramanujan-alladi":
        return ramanujan_alladi_partial_sum(t, spec.m, spec.k, spec.l, cps, workers)
    if kind == "mu-mn":
        return mu_mn_partial_sum(t, spec.m, spec.k, spec.l, cps, workers)
    if kind == "mertens-restricted":
        return mertens_restricted(t, spec.y, cps, workers)
    if kind == "mu-over-n-restricted":
        return mu_over_n_restricted(t, spec.y, cps, workers)
    if kind == "weighted-lhs":
        return weighted_lhs(t, spec.m, spec.weight, cps, workers, target=spec.target)
    if kind == "lpf-density":
        return lpf_density(t, spec.weight, cps, workers, target=spec.target)
    raise ValueError(f"series kind {kind!r} is not checkpoint-driven; "
                     "use difference_term() for the identity check")


# ---------------------------------------------------------------------------
# exact finite-x rearrangement identity
# ---------------------------------------------------------------------------


def difference_term(
    t: SpfTable, m: int, weight: PrimeWeight, x: int, exact: bool = False
):
    """Both sides of the exact finite-x identity for the c - mu difference.

    lhs = sum_{2 <= n <= x} (c_n(m) - mu(n)) f(p(n)) / n
    rhs = sum_{d | m, d > 1} sum_{1 <= n <= x/d} (mu(n)/n) f(p(d*n))

    The divisor swap behind rhs is an exact rearrangement, so the two
    sides agree at every finite x: to within ~1e-9 in float mode, and
    identically as Fractions when exact=True (rational arithmetic; the
    two sides are still computed through independent routes).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 1 <= x <= t.limit:
        raise ValueError(f"x={x} outside table range [1, {t.limit}]")
    if m > t.limit:
        raise ValueError(f"m={m} outside table range [1, {t.limit}]")
    if exact:
        return _difference_exact(t, m, weight, x)
    return _difference_float(t, m, weight, x)


def _difference_float(t: SpfTable, m: int, weight: PrimeWeight, x: int):
    spf = t.spf
    mu = t.mu_table()

    # lhs: the d = 1 divisor term of c_n(m) is mu(n), so dropping it from
    # the column assembly computes c_n(m) - mu(n) with no cancellation.
    def lhs_unit(lo: int, hi: int) -> float:
        divs = factorize(t, m).divisors() if m > 1 else [1]
        col = np.zeros(hi - lo, dtype=np.int64)
        for d in divs:
            if d == 1:
                continue  # c_n - mu cancels the d = 1 term
            j0 = (lo + d - 1) // d
            j1 = (hi - 1) // d
            if j1 < j0:
                continue
            col[j0 * d - lo : j1 * d - lo + 1 : d] += d * mu[j0 : j1 + 1].astype(np.int64)
        if weight.kind == "table":
            fv = weight.values(spf[lo:hi])
            sel = np.flatnonzero((fv != 0.0) & (col != 0))
            num = col[sel].astype(np.float64) * fv[sel]
        else:
            wmask = weight.mask(spf[lo:hi])
            nz = col != 0
            sel = np.flatnonzero(nz if wmask is None else (wmask & nz))
            num = col[sel].astype(np.float64)
        den = (sel + lo).astype(np.float64)
        return fsum((num / den).tolist())

    lhs_sums = [lhs_unit(lo, hi) for lo, hi in _chunks(2, x + 1)] if x >= 2 else []
    lhs = fsum(lhs_sums)

    rhs_parts = []
    for d in factorize(t, m).divisors() if m > 1 else []:
        if d == 1:
            continue
        top = x // d
        if top < 1:
            continue
        part = []
        for lo, hi in _chunks(1, top + 1):
            mu_sl = mu[lo:hi]
            pdx = spf[d * lo : d * (hi - 1) + 1 : d]  # p(d*n) for n in [lo, hi)
            if weight.kind == "table":
                fv = weight.values(pdx)
                sel = np.flatnonzero((fv != 0.0) & (mu_sl != 0))
                num = mu_sl[sel].astype(np.float64) * fv[sel]
            else:
                wmask = weight.mask(pdx)
                nz = mu_sl != 0
                sel = np.flatnonzero(nz if wmask is None else (wmask & nz))
                num = mu_sl[sel].astype(np.float64)
            den = (sel + lo).astype(np.float64)
            part.append(fsum((num / den).tolist()))
        rhs_parts.append(fsum(part))
    rhs = fsum(rhs_parts)
    return lhs, rhs


def _chunks(start: int, stop: int) -> list[tuple[int, int]]:
    edges = [start] + list(range((start // CHUNK + 1) * CHUNK, stop, CHUNK)) + [stop]
    return [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo]


def _balanced_sum(terms: list):
    """Exact pairwise reduction; order-insensitive for rationals."""
    if not terms:
        return _rational(0)
    while len(terms) > 1:
        terms = [
            terms[i] + terms[i + 1] if i + 1 < len(terms) else terms[i]
            for i in range(0, len(terms), 2)
        ]
    return terms[0]


def _weight_rational(weight: PrimeWeight):
    """f as exact rationals (floats convert exactly)."""
    cache = {p: _rational(Fraction(v)) for p, v in weight.table}

    def at(p: int):
        if weight.kind == "one":
            return 1
        if weight.kind == "residue":
            return 1 if p % weight.k == weight.l % weight.k else 0
        return cache.get(p, 0)

    return at


def _difference_exact(t: SpfTable, m: int, weight: PrimeWeight, x: int):
    from .ramanujan import ramanujan_sum

    fq = _weight_rational(weight)
    spf = t.spf

    lhs_terms = []
    for n in range(2, x + 1):
        if gcd(n, m) == 1:
            continue  # c_n(m) = mu(n) exactly when (n, m) = 1
        f = fq(int(spf[n]))
        if f == 0:
            continue
        diff = ramanujan_sum(t, n, m) - moebius(t, n)
        if diff:
            lhs_terms.append(_rational(diff, n) * f)
    lhs = _balanced_sum(lhs_terms)

    rhs_terms = []
    for d in (factorize(t, m).divisors() if m > 1 else []):
        if d == 1:
            continue
        for n in range(1, x // d + 1):
            mu_n = moebius(t, n)
            if mu_n == 0:
                continue
            f = fq(int(spf[d * n]))
            if f == 0:
                continue
            rhs_terms.append(_rational(mu_n, n) * f)
    rhs = _balanced_sum(rhs_terms)
    return (
        Fraction(int(lhs.numerator), int(lhs.denominator)),
        Fraction(int(rhs.numerator), int(rhs.denominator)),
    )
