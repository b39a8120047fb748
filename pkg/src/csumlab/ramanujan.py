"""Ramanujan sums c_n(m) and their weighted generalizations.

The workhorse evaluator sums mu(n/d)*d over divisors d of gcd(n, m); the
defining exponential sum (cosines over residues coprime to n) is kept as a
slow independent oracle.  The generalized form c_n(m; s, g) sums
g(d)*mu(n/d) over divisors d of n with d**s dividing m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, gcd, pi

import numpy as np

from .sieve import SpfTable, factorize, moebius

#: Largest modulus accepted by the direct exponential-sum oracle.  The
#: cosine sum needs O(n) work and stays comfortably exact in double
#: precision well beyond this size.
DIRECT_EVAL_CAP = 1_000_000

#: Rounding-residue tolerance of the direct oracle, scaled by phi(n).
_RESIDUE_TOL = 1e-6


@dataclass(frozen=True)
class RamanujanValue:
    """One evaluated sum: |value| <= phi(n) for the classical c_n(m)."""

    n: int
    m: int
    value: int


@dataclass(frozen=True)
class WeightFunction:
    """Divisor weight g with exponent s for generalized Ramanujan sums.

    Kinds: "identity" (g(d)=d, s=1, the classical sum), "power"
    (g(d)=d**s), "unit" (g(d)=1, s=1), and "table" (explicit finite values
    with its own s).  Every kind must satisfy g(1) = 1.
    """

    kind: str
    s: int = 1
    table: tuple[tuple[int, float], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("identity", "power", "unit", "table"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.s < 1:
            raise ValueError(f"weight exponent s must be >= 1, got {self.s}")
        if self.kind == "table":
            vals = dict(self.table)
            if vals.get(1) != 1:
                raise ValueError("table weight must map 1 -> 1")

    @classmethod
    def identity(cls) -> "WeightFunction":
        return cls(kind="identity", s=1)

    @classmethod
    def power(cls, s: int) -> "WeightFunction":
        return cls(kind="power", s=s)

    @classmethod
    def unit(cls) -> "WeightFunction":
        return cls(kind="unit", s=1)

    @classmethod
    def from_table(cls, values: dict[int, float], s: int = 1) -> "WeightFunction":
        return cls(kind="table", s=s, table=tuple(sorted(values.items())))

    def value_at(self, d: int):
        if self.kind == "identity":
            return d
        if self.kind == "power":
            return d**self.s
        if self.kind == "unit":
            return 1
        for key, val in self.table:
            if key == d:
                return val
        raise ValueError(f"table weight has no value for divisor {d}")


def ramanujan_sum(t: SpfTable, n: int, m: int) -> int:
    """c_n(m) via the divisor identity sum_{d | gcd(n,m)} mu(n/d) * d.

    Exact integer; equals mu(n) when gcd(n, m) = 1 and phi(n) when n | m.
    Accumulation is in Python ints, so |c_n(m)| <= n never overflows.
    """
    if not 1 <= n <= t.limit:
        raise ValueError(f"n={n} outside table range [1, {t.limit}]")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    g = gcd(n, m)
    if g == 1:
        return moebius(t, n)  # the single d=1 term
    total = 0
    for d in factorize(t, g).divisors():
        total += moebius(t, n // d) * d
    return total


def ramanujan_sum_direct(n: int, m: int) -> int:
    """c_n(m) from the defining exponential sum, as an independent oracle.

    Sums cos(2*pi*q*m/n) over 1 <= q <= n coprime to n (imaginary parts
    cancel exactly) and rounds to the nearest integer.  Usable for
    n <= DIRECT_EVAL_CAP; a rounding residue above 1e-6 * max(1, phi(n))
    means double precision can no longer be trusted and raises.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > DIRECT_EVAL_CAP:
        raise ValueError(f"n={n} exceeds direct-evaluation cap {DIRECT_EVAL_CAP}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n == 1:
        return 1  # single q=1 term, e^0
    q = np.arange(1, n + 1, dtype=np.int64)
    coprime = np.gcd(q, n) == 1
    phi_n = int(np.count_nonzero(coprime))
    # reduce q*m mod n first so the cosine argument stays small
    angles = (q[coprime] * m) % n
    total = fsum((np.cos(angles * (2.0 * pi / n))).tolist())
    nearest = round(total)
    if abs(total - nearest) > _RESIDUE_TOL * max(1, phi_n):
        raise ArithmeticError(
            f"direct Ramanujan sum unreliable at n={n}, m={m}: "
            f"rounding residue {abs(total - nearest):.3e}"
        )
    return int(nearest)


def generalized_ramanujan_sum(t: SpfTable, n: int, m: int, g: WeightFunction):
    """c_n(m; s, g) = sum of g(d) * mu(n/d) over divisors d of n with d**s | m.

    With the identity weight (s=1, g(d)=d) this coincides with
    ramanujan_sum(t, n, m); the power weight g(d)=d**s gives the
    Cohen-Ramanujan sum.  Returns an exact int for integer weights, a float
    for table weights with non-integer values.
    """
    if not 1 <= n <= t.limit:
        raise ValueError(f"n={n} outside table range [1, {t.limit}]")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n == 1:
        return g.value_at(1)
    s = g.s
    total = 0
    for d in factorize(t, n).divisors():
        ds = d**s
        if ds > m:
            break  # divisors ascend, so every later d**s > m too
        if m % ds == 0:
            total += g.value_at(d) * moebius(t, n // d)
    return total


def ramanujan_table(t: SpfTable, n_values, m_values) -> list[RamanujanValue]:
    """Evaluate c_n(m) over the cross product of the two ranges."""
    out = []
    for n in n_values:
        for m in m_values:
            out.append(RamanujanValue(n=n, m=m, value=ramanujan_sum(t, n, m)))
    return out
