"""Exact tie probabilities for order statistics from two overlapping samples.

Two samples share a block of observations: the original sample occupies
positions ``1..m`` and the shifted sample positions ``r+1..r+n`` of a pooled
iid sequence, so they overlap in ``m - r`` positions.  Writing ``N = n + r``
for the pooled size, the i-th order statistic of the original sample and the
j-th order statistic of the shifted sample each coincide with some order
statistic of the pooled sample, and

    p(k, ell) = P(first os realises pooled rank k, second realises rank ell)

is an exact rational number depending only on the integer geometry.  This
module evaluates the closed-form expression for ``p(k, ell)`` (a three-way
case split on k < ell, k = ell, k > ell built from the block-hit counts of
:mod:`ovstat.combinatorics`), assembles full probability tables, and provides
an exhaustive rank-enumeration oracle for verification.

All probabilities are `fractions.Fraction` values; nothing is rounded.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .combinatorics import CountParams, binom, count_matching

__all__ = [
    "OverlapSpec",
    "ProbabilityTable",
    "rank_match_probability",
    "marginal_rank_probability",
    "probability_table",
    "probability_table_bruteforce",
    "bruteforce_rank_histograms",
]

MAX_ORACLE_POOLED = 9


@dataclass(frozen=True)
class OverlapSpec:
    """Geometry of two overlapping samples and the two order-statistic indices.

    ``r``      size of the non-shared prefix (the second sample starts at
               position r+1); r = 0 means the second sample extends the first.
    ``m``      size of the original sample, positions 1..m.
    ``n``      size of the shifted sample, positions r+1..r+n.
    ``i``      order-statistic index within the original sample, 1 <= i <= m.
    ``j``      order-statistic index within the shifted sample, 1 <= j <= n.

    The samples must overlap (r < m) and the pooled sequence must cover both
    (m <= n + r).  The three pooled blocks then have sizes
    ``|A| = r``, ``|B| = m - r >= 1`` and ``|C| = n + r - m >= 0``.
    """

    r: int
    m: int
    n: int
    i: int
    j: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if self.m < 1 or self.n < 1:
            raise ValueError("sample sizes must be >= 1")
        if self.r >= self.m:
            raise ValueError("samples do not overlap: need r < m")
        if self.m > self.n + self.r:
            raise ValueError("original sample sticks out of the pooled sample: need m <= n + r")
        if not 1 <= self.i <= self.m:
            raise ValueError("need 1 <= i <= m")
        if not 1 <= self.j <= self.n:
            raise ValueError("need 1 <= j <= n")

    @property
    def pooled_size(self) -> int:
        return self.n + self.r

    @property
    def block_sizes(self) -> tuple[int, int, int]:
        """Sizes of the prefix-only, shared and suffix-only blocks."""
        return self.r, self.m - self.r, self.n + self.r - self.m

    @property
    def k_support(self) -> range:
        """Pooled ranks the first order statistic can realise."""
        return range(self.i, self.i + self.n + self.r - self.m + 1)

    @property
    def ell_support(self) -> range:
        """Pooled ranks the second order statistic can realise."""
        return range(self.j, self.j + self.r + 1)


def marginal_rank_probability(i: int, m: int, k: int, n: int) -> Fraction:
    """P(the i-th os of an m-subsample equals the k-th os of the full n-sample).

    Equals C(k-1, i-1) C(n-k, m-i) / C(n, m) for i <= k <= n - m + i and 0
    otherwise.  The subsample may be any fixed m of the n iid draws.
    """
    if not (1 <= i <= m <= n and 1 <= k <= n):
        raise ValueError("need 1 <= i <= m <= n and 1 <= k <= n")
    if not i <= k <= n - m + i:
        return Fraction(0)
    return Fraction(binom(k - 1, i - 1) * binom(n - k, m - i), binom(n, m))


def rank_match_probability(spec: OverlapSpec, k: int, ell: int) -> Fraction:
    """Exact P(first os has pooled rank k, second has pooled rank ell).

    Case split on the relative position of the two pooled ranks; each branch
    is a ratio of block-hit permutation counts to (n+r)!.  Zero outside the
    support rectangle i <= k <= i + n + r - m, j <= ell <= j + r.
    """
    if not (1 <= k <= spec.pooled_size and 1 <= ell <= spec.pooled_size):
        raise ValueError("ranks must lie in 1..n+r")
    if k not in spec.k_support or ell not in spec.ell_support:
        return Fraction(0)
    a, b, c = spec.block_sizes
    r, n, i, j = spec.r, spec.n, spec.i, spec.j
    pooled_fact = math.factorial(spec.pooled_size)
    if k == ell:
        num = b * count_matching(CountParams(a, b - 1, c, k - 1, 0, k - i, k - j))
        return Fraction(num, pooled_fact)
    if k < ell:
        num = (n - j + 1) * (
            a * count_matching(CountParams(a - 1, b, c, k - 1, ell - k - 1, k - i, ell - j - 1))
            + b * count_matching(CountParams(a, b - 1, c, k - 1, ell - k - 1, k - i, ell - j))
        )
        return Fraction(num, (r + n - ell + 1) * pooled_fact)
    # k > ell: the mirrored expression with the outer blocks and the two
    # rank/index pairs exchanged.
    num = (spec.m - i + 1) * (
        c * count_matching(CountParams(c - 1, b, a, ell - 1, k - ell - 1, ell - j, k - i - 1))
        + b * count_matching(CountParams(c, b - 1, a, ell - 1, k - ell - 1, ell - j, k - i))
    )
    return Fraction(num, (r + n - k + 1) * pooled_fact)


@dataclass(frozen=True)
class ProbabilityTable:
    """Full table of rank-pair probabilities for one overlap geometry."""

    spec: OverlapSpec
    entries: dict[tuple[int, int], Fraction] = field(repr=False)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def diagonal_mass(self) -> Fraction:
        """Probability that the two order statistics coincide."""
        N = self.spec.pooled_size
        return sum((self[(k, k)] for k in range(1, N + 1)), Fraction(0))

    def row_marginal(self, k: int) -> Fraction:
        N = self.spec.pooled_size
        return sum((self[(k, ell)] for ell in range(1, N + 1)), Fraction(0))

    def col_marginal(self, ell: int) -> Fraction:
        N = self.spec.pooled_size
        return sum((self[(k, ell)] for k in range(1, N + 1)), Fraction(0))

    def nonzero(self) -> dict[tuple[int, int], Fraction]:
        return {kl: p for kl, p in self.entries.items() if p != 0}

    def to_json_dict(self, digits: int = 12) -> dict:
        s = self.spec
        return {
            "spec": {"r": s.r, "m": s.m, "n": s.n, "i": s.i, "j": s.j},
            "pooled_size": s.pooled_size,
            "entries": [
                {
                    "k": k,
                    "ell": ell,
                    "num": p.numerator,
                    "den": p.denominator,
                    "decimal": _decimal(p, digits),
                }
                for (k, ell), p in sorted(self.entries.items())
            ],
            "total": {"num": self.total().numerator, "den": self.total().denominator},
        }

    def to_json(self, digits: int = 12) -> str:
        return json.dumps(self.to_json_dict(digits), indent=2)

    def to_csv_rows(self, digits: int = 12) -> list[tuple]:
        rows: list[tuple] = [("k", "ell", "num", "den", "decimal")]
        for (k, ell), p in sorted(self.entries.items()):
            rows.append((k, ell, p.numerator, p.denominator, _decimal(p, digits)))
        return rows


def _decimal(p: Fraction, digits: int) -> str:
    if p == 0:
        return "0"
    return f"{float(p):.{digits}g}"


def probability_table(spec: OverlapSpec) -> ProbabilityTable:
    """All (k, ell) rank-pair probabilities; entries sum exactly to 1."""
    N = spec.pooled_size
    entries = {
        (k, ell): rank_match_probability(spec, k, ell)
        for k in range(1, N + 1)
        for ell in range(1, N + 1)
    }
    return ProbabilityTable(spec=spec, entries=entries)


def probability_table_bruteforce(spec: OverlapSpec) -> ProbabilityTable:
    """Exact table from enumerating all (n+r)! pooled rank assignments.

    Rank arithmetic only: each assignment determines which pooled ranks the
    two order statistics realise, so frequencies are exact rationals with no
    sampling or floating point involved.  Budget-limited test oracle.
    """
    N = spec.pooled_size
    if N > MAX_ORACLE_POOLED:
        raise ValueError(f"enumeration budget exceeded: {N} > {MAX_ORACLE_POOLED}")
    counts: dict[tuple[int, int], int] = {}
    for ranks in itertools.permutations(range(1, N + 1)):
        k = sorted(ranks[: spec.m])[spec.i - 1]
        ell = sorted(ranks[spec.r : spec.r + spec.n])[spec.j - 1]
        key = (k, ell)
        counts[key] = counts.get(key, 0) + 1
    total = math.factorial(N)
    entries = {
        (k, ell): Fraction(counts.get((k, ell), 0), total)
        for k in range(1, N + 1)
        for ell in range(1, N + 1)
    }
    return ProbabilityTable(spec=spec, entries=entries)


@functools.lru_cache(maxsize=4)
def _pooled_permutations(N: int):
    import numpy as np

    return np.array(list(itertools.permutations(range(1, N + 1))), dtype=np.int64)


def bruteforce_rank_histograms(r: int, m: int, n: int) -> dict[tuple[int, int], dict[tuple[int, int], int]]:
    """Rank-pair counts for every (i, j) at once, from one enumeration.

    Returns {(i, j): {(k, ell): count}}; dividing by (n+r)! gives the exact
    table.  Amortises the factorial scan across all index pairs, which is what
    makes full verification sweeps affordable.
    """
    import numpy as np

    N = n + r
    if N > MAX_ORACLE_POOLED:
        raise ValueError(f"enumeration budget exceeded: {N} > {MAX_ORACLE_POOLED}")
    perms = _pooled_permutations(N)
    first = np.sort(perms[:, :m], axis=1)  # column i-1 = pooled rank of i-th os
    second = np.sort(perms[:, r : r + n], axis=1)
    out: dict[tuple[int, int], dict[tuple[int, int], int]] = {}
    for i in range(1, m + 1):
        ki = first[:, i - 1]
        for j in range(1, n + 1):
            lj = second[:, j - 1]
            flat = np.bincount((ki - 1) * N + (lj - 1), minlength=N * N)
            out[(i, j)] = {
                (k, ell): int(flat[(k - 1) * N + (ell - 1)])
                for k in range(1, N + 1)
                for ell in range(1, N + 1)
                if flat[(k - 1) * N + (ell - 1)]
            }
    return out
