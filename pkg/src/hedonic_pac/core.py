"""Core blocking predicate and the exhaustive stability oracles.

Everything here is deliberately brute force: it enumerates all Bell(n)
partitions and all 2^n - 1 candidate blocking coalitions so that the
sampling-based algorithms elsewhere can be checked against ground truth
at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coalitions import (
    MAX_PARTITION_N,
    MAX_SUBSET_N,
    LabeledSample,
    Partition,
    ValuationProfile,
    check_enumeration_guard,
    iter_partitions,
    members,
)


def blocks(coalition: int, pi: Partition, profile: ValuationProfile) -> bool:
    """True iff every member of the coalition strictly prefers it to their
    current block of ``pi``."""
    for i in members(coalition):
        if not profile.value(i, coalition) > profile.value(i, pi.block_of(i)):
            return False
    return True


@dataclass(frozen=True)
class CoreResult:
    """Outcome of the exhaustive core search.

    ``partition`` is the first stable partition in restricted-growth
    lexicographic order, or None when the core is empty; in the latter
    case ``witnesses`` maps each enumerated partition (as a block tuple)
    to one coalition that blocks it.
    """

    n: int
    partition: Partition | None
    witnesses: dict[tuple[int, ...], int] | None = None

    @property
    def is_empty(self) -> bool:
        return self.partition is None


def solve_core(profile: ValuationProfile, n: int,
               guard: int = MAX_PARTITION_N,
               keep_witnesses: bool = False) -> CoreResult:
    """Search all partitions for a core-stable one.

    Returns the first stable partition found, or an empty result once
    every partition has produced a blocking witness. Beyond n ≈ 10 the
    Bell-number growth makes this slow; the guard is a hard stop.
    """
    check_enumeration_guard(n, guard, "core solving")
    tables = profile.value_table(guard=max(n, MAX_SUBSET_N))
    member_lists = [members(s) for s in range(1 << n)]
    all_coalitions = range(1, 1 << n)
    witnesses: dict[tuple[int, ...], int] | None = {} if keep_witnesses else None

    for blocks_tuple in iter_partitions(n, guard=guard):
        current = [None] * n
        for block in blocks_tuple:
            for i in member_lists[block]:
                current[i] = tables[i][block]
        witness = 0
        for coalition in all_coalitions:
            for i in member_lists[coalition]:
                if not tables[i][coalition] > current[i]:
                    break
            else:
                witness = coalition
                break
        if not witness:
            return CoreResult(n, Partition(n, blocks_tuple), witnesses)
        if witnesses is not None:
            witnesses[blocks_tuple] = witness
    return CoreResult(n, None, witnesses)


def consistent_with_sample(pi: Partition, sample: LabeledSample,
                           profile: ValuationProfile) -> bool:
    """True iff no sampled coalition core-blocks ``pi``.

    Sampled coalitions keep their observed values; the profile is only
    consulted for the members' current blocks, which a sample generally
    does not cover.
    """
    for entry in sample:
        for i, observed in entry.values.items():
            if not observed > profile.value(i, pi.block_of(i)):
                break
        else:
            return False
    return True


def blocking_probability(pi: Partition, profile: ValuationProfile, dist,
                         guard: int = MAX_SUBSET_N) -> Fraction | float:
    """Exact probability that a coalition drawn from ``dist`` blocks ``pi``.

    Sums dist.prob(S) over all blocking coalitions; exact (a Fraction)
    whenever the distribution is rational.
    """
    n = profile.n
    check_enumeration_guard(n, guard, "blocking-probability enumeration")
    tables = profile.value_table(guard=max(n, MAX_SUBSET_N))
    current = [tables[i][pi.block_of(i)] for i in range(n)]
    total = Fraction(0)
    for coalition in dist.support():
        for i in members(coalition):
            if not tables[i][coalition] > current[i]:
                break
        else:
            total += dist.prob(coalition)
    return total
