"""Sample-consistent stabilizers and the sample-resistant-core checker.

Each stabilizer returns a partition no sampled coalition can core-block,
which is exactly what efficient PAC stabilizability requires. The greedy
they share assigns residuals of surviving sampled coalitions largest
first, then puts leftovers into singletons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator

from .coalitions import (
    MAX_PARTITION_N,
    LabeledSample,
    Number,
    Partition,
    ValuationProfile,
    check_enumeration_guard,
    check_player_count,
    coalition_of,
    contains,
    members,
)
from .distributions import CoalitionDistribution, exact_prob, floor_log2_inv
from .games import PairValues, w_game_profile
from .learners import NEG_INF, as_labeled_sample, learn_w_games


class InsufficientSampleError(ValueError):
    """The exact regime needs every pair observed; this sample misses some."""


@dataclass(frozen=True)
class StabilizeOutcome:
    """Either a partition or a core-emptiness report.

    ``regime`` records which branch produced it ("pairing" or "exact" for
    worst-member games); ``estimates`` carries the learned pairwise
    values when the pairing branch ran.
    """

    partition: Partition | None
    core_empty: bool = False
    regime: str | None = None
    estimates: PairValues | None = None

    def __post_init__(self) -> None:
        if (self.partition is None) != self.core_empty:
            raise ValueError("outcome must carry a partition exactly when the core is not empty")


def greedy_residual_partition(kept: Iterable[int], n: int,
                              record: list | None = None) -> list[int]:
    """Repeatedly take the candidate with the largest unassigned residual
    and make that residual a block; leftovers become singletons.

    Ties go to the smallest candidate mask. ``record`` (if given) collects
    (candidate, residual, residual size) triples for auditing the greedy
    choice.
    """
    pool = sorted(set(kept))
    covered = 0
    result: list[int] = []
    while pool:
        best = None
        best_size = 0
        for candidate in pool:
            r = (candidate & ~covered).bit_count()
            if r > best_size:
                best, best_size = candidate, r
        if best is None:
            break  # every remaining candidate is already fully covered
        residual = best & ~covered
        if record is not None:
            record.append((best, residual, best_size))
        result.append(residual)
        covered |= residual
        pool.remove(best)
    for i in range(n):
        if not covered >> i & 1:
            result.append(1 << i)
    return result


def _singleton_value(singletons, player: int) -> Number:
    try:
        return singletons[player]
    except (IndexError, KeyError):
        raise ValueError(
            f"sample contains player {player} but no singleton value was provided for them"
        ) from None


def stabilize_bottom_responsive(n: int, sample: LabeledSample,
                                singletons: "Sequence[Number] | Mapping[int, Number]",
                                record: list | None = None) -> Partition:
    """Keep sampled coalitions every member weakly prefers to being alone
    (their singleton must sit in their avoid set), then run the greedy.

    Singleton values are the assumed a priori knowledge; an entry whose
    member lacks one is an error.
    """
    check_player_count(n)
    kept = []
    for entry in sample:
        if all(v >= _singleton_value(singletons, i) for i, v in entry.values.items()):
            kept.append(entry.coalition)
    return Partition(n, tuple(greedy_residual_partition(kept, n, record)))


def stabilize_enemy_aversion(n: int, sample: LabeledSample,
                             record: list | None = None) -> Partition:
    """Keep all-friends sampled coalitions (no member values it below 0,
    which under enemies-aversion means no enemy inside), then greedy."""
    check_player_count(n)
    kept = [entry.coalition for entry in sample
            if all(v >= 0 for v in entry.values.values())]
    return Partition(n, tuple(greedy_residual_partition(kept, n, record)))


# ---------------------------------------------------------------------------
# Worst-member games

def w_exact_regime(n: int, eps, lam) -> bool:
    """Exact-reveal regime test: eps below the cube root of lam^5/2^(n-3),
    compared exactly via cubes."""
    return Fraction(eps) ** 3 < Fraction(lam) ** 5 / Fraction(2) ** (n - 3)


def stabilize_w_games(n: int, sample: LabeledSample, eps, delta=None,
                      lam=1, partition_guard: int = MAX_PARTITION_N) -> StabilizeOutcome:
    """Two-regime stabilizer for strict worst-member games.

    Large eps: learn pairwise estimates (the internal accuracy target is
    eps/(2*lambda)) and greedily pair each remaining lowest-index player
    with its best remaining choice. Small eps: the sample is large enough
    to contain every pair with high probability, so reconstruct the exact
    valuations and hand the game to the exhaustive core solver. Strict
    worst-member games always have a core partition, so the core-empty
    outcome never fires here.
    """
    check_player_count(n)
    if w_exact_regime(n, eps, lam):
        return _stabilize_w_exact(n, sample, partition_guard)
    vstar = learn_w_games(n, sample)
    return StabilizeOutcome(_pairing_partition(n, vstar), regime="pairing",
                            estimates=vstar)


def _pairing_partition(n: int, vstar: PairValues) -> Partition:
    remaining = list(range(n))
    result = []
    while remaining:
        i = remaining.pop(0)
        if not remaining:
            result.append(1 << i)
            break
        best = remaining[0]
        for k in remaining[1:]:
            if vstar.rows[i][k] > vstar.rows[i][best]:
                best = k
        result.append((1 << i) | (1 << best))
        remaining.remove(best)
    return Partition(n, tuple(result))


def _stabilize_w_exact(n: int, sample: LabeledSample,
                       guard: int = MAX_PARTITION_N) -> StabilizeOutcome:
    from .core import solve_core

    rows = [[NEG_INF] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 0  # singleton default, overridden by sampled singletons
    for entry in sample:
        mset = members(entry.coalition)
        if len(mset) == 1:
            rows[mset[0]][mset[0]] = entry.values[mset[0]]
        elif len(mset) == 2:
            i, j = mset
            rows[i][j] = entry.values[i]
            rows[j][i] = entry.values[j]
    missing = [(i, j) for i in range(n) for j in range(i + 1, n)
               if rows[i][j] is NEG_INF or rows[j][i] is NEG_INF]
    if missing:
        raise InsufficientSampleError(
            f"exact regime needs all pairs sampled; missing {missing[:5]}"
            + ("..." if len(missing) > 5 else "")
        )
    pv = PairValues(n, tuple(tuple(r) for r in rows))
    result = solve_core(w_game_profile(pv), n, guard=guard)
    if result.is_empty:
        return StabilizeOutcome(None, core_empty=True, regime="exact")
    return StabilizeOutcome(result.partition, regime="exact")


def bottom_choices(vstar: PairValues, player: int, count: int) -> list[int]:
    """The player's ``count`` least preferred others by the estimates;
    sentinel entries sort first, ties break toward the lower index."""
    order = sorted((j for j in range(vstar.n) if j != player),
                   key=lambda j: (vstar.rows[player][j], j))
    return order[:count]


def green_players(pi: Partition, vstar: PairValues, eps) -> set[int]:
    """Players not sharing a block with one of their floor(log2(1/eps))
    least preferred choices according to the estimates."""
    level = floor_log2_inv(eps)
    greens = set()
    for i in range(pi.n):
        block_rest = pi.block_of(i) & ~(1 << i)
        avoid = coalition_of(bottom_choices(vstar, i, level))
        if not block_rest & avoid:
            greens.add(i)
    return greens


def improvement_probability(pi: Partition, profile: ValuationProfile,
                            player: int, dist: CoalitionDistribution) -> Fraction:
    """Exact Pr[player is in S and strictly prefers S to its block]."""
    current = profile.value(player, pi.block_of(player))
    return exact_prob(dist, lambda s: contains(s, player)
                      and profile.value(player, s) > current)


def no_green_probability(greens: Iterable[int], dist: CoalitionDistribution) -> Fraction:
    """Exact Pr[a drawn coalition contains no green player]."""
    mask = coalition_of(greens)
    return exact_prob(dist, lambda s: not s & mask)


# ---------------------------------------------------------------------------
# Sample-resistant core

@dataclass(frozen=True)
class SrcVerdict:
    """Outcome of the sample-resistant-core check on a finite family.

    ``kind`` is one of "all-empty" (every instance has no partition
    consistent with the support), "common" (some partition is consistent
    for all instances), or "violated" (some instance has consistent
    partitions, yet no partition works for the whole family). A violated
    verdict names a witness pair of instance indices when one exists.
    """

    kind: str
    common_partition: Partition | None = None
    witness: tuple[int, int] | None = None
    consistent_counts: tuple[int, ...] = ()


def check_src(profiles: Sequence[ValuationProfile], support: Iterable[int],
              guard: int = MAX_PARTITION_N) -> SrcVerdict:
    """Decide the sample-resistant-core condition for a finite family of
    instances that agree on a common support of observable coalitions.

    For each instance, enumerate the partitions no support coalition
    blocks; the family passes if those sets are all empty or share an
    element. PAC stabilizability of a class containing the family
    requires passing for every support.
    """
    if not profiles:
        raise ValueError("need at least one instance")
    n = profiles[0].n
    if any(p.n != n for p in profiles):
        raise ValueError("instances must share the player set")
    support = sorted(set(support))
    for s in support:
        reference = profiles[0].values(s)
        for p in profiles[1:]:
            if p.values(s) != reference:
                raise ValueError(
                    f"instances disagree on support coalition {members(s)}; "
                    "the family is not sample-equivalent"
                )

    check_enumeration_guard(n, guard, "consistent-partition enumeration")
    from .coalitions import iter_partitions

    consistent: list[set[tuple[int, ...]]] = []
    for p in profiles:
        tables = p.value_table()
        good: set[tuple[int, ...]] = set()
        for blocks_tuple in iter_partitions(n, guard=guard):
            current = [None] * n
            for block in blocks_tuple:
                for i in members(block):
                    current[i] = tables[i][block]
            for s in support:
                for i in members(s):
                    if not tables[i][s] > current[i]:
                        break
                else:
                    break  # s blocks this partition
            else:
                good.add(blocks_tuple)
        consistent.append(good)

    counts = tuple(len(c) for c in consistent)
    if not any(consistent):
        return SrcVerdict("all-empty", consistent_counts=counts)
    common = set.intersection(*consistent)
    if common:
        for blocks_tuple in iter_partitions(n, guard=guard):
            if blocks_tuple in common:
                return SrcVerdict("common", common_partition=Partition(n, blocks_tuple),
                                  consistent_counts=counts)
    for a in range(len(profiles)):
        if not consistent[a]:
            continue
        for b in range(len(profiles)):
            if b != a and not (consistent[a] & consistent[b]):
                return SrcVerdict("violated", witness=(a, b), consistent_counts=counts)
    return SrcVerdict("violated", consistent_counts=counts)


# ---------------------------------------------------------------------------
# Estimator wrappers

class BottomResponsiveStabilizer(BaseEstimator):
    """Stabilizer assuming known singleton values."""

    def __init__(self, singleton_values: Sequence[Number]):
        self.singleton_values = singleton_values

    def fit(self, X, y=None):
        n = len(self.singleton_values)
        sample = as_labeled_sample(X, n)
        self.partition_ = stabilize_bottom_responsive(n, sample, self.singleton_values)
        self.labels_ = self.partition_.labels()
        return self


class EnemyAversionStabilizer(BaseEstimator):
    """Stabilizer for friends-and-enemies games under enemies aversion."""

    def __init__(self, n: int):
        self.n = n

    def fit(self, X, y=None):
        sample = as_labeled_sample(X, self.n)
        self.partition_ = stabilize_enemy_aversion(self.n, sample)
        self.labels_ = self.partition_.labels()
        return self


class WGamesStabilizer(BaseEstimator):
    """Two-regime stabilizer for strict worst-member games."""

    def __init__(self, n: int, eps: float = 0.3, delta: float = 0.1, lam=1):
        self.n = n
        self.eps = eps
        self.delta = delta
        self.lam = lam

    def fit(self, X, y=None):
        sample = as_labeled_sample(X, self.n)
        self.outcome_ = stabilize_w_games(self.n, sample, self.eps, self.delta, self.lam)
        self.partition_ = self.outcome_.partition
        self.labels_ = self.partition_.labels() if self.partition_ else None
        return self
