"""Distributions over non-empty coalitions.

All families here are rational: probabilities are integer weights divided
by the total weight, so every probability query is exact. Sampling takes
an explicit ``random.Random`` owned by the caller.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Iterable, Iterator, Sequence

from .coalitions import (
    MAX_SUBSET_N,
    LabeledSample,
    ValuationProfile,
    check_enumeration_guard,
    check_player_count,
    coalition_of,
    members,
    size,
)


def floor_log2_inv(eps) -> int:
    """Largest L >= 0 with 2^L <= 1/eps, computed exactly."""
    f = Fraction(eps)
    if f <= 0:
        raise ValueError("eps must be positive")
    level = 0
    while (1 << (level + 1)) * f <= 1:
        level += 1
    return level


class CoalitionDistribution:
    """Base: a positive-total weight function over non-empty coalitions."""

    kind = "abstract"

    def __init__(self, n: int):
        check_player_count(n)
        self.n = n
        self._cumulative: tuple[Sequence[int], Sequence[int]] | None = None

    # -- weight interface -------------------------------------------------
    def weight(self, coalition: int) -> int:
        raise NotImplementedError

    def total_weight(self) -> int:
        raise NotImplementedError

    def support(self) -> Iterator[int]:
        """Coalitions with positive probability, ascending as masks."""
        for coalition in range(1, 1 << self.n):
            if self.weight(coalition):
                yield coalition

    # -- probabilities -----------------------------------------------------
    def prob(self, coalition: int) -> Fraction:
        return Fraction(self.weight(coalition), self.total_weight())

    # -- sampling ------------------------------------------------------------
    def draw(self, rng: random.Random) -> int:
        if self._cumulative is None:
            support = list(self.support())
            if not support:
                raise ValueError("distribution has empty support")
            sums = list(accumulate(self.weight(c) for c in support))
            self._cumulative = (support, sums)
        support, sums = self._cumulative
        r = rng.randrange(sums[-1])
        return support[bisect_right(sums, r)]

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{self.kind} distributions have no JSON spec")


class UniformDistribution(CoalitionDistribution):
    """Uniform over all 2^n - 1 non-empty coalitions."""

    kind = "uniform"

    def weight(self, coalition: int) -> int:
        return 1 if 0 < coalition < (1 << self.n) else 0

    def total_weight(self) -> int:
        return (1 << self.n) - 1

    def draw(self, rng: random.Random) -> int:
        while True:
            mask = rng.getrandbits(self.n)
            if mask:
                return mask

    def to_spec(self) -> dict:
        return {"kind": "uniform", "n": self.n}


class ExplicitDistribution(CoalitionDistribution):
    """Arbitrary non-negative rational weights per coalition, scaled to a
    common integer denominator internally."""

    kind = "explicit"

    def __init__(self, n: int, weights: dict[int, "int | Fraction"]):
        super().__init__(n)
        fractions = {}
        scale = 1
        for coalition, w in weights.items():
            if not 0 < coalition < (1 << n):
                raise ValueError(f"coalition {coalition} out of range for n={n}")
            w = Fraction(w)
            if w < 0:
                raise ValueError("weights must be non-negative")
            if w:
                fractions[coalition] = w
                scale = math.lcm(scale, w.denominator)
        cleaned = {c: int(w * scale) for c, w in fractions.items()}
        total = sum(cleaned.values())
        if total <= 0:
            raise ValueError("total weight must be positive")
        self.weights = cleaned
        self._total = total

    def weight(self, coalition: int) -> int:
        return self.weights.get(coalition, 0)

    def total_weight(self) -> int:
        return self._total

    def support(self) -> Iterator[int]:
        return iter(sorted(self.weights))

    def to_spec(self) -> dict:
        return {"kind": "explicit", "n": self.n,
                "weights": [[",".join(map(str, members(c))), str(w)]
                            for c, w in sorted(self.weights.items())]}


class RestrictedUniformDistribution(CoalitionDistribution):
    """Uniform over the coalitions passing a named predicate."""

    kind = "restricted-uniform"

    def __init__(self, n: int, predicate: Callable[[int], bool], predicate_id: str):
        super().__init__(n)
        self.predicate = predicate
        self.predicate_id = predicate_id
        self._support = tuple(c for c in range(1, 1 << n) if predicate(c))
        if not self._support:
            raise ValueError(f"predicate {predicate_id!r} admits no coalition")

    def weight(self, coalition: int) -> int:
        return 1 if 0 < coalition < (1 << self.n) and self.predicate(coalition) else 0

    def total_weight(self) -> int:
        return len(self._support)

    def support(self) -> Iterator[int]:
        return iter(self._support)

    def draw(self, rng: random.Random) -> int:
        while True:
            mask = rng.getrandbits(self.n)
            if mask and self.predicate(mask):
                return mask

    def to_spec(self) -> dict:
        return {"kind": "restricted-uniform", "n": self.n, "id": self.predicate_id}


class BoundedRandomDistribution(CoalitionDistribution):
    """Random weights with max/min ratio at most lambda by construction.

    For lambda = p/q (>= 1), integer weights are drawn uniformly from
    [q*2^n, p*2^n], so any two probabilities differ by a factor of at
    most lambda and every coalition keeps positive mass.
    """

    kind = "bounded"

    def __init__(self, n: int, lam, seed: int, guard: int = MAX_SUBSET_N):
        super().__init__(n)
        check_enumeration_guard(n, guard, "bounded-distribution construction")
        self.lam = Fraction(lam)
        if self.lam < 1:
            raise ValueError("lambda must be at least 1")
        self.seed = seed
        rng = random.Random(seed)
        lo = self.lam.denominator << n
        hi = self.lam.numerator << n
        self._weights = [0] + [rng.randint(lo, hi) for _ in range(1, 1 << n)]
        self._total = sum(self._weights)

    def weight(self, coalition: int) -> int:
        return self._weights[coalition]

    def total_weight(self) -> int:
        return self._total

    def to_spec(self) -> dict:
        return {"kind": "bounded", "n": self.n, "lambda": str(self.lam), "seed": self.seed}


# ---------------------------------------------------------------------------
# Named restricted supports

def _no_large_c_coalitions(coalition: int) -> bool:
    return not (size(coalition) == 5 and coalition & coalition_of((5, 6)))


#: Registry of named support predicates for restricted-uniform specs.
NAMED_PREDICATES: dict[str, tuple[int, Callable[[int], bool]]] = {
    "anon-i1-support": (7, _no_large_c_coalitions),
}


def anon_i1_support() -> RestrictedUniformDistribution:
    """The adversarial support for the 7-player anonymous counterexample:
    uniform over all coalitions except size-5 ones touching c1 or c2."""
    n, predicate = NAMED_PREDICATES["anon-i1-support"]
    return RestrictedUniformDistribution(n, predicate, "anon-i1-support")


# ---------------------------------------------------------------------------
# Operations

def sample(dist: CoalitionDistribution, rng: random.Random, m: int) -> list[int]:
    """m i.i.d. coalition draws."""
    return [dist.draw(rng) for _ in range(m)]


def draw_labeled(dist: CoalitionDistribution, profile: ValuationProfile,
                 rng: random.Random, m: int) -> LabeledSample:
    """Draw m coalitions and label them with the profile's true values."""
    return LabeledSample.label(profile, sample(dist, rng, m))


def exact_prob(dist: CoalitionDistribution, predicate: Callable[[int], bool],
               guard: int = MAX_SUBSET_N) -> Fraction:
    """Exact probability of the predicate under the distribution."""
    check_enumeration_guard(dist.n, guard, "probability enumeration")
    hit = 0
    for coalition in dist.support():
        if predicate(coalition):
            hit += dist.weight(coalition)
    return Fraction(hit, dist.total_weight())


def verify_bounded(dist: CoalitionDistribution, lam,
                   guard: int = MAX_SUBSET_N) -> bool:
    """Check Pr[S1] <= lam * Pr[S2] for every coalition pair, exactly.

    Any zero-probability coalition fails the check (it would need every
    other probability to be zero too, which a distribution cannot do).
    """
    check_enumeration_guard(dist.n, guard, "boundedness verification")
    lam = Fraction(lam)
    w_min = None
    w_max = 0
    count = 0
    for coalition in dist.support():
        w = dist.weight(coalition)
        count += 1
        w_min = w if w_min is None else min(w_min, w)
        w_max = max(w_max, w)
    if count < (1 << dist.n) - 1:
        return False
    return w_max <= lam * w_min


def _default_order(n: int, i: int) -> list[int]:
    return [j for j in range(n) if j != i]


def _check_order(dist: CoalitionDistribution, i: int, order) -> list[int]:
    order = _default_order(dist.n, i) if order is None else list(order)
    if sorted(order + [i]) != list(range(dist.n)):
        raise ValueError("order must list every player except the focal one")
    return order


def _mask_subset_sum(dist: CoalitionDistribution, base: int, free_mask: int) -> int:
    total = 0
    sub = free_mask
    while True:
        total += dist.weight(base | sub)
        if sub == 0:
            return total
        sub = (sub - 1) & free_mask


def prob_event_A(dist: CoalitionDistribution, i: int, j: int,
                 order: Iterable[int] | None = None) -> Fraction:
    """Exact probability that a draw S has i and the rank-j player in it
    and everything else ranked strictly above j.

    ``order`` lists the other players from least to most preferred by
    player i (the identity order by default); ``j`` is a 1-based rank
    into it.
    """
    order = _check_order(dist, i, order)
    if not 1 <= j <= len(order):
        raise ValueError(f"rank j must be in 1..{len(order)}")
    base = (1 << i) | (1 << order[j - 1])
    tail = coalition_of(order[j:])
    return Fraction(_mask_subset_sum(dist, base, tail), dist.total_weight())


def prob_event_B(dist: CoalitionDistribution, i: int, j: int, eps,
                 order: Iterable[int] | None = None) -> Fraction:
    """Exact probability that a draw S has i and the rank-j player in it
    and everything else ranked strictly above L = floor(log2(1/eps)).

    The tail starts at rank L+1: that is the set whose subsets the lower
    bound 2^(n-L-2)/(lambda*2^n) counts, and it makes the bound hold for
    every rank j > L.
    """
    order = _check_order(dist, i, order)
    level = floor_log2_inv(eps)
    if not 1 <= j <= len(order):
        raise ValueError(f"rank j must be in 1..{len(order)}")
    j_id = order[j - 1]
    base = (1 << i) | (1 << j_id)
    tail = coalition_of(order[level:]) & ~(1 << j_id)
    return Fraction(_mask_subset_sum(dist, base, tail), dist.total_weight())


# ---------------------------------------------------------------------------
# JSON specs

def dist_from_spec(spec: dict) -> CoalitionDistribution:
    kind = spec["kind"]
    if kind == "uniform":
        return UniformDistribution(spec["n"])
    if kind == "bounded":
        return BoundedRandomDistribution(spec["n"], Fraction(str(spec["lambda"])),
                                         int(spec["seed"]))
    if kind == "explicit":
        weights: dict[int, Fraction] = {}
        for key, w in spec["weights"]:
            mask = coalition_of(int(p) for p in str(key).split(","))
            weights[mask] = weights.get(mask, Fraction(0)) + Fraction(str(w))
        n = spec.get("n") or max(weights).bit_length()
        return ExplicitDistribution(n, weights)
    if kind in NAMED_PREDICATES:
        n, predicate = NAMED_PREDICATES[kind]
        return RestrictedUniformDistribution(n, predicate, kind)
    if kind == "restricted-uniform":
        pid = spec["id"]
        if pid not in NAMED_PREDICATES:
            raise ValueError(f"unknown predicate id {pid!r}")
        n, predicate = NAMED_PREDICATES[pid]
        return RestrictedUniformDistribution(spec.get("n", n), predicate, pid)
    raise ValueError(f"unknown distribution kind {kind!r}")
