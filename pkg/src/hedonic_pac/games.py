"""Native evaluators and seeded generators for the hedonic game classes.

All evaluators are pure functions over immutable instance tables; each
class also gets a :class:`ValuationProfile` wrapper so the core oracles
can treat games uniformly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .coalitions import (
    MAX_SUBSET_N,
    Number,
    ValuationProfile,
    check_coalition,
    check_enumeration_guard,
    check_player_count,
    coalition_of,
    contains,
    iter_subcoalitions,
    members,
    size,
)

FRIEND = 1
ENEMY = 0


@dataclass(frozen=True)
class PairValues:
    """Per-player values over the other players; rows[i][j] = v_i(j).

    The diagonal slot rows[i][i] stores the singleton value v_i({i}),
    which the worst/best-member classes need but the pairwise definition
    leaves implicit. Strict instances have pairwise-distinct off-diagonal
    entries in every row.
    """

    n: int
    rows: tuple[tuple[Number, ...], ...]

    def __post_init__(self) -> None:
        check_player_count(self.n)
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise ValueError("rows must be an n x n table")

    def pair(self, i: int, j: int) -> Number:
        if i == j:
            raise ValueError("pair value v_i(j) requires j != i")
        return self.rows[i][j]

    def singleton(self, i: int) -> Number:
        return self.rows[i][i]

    def is_strict(self) -> bool:
        for i in range(self.n):
            off = [self.rows[i][j] for j in range(self.n) if j != i]
            if len(set(off)) != len(off):
                return False
        return True

    def preference_order(self, i: int, descending: bool = True) -> list[int]:
        """Other players sorted by v_i, best first by default; ties (only
        possible in non-strict instances) break toward the lower index."""
        other = [j for j in range(self.n) if j != i]
        if descending:
            other.sort(key=lambda j: (-self.rows[i][j], j))
        else:
            other.sort(key=lambda j: (self.rows[i][j], j))
        return other


@dataclass(frozen=True)
class AnonymousTable:
    """rows[i][k-1] = value player i assigns to any size-k coalition."""

    n: int
    rows: tuple[tuple[Number, ...], ...]

    def __post_init__(self) -> None:
        check_player_count(self.n)
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise ValueError("rows must be an n x n table (one value per size 1..n)")

    def value(self, i: int, coalition_size: int) -> Number:
        return self.rows[i][coalition_size - 1]


@dataclass(frozen=True)
class FriendGraph:
    """friends[i] is the bitmask of players i considers friends.

    Every off-diagonal pair is labeled: anyone not a friend is an enemy.
    The relation need not be symmetric.
    """

    n: int
    friends: tuple[int, ...]

    def __post_init__(self) -> None:
        check_player_count(self.n)
        if len(self.friends) != self.n:
            raise ValueError("need one friend mask per player")
        for i, mask in enumerate(self.friends):
            if mask >> self.n or mask >> i & 1:
                raise ValueError(f"friend mask of player {i} out of range")

    def friend_count(self, i: int, coalition: int) -> int:
        return (self.friends[i] & coalition).bit_count()

    def enemy_count(self, i: int, coalition: int) -> int:
        others = coalition & ~(1 << i)
        return (others & ~self.friends[i]).bit_count()


@dataclass(frozen=True)
class SizeDecreasingGame:
    """Explicit per-player values where strictly smaller coalitions are
    always strictly preferred; a finite witness family for bottom
    responsiveness."""

    n: int
    values: tuple[dict, ...]  # values[i][coalition] for coalitions containing i

    def __post_init__(self) -> None:
        check_player_count(self.n)
        if len(self.values) != self.n:
            raise ValueError("need one value map per player")

    def value(self, i: int, coalition: int) -> Number:
        return self.values[i][coalition]

    def singleton(self, i: int) -> Number:
        return self.values[i][1 << i]


def eval_additively_separable(pv: PairValues, i: int, coalition: int) -> Number:
    """Sum of pair values over the other members; singletons are 0."""
    _require_member(i, coalition)
    return sum(pv.rows[i][j] for j in members(coalition) if j != i)


def eval_fractional(pv: PairValues, i: int, coalition: int) -> Number:
    """Additively separable sum normalized by coalition size, kept exact."""
    _require_member(i, coalition)
    total = sum(pv.rows[i][j] for j in members(coalition) if j != i)
    return Fraction(total, size(coalition))


def eval_w_game(pv: PairValues, i: int, coalition: int) -> Number:
    """Value of i's worst other member; the stored singleton value for {i}."""
    _require_member(i, coalition)
    if coalition == 1 << i:
        return pv.singleton(i)
    return min(pv.rows[i][j] for j in members(coalition) if j != i)


def b_game_alpha(n: int) -> Fraction:
    """Per-member size penalty for integer-valued best-member games.

    With integer pair values the gaps are at least 1, and the total
    penalty alpha*(|S|-1) stays below 1/2, so (best value desc, size asc)
    ordering is realized exactly.
    """
    return Fraction(1, 2 * n)


def eval_b_game(pv: PairValues, i: int, coalition: int,
                alpha: Fraction | None = None) -> Number:
    """Value of i's best other member, discounted per extra member."""
    _require_member(i, coalition)
    if alpha is None:
        alpha = b_game_alpha(pv.n)
    if coalition == 1 << i:
        return pv.singleton(i)
    best = max(pv.rows[i][j] for j in members(coalition) if j != i)
    return best - alpha * (size(coalition) - 1)


def eval_friends(fg: FriendGraph, appreciation: bool, i: int, coalition: int) -> int:
    """Numeric encoding of the two lexicographic friends/enemies orders.

    Friends appreciation: n*|friends| - |enemies|; enemies aversion:
    |friends| - n*|enemies|. The factor n makes the primary criterion
    dominate, realizing the intended order exactly.
    """
    _require_member(i, coalition)
    f = fg.friend_count(i, coalition)
    e = fg.enemy_count(i, coalition)
    if appreciation:
        return fg.n * f - e
    return f - fg.n * e


def eval_anonymous(tab: AnonymousTable, i: int, coalition: int) -> Number:
    _require_member(i, coalition)
    return tab.value(i, size(coalition))


def _require_member(i: int, coalition: int) -> None:
    if coalition <= 0:
        raise ValueError("coalition must be non-empty")
    if not contains(coalition, i):
        raise ValueError(f"player {i} is not a member of {members(coalition)}")


def avoid_set(profile: ValuationProfile, i: int, coalition: int,
              guard: int = MAX_SUBSET_N) -> set[int]:
    """The sub-coalitions of S containing i that minimize v_i."""
    check_coalition(coalition, profile.n)
    _require_member(i, coalition)
    check_enumeration_guard(size(coalition), guard, "avoid-set enumeration")
    best: Number | None = None
    argmin: set[int] = set()
    for sub in iter_subcoalitions(coalition, containing=i):
        v = profile.value(i, sub)
        if best is None or v < best:
            best = v
            argmin = {sub}
        elif v == best:
            argmin.add(sub)
    return argmin


# ---------------------------------------------------------------------------
# Profiles

def additively_separable_profile(pv: PairValues) -> ValuationProfile:
    return ValuationProfile(pv.n, lambda i, s: eval_additively_separable(pv, i, s),
                            game_class="additively-separable")


def fractional_profile(pv: PairValues) -> ValuationProfile:
    return ValuationProfile(pv.n, lambda i, s: eval_fractional(pv, i, s),
                            game_class="fractional")


def w_game_profile(pv: PairValues) -> ValuationProfile:
    return ValuationProfile(pv.n, lambda i, s: eval_w_game(pv, i, s), game_class="w")


def b_game_profile(pv: PairValues, alpha: Fraction | None = None) -> ValuationProfile:
    a = b_game_alpha(pv.n) if alpha is None else alpha
    return ValuationProfile(pv.n, lambda i, s: eval_b_game(pv, i, s, a), game_class="b")


def friends_profile(fg: FriendGraph, appreciation: bool) -> ValuationProfile:
    tag = "friends-appreciation" if appreciation else "enemies-aversion"
    return ValuationProfile(fg.n, lambda i, s: eval_friends(fg, appreciation, i, s),
                            game_class=tag)


def anonymous_profile(tab: AnonymousTable) -> ValuationProfile:
    return ValuationProfile(tab.n, lambda i, s: eval_anonymous(tab, i, s),
                            game_class="anonymous")


def size_decreasing_profile(game: SizeDecreasingGame) -> ValuationProfile:
    return ValuationProfile(game.n, lambda i, s: game.value(i, s),
                            game_class="size-decreasing")


def make_profile(tag: str, instance) -> ValuationProfile:
    if tag == "as":
        return additively_separable_profile(instance)
    if tag == "fractional":
        return fractional_profile(instance)
    if tag == "w":
        return w_game_profile(instance)
    if tag == "b":
        return b_game_profile(instance)
    if tag == "anonymous":
        return anonymous_profile(instance)
    if tag == "fa":
        return friends_profile(instance, appreciation=True)
    if tag == "ea":
        return friends_profile(instance, appreciation=False)
    if tag == "size-decreasing":
        return size_decreasing_profile(instance)
    raise ValueError(f"unknown game class tag {tag!r}")


# ---------------------------------------------------------------------------
# Seeded generators (integer values in [-n^2, n^2] keep arithmetic exact)

def gen_pair_values(rng: random.Random, game: str, n: int) -> PairValues:
    """Random pairwise values; strict rows (no ties) for w/b games."""
    check_player_count(n)
    strict = game in ("w", "b")
    lo, hi = -n * n, n * n
    rows = []
    for i in range(n):
        while True:
            row = [rng.randint(lo, hi) if j != i else 0 for j in range(n)]
            off = [row[j] for j in range(n) if j != i]
            if not strict or len(set(off)) == len(off):
                break
        rows.append(tuple(row))
    return PairValues(n, tuple(rows))


def gen_anonymous(rng: random.Random, n: int, single_peaked: bool = False) -> AnonymousTable:
    check_player_count(n)
    rows = []
    for _ in range(n):
        if single_peaked:
            peak = rng.randint(1, n)
            row = [0] * n
            row[peak - 1] = n * n
            for k in range(peak - 1, 0, -1):  # sizes below the peak
                row[k - 1] = row[k] - rng.randint(0, n)
            for k in range(peak + 1, n + 1):  # sizes above the peak
                row[k - 1] = row[k - 2] - rng.randint(0, n)
        else:
            row = [rng.randint(-n * n, n * n) for _ in range(n)]
        rows.append(tuple(row))
    return AnonymousTable(n, tuple(rows))


def gen_friend_graph(rng: random.Random, n: int, friend_prob: float = 0.5,
                     symmetric: bool = True) -> FriendGraph:
    check_player_count(n)
    masks = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if symmetric:
                if rng.random() < friend_prob:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
            else:
                if rng.random() < friend_prob:
                    masks[i] |= 1 << j
                if rng.random() < friend_prob:
                    masks[j] |= 1 << i
    return FriendGraph(n, tuple(masks))


def gen_size_decreasing(rng: random.Random, n: int,
                        guard: int = MAX_SUBSET_N) -> SizeDecreasingGame:
    """Values laid out in disjoint descending bands per coalition size."""
    check_player_count(n)
    check_enumeration_guard(n, guard, "size-decreasing generation")
    band = 1000
    values = []
    for i in range(n):
        vals = {}
        for coalition in range(1, 1 << n):
            if contains(coalition, i):
                vals[coalition] = (n - size(coalition)) * band + rng.randint(0, band - 1)
        values.append(vals)
    return SizeDecreasingGame(n, tuple(values))


# ---------------------------------------------------------------------------
# The two 7-player anonymous instances used to break stabilizability

#: Players: a1, a2, a3, a4, b1, c1, c2 (indices 0..6).
ANON_PLAYERS = ("a1", "a2", "a3", "a4", "b1", "c1", "c2")
ANON_C_PLAYERS = coalition_of((5, 6))

# Numeric realizations of the three single-peaked size rankings. Types b
# and c deliberately agree on every size except 5, so the two instances
# below coincide on all coalitions a size-5-free support can reveal.
_TYPE_A = {6: 7, 5: 6, 4: 5, 3: 4, 2: 3, 1: 2, 7: 1}
_TYPE_B = {5: 7, 4: 6, 3: 5, 6: 4, 2: 3, 1: 2, 7: 1}
_TYPE_C = {4: 6, 3: 5, 5: Fraction(9, 2), 6: 4, 2: 3, 1: 2, 7: 1}


def _anon_rows(types: Iterable[dict]) -> tuple[tuple[Number, ...], ...]:
    return tuple(tuple(t[k] for k in range(1, 8)) for t in types)


def anonymous_i1() -> AnonymousTable:
    """Seven players, empty core: four of type a, one b, two c."""
    return AnonymousTable(7, _anon_rows([_TYPE_A] * 4 + [_TYPE_B] + [_TYPE_C] * 2))


def anonymous_i2() -> AnonymousTable:
    """Same as the first instance except c1, c2 adopt the type-b ranking;
    here {{a1,a2}, {a3,a4,b1,c1,c2}} is core stable."""
    return AnonymousTable(7, _anon_rows([_TYPE_A] * 4 + [_TYPE_B] * 3))


def anonymous_i2_stable_partition():
    from .coalitions import Partition

    return Partition.of(7, (0, 1), (2, 3, 4, 5, 6))


# ---------------------------------------------------------------------------
# Instance (de)serialization: JSON with a class tag

def _num_out(v: Number):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


def _num_in(v) -> Number:
    return Fraction(v) if isinstance(v, str) else v


def instance_to_json(tag: str, instance) -> str:
    if isinstance(instance, (PairValues, AnonymousTable)):
        body = {"values": [[_num_out(v) for v in row] for row in instance.rows]}
    elif isinstance(instance, FriendGraph):
        body = {"friends": [[1 if m >> j & 1 else 0 for j in range(instance.n)]
                            for m in instance.friends]}
    elif isinstance(instance, SizeDecreasingGame):
        body = {"values": [
            [[list(members(c)), _num_out(v)] for c, v in sorted(vals.items())]
            for vals in instance.values
        ]}
    else:
        raise TypeError(f"cannot serialize {type(instance)!r}")
    return json.dumps({"class": tag, "n": instance.n, **body}, indent=None)


def instance_from_json(text: str) -> tuple[str, object]:
    data = json.loads(text)
    tag, n = data["class"], data["n"]
    if tag in ("as", "fractional", "w", "b"):
        rows = tuple(tuple(_num_in(v) for v in row) for row in data["values"])
        return tag, PairValues(n, rows)
    if tag == "anonymous":
        rows = tuple(tuple(_num_in(v) for v in row) for row in data["values"])
        return tag, AnonymousTable(n, rows)
    if tag in ("ea", "fa", "friends"):
        masks = tuple(coalition_of(j for j, flag in enumerate(row) if flag)
                      for row in data["friends"])
        return tag, FriendGraph(n, masks)
    if tag == "size-decreasing":
        values = tuple(
            {coalition_of(c): _num_in(v) for c, v in per_player}
            for per_player in data["values"]
        )
        return tag, SizeDecreasingGame(n, values)
    raise ValueError(f"unknown game class tag {tag!r}")
