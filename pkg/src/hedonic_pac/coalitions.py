"""Players, coalitions, partitions, and labeled samples.

A coalition over players ``0..n-1`` is a plain ``int`` bitmask: bit ``i``
set means player ``i`` belongs to it. Partitions and samples are small
immutable wrappers around masks, with the JSON encodings used by the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

Number = Union[int, float, Fraction]

MAX_PLAYERS = 63
#: Default guard for loops over all 2^n - 1 coalitions.
MAX_SUBSET_N = 20
#: Default guard for loops over all Bell(n) partitions.
MAX_PARTITION_N = 12


class GuardLimitError(ValueError):
    """An exhaustive enumeration would exceed its configured size guard."""


class UndefinedValuationError(ValueError):
    """v_i(S) was queried for a player i outside S."""


def check_player_count(n: int) -> int:
    if not 1 <= n <= MAX_PLAYERS:
        raise ValueError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
    return n


def check_enumeration_guard(n: int, guard: int, what: str) -> None:
    if n > guard:
        raise GuardLimitError(
            f"{what} over n={n} players exceeds the guard of {guard}; "
            "raise the guard explicitly if you really want this"
        )


def check_coalition(coalition: int, n: int) -> int:
    if not isinstance(coalition, int):
        raise TypeError(f"coalition must be an int bitmask, got {type(coalition)!r}")
    if coalition <= 0:
        raise ValueError("coalition must be non-empty")
    if coalition >> n:
        raise ValueError(f"coalition {bin(coalition)} has members outside 0..{n - 1}")
    return coalition


def coalition_of(players: Iterable[int]) -> int:
    mask = 0
    for i in players:
        mask |= 1 << i
    return mask


def members(coalition: int) -> tuple[int, ...]:
    out = []
    i = 0
    while coalition:
        if coalition & 1:
            out.append(i)
        coalition >>= 1
        i += 1
    return tuple(out)


def size(coalition: int) -> int:
    return coalition.bit_count()


def contains(coalition: int, player: int) -> bool:
    return bool(coalition >> player & 1)


def iter_coalitions(n: int, guard: int = MAX_SUBSET_N) -> Iterator[int]:
    """All non-empty coalitions over n players, ascending as integers."""
    check_player_count(n)
    check_enumeration_guard(n, guard, "coalition enumeration")
    return iter(range(1, 1 << n))


def iter_subcoalitions(coalition: int, containing: int | None = None) -> Iterator[int]:
    """Non-empty subsets of ``coalition``, optionally restricted to those
    containing a given player."""
    sub = coalition
    while sub:
        if containing is None or sub >> containing & 1:
            yield sub
        sub = (sub - 1) & coalition


def _rgs_iter(n: int) -> Iterator[list[int]]:
    # Restricted growth strings in lexicographic order; a[i] = block of i.
    a = [0] * n
    m = [0] * n  # m[i] = max(a[0..i])
    while True:
        yield a
        j = n - 1
        while j > 0 and a[j] == m[j - 1] + 1:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        m[j] = max(m[j - 1], a[j])
        for i in range(j + 1, n):
            a[i] = 0
            m[i] = m[i - 1]


def iter_partitions(n: int, guard: int = MAX_PARTITION_N) -> Iterator[tuple[int, ...]]:
    """All partitions of n players as tuples of block masks.

    Blocks appear in order of their smallest member; the partitions
    themselves come out in lexicographic restricted-growth-string order,
    starting with the grand coalition and ending with all singletons.
    """
    check_player_count(n)
    check_enumeration_guard(n, guard, "partition enumeration")

    def gen() -> Iterator[tuple[int, ...]]:
        for a in _rgs_iter(n):
            blocks = [0] * (max(a) + 1)
            for i, c in enumerate(a):
                blocks[c] |= 1 << i
            yield tuple(blocks)

    return gen()


@dataclass(frozen=True)
class Partition:
    """A coalition structure: disjoint non-empty blocks covering 0..n-1."""

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        check_player_count(self.n)
        blocks = tuple(sorted(self.blocks, key=lambda b: b & -b))
        union = 0
        total = 0
        for b in blocks:
            check_coalition(b, self.n)
            union |= b
            total += b.bit_count()
        if union != (1 << self.n) - 1 or total != self.n:
            raise ValueError("blocks must partition the full player set")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, n: int, *blocks: Iterable[int]) -> "Partition":
        return cls(n, tuple(coalition_of(b) for b in blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(1 << i for i in range(n)))

    def block_of(self, player: int) -> int:
        for b in self.blocks:
            if b >> player & 1:
                return b
        raise ValueError(f"player {player} not in 0..{self.n - 1}")

    def member_lists(self) -> list[list[int]]:
        return [list(members(b)) for b in self.blocks]

    def labels(self) -> list[int]:
        """Block index per player, clustering-style."""
        out = [0] * self.n
        for idx, b in enumerate(self.blocks):
            for i in members(b):
                out[i] = idx
        return out

    def to_json(self) -> str:
        return json.dumps({"blocks": self.member_lists()})

    @classmethod
    def from_json(cls, text: str, n: int | None = None) -> "Partition":
        data = json.loads(text)
        blocks = tuple(coalition_of(b) for b in data["blocks"])
        if n is None:
            n = max(max(b) for b in data["blocks"]) + 1
        return cls(n, blocks)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, members(b))) + "}" for b in self.blocks) + "}"


def _encode_value(v: Number):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


def _decode_value(v) -> Number:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v) if not v.is_integer() else int(v)
    return v


@dataclass(frozen=True)
class SampleEntry:
    """One observed coalition with the valuation of each of its members."""

    coalition: int
    values: Mapping[int, Number]

    def __post_init__(self) -> None:
        if self.coalition <= 0:
            raise ValueError("sampled coalition must be non-empty")
        if set(self.values) != set(members(self.coalition)):
            raise ValueError(
                f"value map keys {sorted(self.values)} must equal the coalition "
                f"members {list(members(self.coalition))}"
            )

    def value_of(self, player: int) -> Number:
        return self.values[player]


class LabeledSample:
    """An i.i.d. sample of (coalition, per-member values) pairs.

    Duplicates are allowed. Serialized as JSON lines, one entry per line:
    ``{"coalition": [0, 2], "values": {"0": 5.0, "2": 5.0}}``.
    """

    def __init__(self, entries: Iterable[SampleEntry], n: int | None = None):
        self.entries: list[SampleEntry] = list(entries)
        if n is not None:
            check_player_count(n)
            for e in self.entries:
                check_coalition(e.coalition, n)
        self.n = n

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[int] | int, Mapping[int, Number]]],
                   n: int | None = None) -> "LabeledSample":
        entries = []
        for coalition, values in pairs:
            if not isinstance(coalition, int):
                coalition = coalition_of(coalition)
            entries.append(SampleEntry(coalition, dict(values)))
        return cls(entries, n)

    @classmethod
    def label(cls, profile: "ValuationProfile", coalitions: Iterable[int]) -> "LabeledSample":
        """Attach the profile's true valuations to drawn coalitions."""
        entries = [SampleEntry(c, profile.values(c)) for c in coalitions]
        return cls(entries, profile.n)

    def __iter__(self) -> Iterator[SampleEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: int) -> SampleEntry:
        return self.entries[idx]

    def coalitions(self) -> list[int]:
        return [e.coalition for e in self.entries]

    def restricted_to(self, player: int) -> list[SampleEntry]:
        return [e for e in self.entries if e.coalition >> player & 1]

    def to_jsonl(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(json.dumps({
                "coalition": list(members(e.coalition)),
                "values": {str(i): _encode_value(v) for i, v in sorted(e.values.items())},
            }))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str, n: int | None = None) -> "LabeledSample":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            coalition = coalition_of(data["coalition"])
            values = {int(i): _decode_value(v) for i, v in data["values"].items()}
            entries.append(SampleEntry(coalition, values))
        return cls(entries, n)


class ValuationProfile:
    """Evaluator for v_i(S), defined exactly on pairs with i in S.

    Querying v_i(S) for i outside S is a programming error and raises
    :class:`UndefinedValuationError`; it is never a sentinel number.
    """

    __slots__ = ("n", "game_class", "_evaluate")

    def __init__(self, n: int, evaluate: Callable[[int, int], Number],
                 game_class: str = "custom"):
        check_player_count(n)
        self.n = n
        self.game_class = game_class
        self._evaluate = evaluate

    def value(self, player: int, coalition: int) -> Number:
        check_coalition(coalition, self.n)
        if not coalition >> player & 1:
            raise UndefinedValuationError(
                f"v_{player}(S) undefined: player {player} not in {members(coalition)}"
            )
        return self._evaluate(player, coalition)

    def values(self, coalition: int) -> dict[int, Number]:
        return {i: self.value(i, coalition) for i in members(coalition)}

    def value_table(self, guard: int = MAX_SUBSET_N) -> list[list[Number]]:
        """tables[i][S] for every coalition S containing i (None elsewhere)."""
        check_enumeration_guard(self.n, guard, "valuation tabulation")
        tables: list[list[Number]] = [[None] * (1 << self.n) for _ in range(self.n)]
        for coalition in range(1, 1 << self.n):
            for i in members(coalition):
                tables[i][coalition] = self._evaluate(i, coalition)
        return tables

    def __repr__(self) -> str:
        return f"ValuationProfile(n={self.n}, game_class={self.game_class!r})"
