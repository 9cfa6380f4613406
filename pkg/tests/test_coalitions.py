import json

import pytest

from hedonic_pac.coalitions import (
    GuardLimitError,
    LabeledSample,
    Partition,
    SampleEntry,
    UndefinedValuationError,
    ValuationProfile,
    coalition_of,
    iter_coalitions,
    iter_partitions,
    iter_subcoalitions,
    members,
    size,
)

BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203, 7: 877, 8: 4140}


def test_mask_helpers():
    mask = coalition_of([0, 2, 5])
    assert mask == 0b100101
    assert members(mask) == (0, 2, 5)
    assert size(mask) == 3


def test_iter_coalitions_counts_and_guard():
    assert sum(1 for _ in iter_coalitions(5)) == 31
    with pytest.raises(GuardLimitError):
        iter_coalitions(25)
    # guard is overridable
    it = iter_coalitions(21, guard=21)
    assert next(it) == 1


def test_subcoalitions_of_mask():
    subs = list(iter_subcoalitions(0b1011))
    assert len(subs) == 7  # non-empty subsets of a 3-element set
    with_player = list(iter_subcoalitions(0b1011, containing=3))
    assert all(s >> 3 & 1 for s in with_player)
    assert len(with_player) == 4


@pytest.mark.parametrize("n,count", sorted(BELL.items()))
def test_partition_enumeration_matches_bell(n, count):
    assert sum(1 for _ in iter_partitions(n, guard=8)) == count


def test_partition_enumeration_order():
    parts = list(iter_partitions(3))
    # Lexicographic restricted-growth order: grand coalition first,
    # singletons last.
    assert parts[0] == (0b111,)
    assert parts[-1] == (0b001, 0b010, 0b100)
    assert parts[1] == (0b011, 0b100)
    assert len(set(parts)) == len(parts)


def test_partition_enumeration_guard():
    with pytest.raises(GuardLimitError):
        iter_partitions(13)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(3, (0b011, 0b110))  # overlap
    with pytest.raises(ValueError):
        Partition(3, (0b011,))  # missing player
    with pytest.raises(ValueError):
        Partition.of(3, [0, 1], [])  # empty block


def test_partition_lookup_and_canonical_order():
    pi = Partition.of(4, (3, 2), (0,), (1,))
    assert pi.blocks == (0b0001, 0b0010, 0b1100)
    assert pi.block_of(2) == 0b1100
    assert pi.block_of(0) == 0b0001
    assert pi.labels() == [0, 1, 2, 2]


def test_partition_json_round_trip():
    pi = Partition.of(3, (0, 1), (2,))
    text = pi.to_json()
    assert json.loads(text) == {"blocks": [[0, 1], [2]]}
    assert Partition.from_json(text, n=3) == pi


def test_sample_entry_requires_exact_value_cover():
    with pytest.raises(ValueError):
        SampleEntry(0b101, {0: 1.0})
    with pytest.raises(ValueError):
        SampleEntry(0b101, {0: 1.0, 1: 2.0, 2: 0.5})
    entry = SampleEntry(0b101, {0: 1.0, 2: 2.0})
    assert entry.value_of(2) == 2.0


def test_sample_jsonl_round_trip():
    sample = LabeledSample.from_pairs(
        [([0, 2], {0: 5.0, 2: 5.0}), ([1], {1: -3})], n=3)
    text = sample.to_jsonl()
    first = json.loads(text.splitlines()[0])
    assert first == {"coalition": [0, 2], "values": {"0": 5.0, "2": 5.0}}
    back = LabeledSample.from_jsonl(text, n=3)
    assert len(back) == 2
    assert back[0].coalition == 0b101
    assert back[1].values == {1: -3}


def test_sample_allows_duplicates():
    sample = LabeledSample.from_pairs([([0], {0: 1}), ([0], {0: 1})])
    assert len(sample) == 2


def test_profile_raises_outside_membership():
    profile = ValuationProfile(3, lambda i, s: size(s), game_class="test")
    assert profile.value(1, 0b010) == 1
    with pytest.raises(UndefinedValuationError):
        profile.value(1, 0b101)
    assert profile.values(0b110) == {1: 2, 2: 2}


def test_profile_value_table_only_fills_memberships():
    profile = ValuationProfile(3, lambda i, s: i + size(s))
    table = profile.value_table()
    assert table[0][0b001] == 1
    assert table[2][0b111] == 5
    assert table[0][0b110] is None
