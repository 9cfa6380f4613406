import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hedonic_pac.coalitions import coalition_of, iter_coalitions, size
from hedonic_pac.games import (
    FriendGraph,
    PairValues,
    anonymous_i1,
    anonymous_i2,
    avoid_set,
    b_game_alpha,
    eval_additively_separable,
    eval_anonymous,
    eval_b_game,
    eval_friends,
    eval_fractional,
    eval_w_game,
    gen_anonymous,
    gen_friend_graph,
    gen_pair_values,
    gen_size_decreasing,
    instance_from_json,
    instance_to_json,
    size_decreasing_profile,
)


def three_player_pairs():
    # v_0(1)=3, v_0(2)=-1; the other rows are irrelevant for these checks
    return PairValues(3, ((0, 3, -1), (0, 0, 0), (0, 0, 0)))


def test_additively_separable_examples():
    pv = three_player_pairs()
    assert eval_additively_separable(pv, 0, 0b111) == 2
    assert eval_additively_separable(pv, 0, 0b001) == 0
    with pytest.raises(ValueError):
        eval_additively_separable(pv, 0, 0b110)


def test_fractional_examples():
    pv = three_player_pairs()
    assert eval_fractional(pv, 0, 0b111) == Fraction(2, 3)
    assert eval_fractional(pv, 0, 0b001) == 0


def test_w_game_examples():
    pv = three_player_pairs()
    assert eval_w_game(pv, 0, 0b111) == -1
    assert eval_w_game(pv, 0, 0b011) == 3
    assert eval_w_game(pv, 0, 0b001) == 0  # stored singleton value


def test_b_game_examples():
    pv = three_player_pairs()
    assert eval_b_game(pv, 0, 0b111, alpha=Fraction(1, 10)) == Fraction(28, 10)
    # same best member, smaller coalition strictly preferred
    small = eval_b_game(pv, 0, 0b011, alpha=Fraction(1, 10))
    large = eval_b_game(pv, 0, 0b111, alpha=Fraction(1, 10))
    assert small > large


def test_b_game_realizes_lexicographic_order():
    rng = random.Random(11)
    n = 8
    pv = gen_pair_values(rng, "b", n)
    i = 0
    coalitions = [s for s in iter_coalitions(n) if s >> i & 1 and s != 1 << i]

    def lex_key(s):
        best = max(pv.rows[i][j] for j in range(n) if j != i and s >> j & 1)
        return (best, -size(s))

    for s in coalitions:
        for t in coalitions:
            lhs = eval_b_game(pv, i, s)
            rhs = eval_b_game(pv, i, t)
            assert (lhs > rhs) == (lex_key(s) > lex_key(t))


def test_friends_examples():
    # n=5, i=0; friends 1,2; enemy 3; player 4 outside the coalition
    fg = FriendGraph(5, (coalition_of([1, 2]), 0, 0, 0, 0))
    s = coalition_of([0, 1, 2, 3])
    assert eval_friends(fg, True, 0, s) == 9
    assert eval_friends(fg, False, 0, s) == -3
    for coalition in iter_coalitions(5):
        if coalition & 1:
            ea = eval_friends(fg, False, 0, coalition)
            has_enemy = bool(coalition & ~(fg.friends[0] | 1))
            assert (ea >= 0) == (not has_enemy)


def test_friends_encoding_realizes_lexicographic_orders():
    rng = random.Random(5)
    fg = gen_friend_graph(rng, 8, friend_prob=0.5)
    i = 2
    coalitions = [s for s in iter_coalitions(8) if s >> i & 1]
    for s in coalitions:
        for t in coalitions:
            fs, es = fg.friend_count(i, s), fg.enemy_count(i, s)
            ft, et = fg.friend_count(i, t), fg.enemy_count(i, t)
            ea = eval_friends(fg, False, i, s) > eval_friends(fg, False, i, t)
            assert ea == ((es, -fs) < (et, -ft))
            fa = eval_friends(fg, True, i, s) > eval_friends(fg, True, i, t)
            assert fa == ((-fs, es) < (-ft, et))


def test_anonymous_depends_only_on_size():
    rng = random.Random(3)
    n = 10
    tab = gen_anonymous(rng, n)
    for i in range(n):
        by_size = {}
        for s in iter_coalitions(n):
            if s >> i & 1:
                by_size.setdefault(size(s), set()).add(eval_anonymous(tab, i, s))
        assert all(len(vals) == 1 for vals in by_size.values())


def test_anonymous_instance_rankings_match_published_orders():
    i1 = anonymous_i1()
    # type a ranks sizes 6 > 5 > 4 > 3 > 2 > 1 > 7
    a = [i1.value(0, k) for k in range(1, 8)]
    order_a = sorted(range(1, 8), key=lambda k: -a[k - 1])
    assert order_a == [6, 5, 4, 3, 2, 1, 7]
    b = [i1.value(4, k) for k in range(1, 8)]
    order_b = sorted(range(1, 8), key=lambda k: -b[k - 1])
    assert order_b == [5, 4, 3, 6, 2, 1, 7]
    c = [i1.value(5, k) for k in range(1, 8)]
    order_c = sorted(range(1, 8), key=lambda k: -c[k - 1])
    assert order_c == [4, 3, 5, 6, 2, 1, 7]


def test_anonymous_twins_agree_except_size_five():
    i1, i2 = anonymous_i1(), anonymous_i2()
    for player in range(7):
        for k in range(1, 8):
            if k == 5 and player in (5, 6):
                assert i1.value(player, k) != i2.value(player, k)
            else:
                assert i1.value(player, k) == i2.value(player, k)


def test_avoid_set_examples():
    rng = random.Random(9)
    game = gen_size_decreasing(rng, 6)
    profile = size_decreasing_profile(game)
    # smaller-is-better games: the avoid set is always the whole coalition
    for s in (0b111, 0b110110, 0b001011):
        for i in range(6):
            if s >> i & 1:
                assert avoid_set(profile, i, s) == {s}
    assert avoid_set(profile, 2, 0b100) == {0b100}


def test_avoid_set_singleton_membership_equivalence():
    # {i} minimizes over S's sub-coalitions iff the singleton value is
    # at most v_i(S), exhaustively on a smaller-is-better instance.
    rng = random.Random(4)
    game = gen_size_decreasing(rng, 6)
    profile = size_decreasing_profile(game)
    for s in iter_coalitions(6):
        for i in range(6):
            if s >> i & 1:
                in_avoid = (1 << i) in avoid_set(profile, i, s)
                assert in_avoid == (game.singleton(i) <= game.value(i, s))


def test_size_decreasing_generator_invariant():
    rng = random.Random(1)
    game = gen_size_decreasing(rng, 6)
    for i in range(6):
        for s in iter_coalitions(6):
            for t in iter_coalitions(6):
                if s >> i & 1 and t >> i & 1 and size(s) < size(t):
                    assert game.value(i, s) > game.value(i, t)


def test_size_decreasing_satisfies_bottom_responsiveness():
    rng = random.Random(2)
    n = 6
    game = gen_size_decreasing(rng, n)
    profile = size_decreasing_profile(game)
    for i in range(n):
        coalitions = [s for s in iter_coalitions(n) if s >> i & 1]
        avoid = {s: avoid_set(profile, i, s) for s in coalitions}
        for s in coalitions:
            for t in coalitions:
                avs, avt = avoid[s], avoid[t]
                # (i): avoid-set dominance forces coalition preference
                if all(game.value(i, sp) > game.value(i, tp)
                       for sp in avs for tp in avt):
                    assert game.value(i, s) > game.value(i, t)
                # (ii): shared avoid set plus larger size forces weak preference
                if avs & avt and size(s) >= size(t):
                    assert game.value(i, s) >= game.value(i, t)


def test_gen_pair_values_strict_rows():
    rng = random.Random(1)
    pv = gen_pair_values(rng, "w", 8)
    assert pv.is_strict()
    for i in range(8):
        off = [pv.rows[i][j] for j in range(8) if j != i]
        assert len(set(off)) == 7
    assert all(pv.singleton(i) == 0 for i in range(8))


def test_gen_anonymous_single_peaked():
    rng = random.Random(1)
    tab = gen_anonymous(rng, 7, single_peaked=True)
    for i in range(7):
        row = tab.rows[i]
        peak = max(range(7), key=lambda k: (row[k], k))
        for k in range(peak):
            assert row[k] <= row[k + 1]
        for k in range(peak, 6):
            assert row[k] >= row[k + 1]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_alpha_keeps_b_games_in_order(seed):
    rng = random.Random(seed)
    n = 5
    pv = gen_pair_values(rng, "b", n)
    alpha = b_game_alpha(n)
    assert 0 < alpha * (n - 1) < Fraction(1, 2)
    i = 0
    for s in iter_coalitions(n):
        if s >> i & 1 and s != 1 << i:
            best = max(pv.rows[i][j] for j in range(n) if j != i and s >> j & 1)
            v = eval_b_game(pv, i, s)
            assert best - Fraction(1, 2) < v <= best


def test_instance_json_round_trip():
    rng = random.Random(6)
    for tag, inst in [
        ("w", gen_pair_values(rng, "w", 5)),
        ("anonymous", gen_anonymous(rng, 5)),
        ("ea", gen_friend_graph(rng, 5, 0.4)),
        ("size-decreasing", gen_size_decreasing(rng, 4)),
    ]:
        text = instance_to_json(tag, inst)
        tag2, inst2 = instance_from_json(text)
        assert tag2 == tag
        assert inst2 == inst


def test_anonymous_i2_json_preserves_rationals():
    text = instance_to_json("anonymous", anonymous_i1())
    _, back = instance_from_json(text)
    assert back.value(5, 5) == Fraction(9, 2)
