"""Consistent-hypothesis learners and the pseudo-shattering oracle.

Every learner returns a hypothesis that reproduces its sample exactly;
configurations the sample never reveals are filled with the ``NEG_INF``
sentinel, which compares below every number but refuses arithmetic. The
sklearn-style estimator wrappers at the bottom expose the same algorithms
with fit/predict surfaces.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import ceil
from typing import Callable, Iterable, Iterator, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .coalitions import (
    GuardLimitError,
    LabeledSample,
    Number,
    check_player_count,
    coalition_of,
    contains,
    members,
    size,
)
from .distributions import floor_log2_inv
from .games import AnonymousTable, PairValues
from .hcn import DecisionList, DLRule, FirstMatchNet, Formula, Rule


class NotInClassError(ValueError):
    """The sample cannot come from the hypothesis class being learned."""


class NotRepresentableError(ValueError):
    """No hypothesis in the representation class fits the labeled sample."""


class _NegInf:
    """Strictly below every number; arithmetic with it is a bug, so none
    is defined. Distinct from an undefined valuation, which raises."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInf)

    def __eq__(self, other):
        return isinstance(other, _NegInf)

    def __hash__(self):
        return hash("NEG_INF")

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInf()


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals

def solve_linear_system(matrix: list[list[Fraction]], rhs: list[Fraction]
                        ) -> list[Fraction] | None:
    """Gaussian elimination over Fractions; free variables are fixed to 0.

    Returns None when the system is inconsistent. Pivots on the largest
    absolute entry in the column, which only affects intermediate
    fraction sizes, never the result.
    """
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    n_rows = len(rows)
    n_cols = len(matrix[0]) if matrix else 0
    pivot_cols: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot = max(range(r, n_rows), key=lambda k: abs(rows[k][c]), default=None)
        if pivot is None or rows[pivot][c] == 0:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for k in range(n_rows):
            if k != r and rows[k][c]:
                factor = rows[k][c]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == n_rows:
            break
    for k in range(r, n_rows):
        if rows[k][n_cols] != 0:
            return None
    solution = [Fraction(0)] * n_cols
    for row_idx, c in enumerate(pivot_cols):
        solution[c] = rows[row_idx][n_cols]
    return solution


def learn_hcn_linear(formulas: Sequence[Formula], sample: LabeledSample,
                     player: int) -> list[Fraction]:
    """Rule values for a known formula set, solved exactly.

    Each sampled coalition containing the player contributes one linear
    equation: the satisfied formulas' values must sum to the observed
    valuation. Underdetermined systems fix the free values at 0;
    inconsistent ones mean the sample is not realizable with these
    formulas.
    """
    entries = sample.restricted_to(player)
    if not entries:
        return [Fraction(0)] * len(formulas)
    matrix = [[Fraction(1 if phi.satisfied_by(e.coalition) else 0) for phi in formulas]
              for e in entries]
    rhs = [Fraction(e.values[player]) for e in entries]
    beta = solve_linear_system(matrix, rhs)
    if beta is None:
        raise NotInClassError(
            f"sample for player {player} is not realizable with the given formulas"
        )
    return beta


def linear_rules(formulas: Sequence[Formula], beta: Sequence[Fraction]) -> tuple[Rule, ...]:
    return tuple(Rule(phi, b) for phi, b in zip(formulas, beta))


# ---------------------------------------------------------------------------
# Decision lists

def _conjunctions(n: int, k: int) -> list[tuple[tuple, int, int]]:
    # All conjunctions of at most k literals, size ascending then
    # lexicographic; precompiled to (literals, positive mask, negative mask).
    out = []
    for sz in range(k + 1):
        for vars_combo in combinations(range(n), sz):
            for signs in product((True, False), repeat=sz):
                literals = tuple(zip(vars_combo, signs))
                pos = coalition_of(v for v, s in literals if s)
                neg = coalition_of(v for v, s in literals if not s)
                out.append((literals, pos, neg))
    return out


def learn_k_dl(k: int, labeled: Iterable[tuple[int, int]],
               n: int | None = None) -> DecisionList:
    """Greedy peeling of uniformly labeled conjunctions (at most k literals).

    Scans the conjunction list in a fixed order and peels the first one
    whose non-empty set of matching points shares a label; repeats until
    the sample is exhausted. Succeeds whenever some k-DL is consistent
    with the labeling.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    points = [(mask, int(bit)) for mask, bit in labeled]
    for mask, bit in points:
        if bit not in (0, 1):
            raise ValueError("labels must be bits")
    if n is None:
        n = max((mask.bit_length() for mask, _ in points), default=1)
    check_player_count(n)

    remaining = points
    rules: list[DLRule] = []
    conjunctions = _conjunctions(n, k)
    while remaining:
        for literals, pos, neg in conjunctions:
            matched_label = None
            uniform = True
            for mask, bit in remaining:
                if mask & pos == pos and mask & neg == 0:
                    if matched_label is None:
                        matched_label = bit
                    elif matched_label != bit:
                        uniform = False
                        break
            if uniform and matched_label is not None:
                rules.append(DLRule(literals, matched_label))
                remaining = [(mask, bit) for mask, bit in remaining
                             if not (mask & pos == pos and mask & neg == 0)]
                break
        else:
            raise NotRepresentableError(
                f"no conjunction of at most {k} literals is uniformly labeled; "
                "the sample is not k-DL-representable"
            )
    if not rules or rules[-1].literals:
        rules.append(DLRule((), 0))
    return DecisionList(tuple(rules))


def learn_hcn_kdl(k: int, sample: LabeledSample, player: int,
                  per_member_discount: Number = 0,
                  n: int | None = None) -> FirstMatchNet:
    """One decision list per distinct observed value, first-match semantics.

    Values are grouped after removing any known per-member size discount
    (non-zero only for best-member games, whose size penalty would
    otherwise scatter each best-player class across sizes and break
    1-DL learnability); the discount is re-applied on evaluation.
    """
    entries = sample.restricted_to(player)
    if n is None:
        n = sample.n or max((e.coalition.bit_length() for e in entries), default=1)
    discount = Fraction(per_member_discount) if per_member_discount else 0
    adjusted: list[tuple[int, Number]] = []
    for e in entries:
        v = Fraction(e.values[player]) if discount else e.values[player]
        adjusted.append((e.coalition, v + discount * (size(e.coalition) - 1)))

    betas: list[Number] = []
    for _, v in adjusted:
        if v not in betas:
            betas.append(v)
    rules = []
    for beta in betas:
        labeled = [(mask, 1 if v == beta else 0) for mask, v in adjusted]
        rules.append((learn_k_dl(k, labeled, n=n), beta))
    return FirstMatchNet(player, tuple(rules), per_member_discount=discount)


# ---------------------------------------------------------------------------
# Table learners

def learn_anonymous(sample: LabeledSample, n: int) -> AnonymousTable:
    """Size-indexed values copied from the sample, sentinel elsewhere."""
    check_player_count(n)
    rows = [[NEG_INF] * n for _ in range(n)]
    for entry in sample:
        k = size(entry.coalition)
        for i, v in entry.values.items():
            current = rows[i][k - 1]
            if current is NEG_INF:
                rows[i][k - 1] = v
            elif current != v:
                raise NotInClassError(
                    f"player {i} values two size-{k} coalitions differently; "
                    "sample is not anonymous"
                )
    return AnonymousTable(n, tuple(tuple(r) for r in rows))


def learn_w_games(n: int, sample: LabeledSample) -> PairValues:
    """Pairwise estimates for worst-member games.

    v*_i(j) is the best observed value of any sampled coalition holding
    both i and j (that coalition's worst member can only be as good as
    j), sentinel when the pair was never seen together. Diagonal slots
    stay sentinel: singletons are not learned here.
    """
    check_player_count(n)
    rows = [[NEG_INF] * n for _ in range(n)]
    for entry in sample:
        mset = members(entry.coalition)
        for i in mset:
            v = entry.values[i]
            row = rows[i]
            for j in mset:
                if j != i and (row[j] is NEG_INF or v > row[j]):
                    row[j] = v
    return PairValues(n, tuple(tuple(r) for r in rows))


def is_eps_estimate(vstar: PairValues, vtrue: PairValues, eps, player: int) -> bool:
    """Exact on the floor(log2(1/eps)) least preferred players, strictly
    above the last of them everywhere else.

    Ranks are taken from the true row (strict, so unambiguous); sentinel
    estimates fail both conditions.
    """
    order = vtrue.preference_order(player, descending=False)  # least preferred first
    level = floor_log2_inv(eps)
    star_row = vstar.rows[player]
    true_row = vtrue.rows[player]
    for j in order[:level]:
        if not star_row[j] == true_row[j]:
            return False
    if level == 0 or level >= len(order):
        return True
    threshold = true_row[order[level - 1]]
    for j in order[level:]:
        if not star_row[j] > threshold:
            return False
    return True


def is_eps_estimate_all(vstar: PairValues, vtrue: PairValues, eps) -> bool:
    return all(is_eps_estimate(vstar, vtrue, eps, i) for i in range(vtrue.n))


# ---------------------------------------------------------------------------
# Pseudo-shattering

def pseudo_shatters(hypotheses: Iterable[Callable[[int], Number]],
                    pairs: Sequence[tuple[int, Number]],
                    guard: int = 20) -> bool:
    """True iff the finite family realizes all 2^q labelings of the
    (coalition, threshold) pairs via f(S) > r."""
    q = len(pairs)
    if q > guard:
        raise GuardLimitError(f"shattering check limited to {guard} pairs, got {q}")
    target = 1 << q
    seen: set[int] = set()
    for f in hypotheses:
        labeling = 0
        for idx, (coalition, threshold) in enumerate(pairs):
            if f(coalition) > threshold:
                labeling |= 1 << idx
        seen.add(labeling)
        if len(seen) == target:
            return True
    return False


def size_decreasing_witness(n: int, player: int, threshold: Number = 0
                            ) -> tuple[list[tuple[int, Number]], Iterator[Callable[[int], int]]]:
    """Shattering witness for games where smaller is always better.

    The instance is every ceil(n/2)-size coalition containing the player,
    all thresholded at 0. The family fixes values of other sizes in
    bands (smaller sizes strictly above, larger strictly below) and lets
    the mid-size values range over {-1, +1}: all of its members order
    sizes strictly decreasingly, yet they realize every labeling.
    """
    mid = ceil(n / 2)
    pool = [c for c in range(1, 1 << n)
            if contains(c, player) and size(c) == mid]
    pairs = [(c, threshold) for c in pool]

    def family() -> Iterator[Callable[[int], int]]:
        for signs in product((-1, 1), repeat=len(pool)):
            chosen = dict(zip(pool, signs))

            def f(coalition: int, chosen=chosen) -> int:
                s = size(coalition)
                if s < mid:
                    return 2 + (mid - s)
                if s > mid:
                    return -2 - (s - mid)
                return chosen.get(coalition, 0)

            yield f

    return pairs, family()


def anonymous_value_grid(n: int, grid: Sequence[Number]) -> Iterator[Callable[[int], Number]]:
    """Every size-indexed valuation with values drawn from the grid."""
    for combo in product(grid, repeat=n):
        yield lambda coalition, combo=combo: combo[size(coalition) - 1]


# ---------------------------------------------------------------------------
# Estimator wrappers

def as_labeled_sample(X, n: int | None = None) -> LabeledSample:
    if isinstance(X, LabeledSample):
        return X
    return LabeledSample.from_pairs(X, n)


def _fitted(estimator, attribute: str):
    value = getattr(estimator, attribute, None)
    if value is None:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit first"
        )
    return value


class HcnLinearLearner(BaseEstimator):
    """Net learner for a single player with a priori known formulas."""

    def __init__(self, formulas: Sequence[Formula], player: int = 0):
        self.formulas = formulas
        self.player = player

    def fit(self, X, y=None):
        sample = as_labeled_sample(X)
        self.coefficients_ = learn_hcn_linear(self.formulas, sample, self.player)
        self.rules_ = linear_rules(self.formulas, self.coefficients_)
        return self

    def value(self, coalition: int) -> Fraction:
        rules = _fitted(self, "rules_")
        return sum((v for phi, v in rules if phi.satisfied_by(coalition)),
                   Fraction(0))

    def predict(self, X):
        return [self.value(c if isinstance(c, int) else coalition_of(c)) for c in X]


class KDecisionListLearner(BaseEstimator):
    """Binary classifier over coalitions in k-decision-list form."""

    def __init__(self, k: int = 1, n: int | None = None):
        self.k = k
        self.n = n

    def fit(self, X, y):
        masks = [c if isinstance(c, int) else coalition_of(c) for c in X]
        self.decision_list_ = learn_k_dl(self.k, zip(masks, y), n=self.n)
        return self

    def predict(self, X):
        dl = _fitted(self, "decision_list_")
        from .hcn import eval_dl

        return [eval_dl(dl, c if isinstance(c, int) else coalition_of(c)) for c in X]


class HcnKdlLearner(BaseEstimator):
    """Single-player net learner in k-DL form (one list per value)."""

    def __init__(self, k: int = 1, player: int = 0, per_member_discount: Number = 0,
                 n: int | None = None):
        self.k = k
        self.player = player
        self.per_member_discount = per_member_discount
        self.n = n

    def fit(self, X, y=None):
        sample = as_labeled_sample(X, self.n)
        self.net_ = learn_hcn_kdl(self.k, sample, self.player,
                                  per_member_discount=self.per_member_discount,
                                  n=self.n)
        return self

    def value(self, coalition: int) -> Number:
        return _fitted(self, "net_").value(coalition)

    def predict(self, X):
        return [self.value(c if isinstance(c, int) else coalition_of(c)) for c in X]


class AnonymousLearner(BaseEstimator):
    """Size-table learner for anonymous games."""

    def __init__(self, n: int):
        self.n = n

    def fit(self, X, y=None):
        self.table_ = learn_anonymous(as_labeled_sample(X, self.n), self.n)
        return self

    def value(self, player: int, coalition: int) -> Number:
        return _fitted(self, "table_").value(player, size(coalition))

    def predict(self, X):
        return [self.value(i, c) for i, c in X]


class WGamesLearner(BaseEstimator):
    """Pairwise-value learner for worst-member games."""

    def __init__(self, n: int):
        self.n = n

    def fit(self, X, y=None):
        self.pair_values_ = learn_w_games(self.n, as_labeled_sample(X, self.n))
        return self

    def value(self, player: int, coalition: int) -> Number:
        pv = _fitted(self, "pair_values_")
        return min(pv.rows[player][j] for j in members(coalition) if j != player) \
            if coalition != 1 << player else pv.singleton(player)

    def predict(self, X):
        return [self.value(i, c) for i, c in X]
