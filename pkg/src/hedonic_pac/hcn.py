"""Hedonic coalition nets: weighted propositional rules over membership.

A net gives every player a list of ``formula -> value`` rules; a player's
valuation of a coalition is the sum of the values of the rules the
coalition satisfies. Formulas are built from membership atoms ``x<j>``,
cardinality atoms ``card=<k>`` / ``card>=<k>`` (which stand in for the
much larger purely propositional size formulas), constants and the usual
connectives. Decision lists can appear wherever a formula can.

The text format, one net per file::

    player 0 {
        x1 & !x2 -> 3;
        card=3 -> 5.0;
        dl { x1 => 1; T => 0; } -> 1/2;
    }
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .coalitions import Number, check_player_count, members, size
from .games import PairValues, AnonymousTable, b_game_alpha


# ---------------------------------------------------------------------------
# Formula AST

@dataclass(frozen=True)
class Var:
    index: int

    def satisfied_by(self, coalition: int) -> bool:
        return bool(coalition >> self.index & 1)

    def _key(self):
        return (0, self.index)


@dataclass(frozen=True)
class CardEq:
    k: int

    def satisfied_by(self, coalition: int) -> bool:
        return size(coalition) == self.k

    def _key(self):
        return (1, self.k)


@dataclass(frozen=True)
class CardGe:
    k: int

    def satisfied_by(self, coalition: int) -> bool:
        return size(coalition) >= self.k

    def _key(self):
        return (2, self.k)


@dataclass(frozen=True)
class TrueConst:
    def satisfied_by(self, coalition: int) -> bool:
        return True

    def _key(self):
        return (3,)


@dataclass(frozen=True)
class FalseConst:
    def satisfied_by(self, coalition: int) -> bool:
        return False

    def _key(self):
        return (4,)


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def satisfied_by(self, coalition: int) -> bool:
        return not self.child.satisfied_by(coalition)

    def _key(self):
        return (5, self.child._key())


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("conjunction needs at least two operands")

    def satisfied_by(self, coalition: int) -> bool:
        return all(c.satisfied_by(coalition) for c in self.children)

    def _key(self):
        return (6, tuple(c._key() for c in self.children))


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("disjunction needs at least two operands")

    def satisfied_by(self, coalition: int) -> bool:
        return any(c.satisfied_by(coalition) for c in self.children)

    def _key(self):
        return (7, tuple(c._key() for c in self.children))


Formula = Union[Var, CardEq, CardGe, TrueConst, FalseConst, Not, And, Or]

TRUE = TrueConst()
FALSE = FalseConst()


def conj(*parts: Formula) -> Formula:
    """And of the parts, collapsing the 0- and 1-operand cases."""
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def eval_formula(phi: "Formula | DecisionList", coalition: int) -> bool:
    return phi.satisfied_by(coalition)


def canonical(phi: Formula) -> Formula:
    """Flatten nested same-operator chains and sort operands; the printer
    emits only canonical formulas so round-trips are byte-stable."""
    if isinstance(phi, Not):
        return Not(canonical(phi.child))
    if isinstance(phi, (And, Or)):
        op = type(phi)
        flat: list[Formula] = []
        for child in phi.children:
            child = canonical(child)
            if isinstance(child, op):
                flat.extend(child.children)
            else:
                flat.append(child)
        flat.sort(key=lambda f: f._key())
        return op(tuple(flat))
    return phi


# ---------------------------------------------------------------------------
# Decision lists

Literal = tuple[int, bool]  # (variable index, positive?)


class DLRule(NamedTuple):
    literals: tuple[Literal, ...]  # empty tuple is the constant true
    output: int

    def matches(self, coalition: int) -> bool:
        for var, positive in self.literals:
            if bool(coalition >> var & 1) != positive:
                return False
        return True


@dataclass(frozen=True)
class DecisionList:
    """First-match rule list; the final rule must be the constant true."""

    rules: tuple[DLRule, ...]

    def __post_init__(self) -> None:
        if not self.rules or self.rules[-1].literals:
            raise ValueError("a decision list must end with a 'true' rule")
        for rule in self.rules:
            if rule.output not in (0, 1):
                raise ValueError("decision list outputs must be bits")
            seen = set()
            for var, _ in rule.literals:
                if var in seen:
                    raise ValueError(f"variable x{var} repeated in a conjunction")
                seen.add(var)

    def max_conjunction_size(self) -> int:
        return max(len(r.literals) for r in self.rules)

    def satisfied_by(self, coalition: int) -> bool:
        return eval_dl(self, coalition) == 1

    def _key(self):
        return (8, tuple((r.literals, r.output) for r in self.rules))


def eval_dl(dl: DecisionList, coalition: int) -> int:
    for rule in dl.rules:
        if rule.matches(coalition):
            return rule.output
    raise AssertionError("unreachable: terminal rule always matches")


def merge_decision_lists(first: DecisionList, second: DecisionList) -> DecisionList:
    """Concatenate before the terminal rule: the first list's non-terminal
    rules take precedence, then the second list decides."""
    return DecisionList(first.rules[:-1] + second.rules)


# ---------------------------------------------------------------------------
# Nets

class Rule(NamedTuple):
    condition: "Formula | DecisionList"
    value: Number


@dataclass(frozen=True)
class HedonicNet:
    """Per-player rule lists; evaluation sums the satisfied rules' values."""

    n: int
    player_rules: tuple[tuple[Rule, ...], ...]

    def __post_init__(self) -> None:
        check_player_count(self.n)
        if len(self.player_rules) != self.n:
            raise ValueError("need one rule list per player")

    def rules_for(self, player: int) -> tuple[Rule, ...]:
        return self.player_rules[player]


def hcn_value(net: HedonicNet, player: int, coalition: int) -> Number:
    """Sum of the values of player's satisfied rules; empty sum is 0."""
    if not coalition >> player & 1:
        raise ValueError(f"player {player} is not a member of {members(coalition)}")
    total: Number = 0
    for condition, value in net.player_rules[player]:
        if condition.satisfied_by(coalition):
            total = total + value
    return total


@dataclass(frozen=True)
class FirstMatchNet:
    """A learned single-player net evaluated by the first matching rule.

    Produced by the decision-list learner, whose per-value lists are only
    guaranteed disjoint on the training sample; first-match makes the
    off-sample behaviour well defined. ``per_member_discount`` re-applies
    a known size penalty that was stripped before learning (0 for classes
    without one). Coalitions matching no rule evaluate to the discount
    alone.
    """

    player: int
    rules: tuple[tuple[DecisionList, Number], ...]
    per_member_discount: Number = 0

    def base_value(self, coalition: int) -> Number:
        for dl, value in self.rules:
            if eval_dl(dl, coalition):
                return value
        return 0

    def value(self, coalition: int) -> Number:
        if not coalition >> self.player & 1:
            raise ValueError(f"player {self.player} is not a member of {members(coalition)}")
        return self.base_value(coalition) - self.per_member_discount * (size(coalition) - 1)


# ---------------------------------------------------------------------------
# Class-specific net constructions

def to_hcn(tag: str, instance, alpha: Fraction | None = None) -> HedonicNet:
    """Compact net whose evaluation matches the native evaluator exactly
    on every (player, coalition) pair, singletons included.

    Worst/best-member chains require strict rows; size-based classes use
    cardinality atoms.
    """
    if tag == "as":
        return _as_net(instance)
    if tag == "fractional":
        return _fractional_net(instance)
    if tag == "anonymous":
        return _anonymous_net(instance)
    if tag == "w":
        return _w_net(instance)
    if tag == "b":
        return _b_net(instance, alpha)
    raise ValueError(f"no net construction for game class {tag!r}")


def _as_net(pv: PairValues) -> HedonicNet:
    per_player = []
    for i in range(pv.n):
        per_player.append(tuple(
            Rule(Var(j), Fraction(pv.rows[i][j])) for j in range(pv.n) if j != i
        ))
    return HedonicNet(pv.n, tuple(per_player))


def _fractional_net(pv: PairValues) -> HedonicNet:
    n = pv.n
    per_player = []
    for i in range(n):
        rules = []
        for k in range(2, n + 1):
            for j in range(n):
                if j != i:
                    rules.append(Rule(conj(Var(j), CardEq(k)), Fraction(pv.rows[i][j], k)))
        per_player.append(tuple(rules))
    return HedonicNet(n, tuple(per_player))


def _anonymous_net(tab: AnonymousTable) -> HedonicNet:
    per_player = []
    for i in range(tab.n):
        per_player.append(tuple(
            Rule(CardEq(k), Fraction(tab.rows[i][k - 1])) for k in range(1, tab.n + 1)
        ))
    return HedonicNet(tab.n, tuple(per_player))


def _alone_rule(n: int, i: int, value: Number) -> Rule:
    # Fires exactly on the singleton {i}: nobody else is present.
    return Rule(conj(*(Not(Var(j)) for j in range(n) if j != i)), Fraction(value))


def _w_net(pv: PairValues) -> HedonicNet:
    if not pv.is_strict():
        raise ValueError("worst-member chain construction requires strict rows")
    n = pv.n
    per_player = []
    for i in range(n):
        order = pv.preference_order(i, descending=True)  # order[0] is i's best
        rules = []
        for t in range(n - 2, -1, -1):
            worse = [Not(Var(j)) for j in order[t + 1:]]
            rules.append(Rule(conj(Var(order[t]), *worse), Fraction(pv.rows[i][order[t]])))
        rules.append(_alone_rule(n, i, pv.singleton(i)))
        per_player.append(tuple(rules))
    return HedonicNet(n, tuple(per_player))


def _b_net(pv: PairValues, alpha: Fraction | None) -> HedonicNet:
    if not pv.is_strict():
        raise ValueError("best-member chain construction requires strict rows")
    if alpha is None:
        alpha = b_game_alpha(pv.n)
    n = pv.n
    per_player = []
    for i in range(n):
        order = pv.preference_order(i, descending=True)
        rules = []
        for t in range(n - 1):
            better = [Not(Var(j)) for j in order[:t]]
            rules.append(Rule(conj(Var(order[t]), *better), Fraction(pv.rows[i][order[t]])))
        # Per-member size penalty; these fire on top of the chain rule.
        for j in range(n):
            if j != i:
                rules.append(Rule(Var(j), -alpha))
        rules.append(_alone_rule(n, i, pv.singleton(i)))
        per_player.append(tuple(rules))
    return HedonicNet(n, tuple(per_player))


def exclusive_rules(tag: str, rules: tuple[Rule, ...]) -> tuple[Rule, ...]:
    """The mutually exclusive subset of a constructed rule list.

    For worst-member and anonymous nets that is every rule; best-member
    nets additionally carry the overlapping per-member penalty rules,
    which sit between the chain and the singleton rule and are skipped
    here.
    """
    if tag != "b":
        return rules
    chain_len = (len(rules) - 1) // 2
    return rules[:chain_len] + (rules[-1],)


# ---------------------------------------------------------------------------
# Printer

def format_value(v: Number) -> str:
    if isinstance(v, float):
        v = Fraction(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def _fmt_atom(phi: Formula) -> str:
    if isinstance(phi, Var):
        return f"x{phi.index}"
    if isinstance(phi, CardEq):
        return f"card={phi.k}"
    if isinstance(phi, CardGe):
        return f"card>={phi.k}"
    if isinstance(phi, TrueConst):
        return "T"
    if isinstance(phi, FalseConst):
        return "F"
    raise TypeError(f"not an atom: {phi!r}")


def _fmt(phi: "Formula | DecisionList", level: int) -> str:
    # level: 0 = or, 1 = and, 2 = unary/atom
    if isinstance(phi, DecisionList):
        return format_decision_list(phi)
    if isinstance(phi, Or):
        text = " | ".join(_fmt(c, 1) for c in phi.children)
        return f"({text})" if level > 0 else text
    if isinstance(phi, And):
        text = " & ".join(_fmt(c, 2) for c in phi.children)
        return f"({text})" if level > 1 else text
    if isinstance(phi, Not):
        return "!" + _fmt(phi.child, 2)
    return _fmt_atom(phi)


def format_formula(phi: "Formula | DecisionList") -> str:
    if isinstance(phi, DecisionList):
        return format_decision_list(phi)
    return _fmt(canonical(phi), 0)


def format_decision_list(dl: DecisionList) -> str:
    parts = []
    for literals, output in dl.rules:
        if literals:
            lhs = " & ".join(("" if pos else "!") + f"x{var}"
                             for var, pos in sorted(literals))
        else:
            lhs = "T"
        parts.append(f"{lhs} => {output};")
    return "dl { " + " ".join(parts) + " }"


def format_net(net: HedonicNet) -> str:
    lines = []
    for i, rules in enumerate(net.player_rules):
        lines.append(f"player {i} {{")
        for condition, value in rules:
            lines.append(f"    {format_formula(condition)} -> {format_value(value)};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def format_first_match_net(net: FirstMatchNet, n: int) -> str:
    """Serialize a learned net as an ordinary net file: the ordered dl
    rules, then explicit per-member penalty rules for any stripped size
    discount. Summed evaluation agrees with first-match on any coalition
    the training sample covered."""
    lines = [f"player {net.player} {{"]
    for dl, value in net.rules:
        lines.append(f"    {format_decision_list(dl)} -> {format_value(value)};")
    if net.per_member_discount:
        for j in range(n):
            if j != net.player:
                lines.append(f"    x{j} -> {format_value(-net.per_member_discount)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parser

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class _Token(NamedTuple):
    kind: str  # 'ident', 'int', 'number', or a literal symbol
    text: str
    line: int
    column: int


_SYMBOLS = ("->", "=>", ">=", "{", "}", "(", ")", ";", "!", "&", "|", "=")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < length and text[i] != "\n":
                i += 1
            continue
        matched = False
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                matched = True
                break
        if matched:
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < length and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < length and text[i + 1].isdigit()):
            j = i + 1
            while j < length and (text[j].isdigit() or text[j] in "./"):
                j += 1
            word = text[i:j]
            kind = "int" if word.lstrip("-").isdigit() else "number"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text!r}", tok)
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(message, tok.line, tok.column)

    # formula := or_expr
    def formula(self) -> "Formula | DecisionList":
        return self.or_expr()

    def or_expr(self):
        parts = [self.and_expr()]
        while self.peek().kind == "|":
            self.next()
            parts.append(self.and_expr())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(self._plain(p) for p in parts))

    def and_expr(self):
        parts = [self.unary()]
        while self.peek().kind == "&":
            self.next()
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        return And(tuple(self._plain(p) for p in parts))

    def _plain(self, phi):
        if isinstance(phi, DecisionList):
            self.fail("decision lists cannot be combined with connectives")
        return phi

    def unary(self):
        if self.peek().kind == "!":
            tok = self.next()
            child = self.unary()
            if isinstance(child, DecisionList):
                self.fail("decision lists cannot be negated", tok)
            return Not(child)
        return self.atom()

    def atom(self):
        tok = self.next()
        if tok.kind == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            if tok.text == "T":
                return TRUE
            if tok.text == "F":
                return FALSE
            if tok.text == "card":
                op = self.next()
                if op.kind not in ("=", ">="):
                    self.fail("expected '=' or '>=' after 'card'", op)
                k = int(self.expect("int").text)
                if k < 1:
                    self.fail("cardinality parameter must be at least 1", op)
                return CardEq(k) if op.kind == "=" else CardGe(k)
            if tok.text == "dl":
                return self.decision_list(tok)
            if tok.text.startswith("x") and tok.text[1:].isdigit():
                return Var(int(tok.text[1:]))
            self.fail(f"malformed atom {tok.text!r}", tok)
        self.fail(f"expected a formula, found {tok.text!r}", tok)

    def decision_list(self, opener: _Token) -> DecisionList:
        self.expect("{")
        rules = []
        saw_terminal = False
        while self.peek().kind != "}":
            literals = self.conjunction()
            self.expect("=>")
            bit_tok = self.expect("int")
            if bit_tok.text not in ("0", "1"):
                self.fail("decision list output must be 0 or 1", bit_tok)
            self.expect(";")
            rules.append(DLRule(literals, int(bit_tok.text)))
            if not literals:
                saw_terminal = True
                break
        self.expect("}")
        if not saw_terminal:
            self.fail("decision list must end with a 'T => bit;' rule", opener)
        return DecisionList(tuple(rules))

    def conjunction(self) -> tuple[Literal, ...]:
        first = self.peek()
        if first.kind == "ident" and first.text == "T":
            self.next()
            return ()
        literals = [self.literal()]
        while self.peek().kind == "&":
            self.next()
            literals.append(self.literal())
        return tuple(sorted(literals))

    def literal(self) -> Literal:
        positive = True
        if self.peek().kind == "!":
            self.next()
            positive = False
        tok = self.expect("ident")
        if tok.text.startswith("x") and tok.text[1:].isdigit():
            return (int(tok.text[1:]), positive)
        self.fail(f"expected a variable literal, found {tok.text!r}", tok)

    def number(self) -> Fraction:
        tok = self.next()
        if tok.kind not in ("int", "number"):
            self.fail(f"expected a number, found {tok.text!r}", tok)
        try:
            return Fraction(tok.text)
        except (ValueError, ZeroDivisionError):
            self.fail(f"bad numeric literal {tok.text!r}", tok)

    def net(self) -> HedonicNet:
        per_player: dict[int, list[Rule]] = {}
        max_index = -1
        while self.peek().kind != "eof":
            tok = self.expect("ident")
            if tok.text != "player":
                self.fail(f"expected 'player', found {tok.text!r}", tok)
            idx = int(self.expect("int").text)
            if idx < 0:
                self.fail(f"player index must be non-negative, got {idx}", tok)
            if idx in per_player:
                self.fail(f"duplicate block for player {idx}", tok)
            max_index = max(max_index, idx)
            self.expect("{")
            rules = []
            while self.peek().kind != "}":
                condition = self.formula()
                self.expect("->")
                value = self.number()
                self.expect(";")
                rules.append(Rule(condition, value))
                max_index = max(max_index, _max_var(condition))
            self.expect("}")
            per_player[idx] = rules
        if max_index < 0:
            self.fail("empty net: no player blocks")
        n = max_index + 1
        return HedonicNet(n, tuple(tuple(per_player.get(i, [])) for i in range(n)))


def _max_var(phi: "Formula | DecisionList") -> int:
    if isinstance(phi, Var):
        return phi.index
    if isinstance(phi, Not):
        return _max_var(phi.child)
    if isinstance(phi, (And, Or)):
        return max(_max_var(c) for c in phi.children)
    if isinstance(phi, DecisionList):
        return max((var for rule in phi.rules for var, _ in rule.literals), default=-1)
    return -1


def parse_formula(text: str) -> "Formula | DecisionList":
    parser = _Parser(text)
    phi = parser.formula()
    tok = parser.peek()
    if tok.kind != "eof":
        parser.fail(f"unexpected trailing input {tok.text!r}", tok)
    return canonical(phi) if not isinstance(phi, DecisionList) else phi


def parse_net(text: str) -> HedonicNet:
    net = _Parser(text).net()
    normalized = tuple(
        tuple(Rule(c if isinstance(c, DecisionList) else canonical(c), v) for c, v in rules)
        for rules in net.player_rules
    )
    return HedonicNet(net.n, normalized)
