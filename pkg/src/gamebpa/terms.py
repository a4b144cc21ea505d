"""Process terms, equality modulo AC of ``+``, the termination weight, and
game-role declarations.

Terms are immutable and hash-consed only in the weak sense that every node
caches its hash at construction; structural equality is the only equality.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"delta"})

# Tag order doubles as the canonical structural order between constructors.
_DEADLOCK, _ACTION, _SEQ, _ALT, _OPPALT, _PLAY = "012345"


class Term:
    # _canon: known to be its own ac_flatten image (set lazily, never unset)
    __slots__ = ("_hash", "_key", "_canon")

    tag: str = "?"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return _structurally_equal(self, other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import print_term

        return f"<{type(self).__name__} {print_term(self)}>"

    @property
    def children(self) -> tuple["Term", ...]:
        return ()

    def sort_key(self) -> str:
        """Prefix-free string encoding whose lexicographic order is the
        canonical structural order (Deadlock < Action < Seq < Alt < OppAlt < Play,
        then children left to right)."""
        try:
            return self._key
        except AttributeError:
            pass
        key = self._make_key()
        self._key = key
        return key

    def _make_key(self) -> str:
        raise NotImplementedError


class Deadlock(Term):
    __slots__ = ()
    tag = _DEADLOCK

    def __init__(self):
        self._hash = hash(_DEADLOCK)
        self._canon = True

    def _make_key(self):
        return _DEADLOCK


class Action(Term):
    __slots__ = ("name",)
    tag = _ACTION

    def __init__(self, name: str):
        if not isinstance(name, str) or not LABEL_RE.match(name):
            raise ValueError(f"invalid action label {name!r}")
        if name in RESERVED:
            raise ValueError(f"{name!r} is a reserved word, not an action label")
        self.name = name
        self._hash = hash((_ACTION, name))
        self._canon = True

    def _make_key(self):
        # "!" sorts below every identifier character, so "a" < "ab".
        return _ACTION + self.name + "!"


class Binary(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        if not isinstance(left, Term) or not isinstance(right, Term):
            raise TypeError("operands must be process terms")
        self.left = left
        self.right = right
        self._hash = hash((self.tag, left._hash, right._hash))
        self._canon = False

    @property
    def children(self):
        return (self.left, self.right)

    def _make_key(self):
        return self.tag + self.left.sort_key() + self.right.sort_key()


class Seq(Binary):
    __slots__ = ()
    tag = _SEQ


class Alt(Binary):
    __slots__ = ()
    tag = _ALT


class OppAlt(Binary):
    __slots__ = ()
    tag = _OPPALT


class Play(Binary):
    __slots__ = ()
    tag = _PLAY


DELTA = Deadlock()


def _structurally_equal(a: Term, b: Term) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y) or x._hash != y._hash:
            return False
        if isinstance(x, Action):
            if x.name != y.name:
                return False
        elif isinstance(x, Binary):
            stack.append((x.right, y.right))
            stack.append((x.left, y.left))
    return True


def seq(*terms: Term) -> Term:
    """Right-nested sequential composition of one or more terms."""
    if not terms:
        raise ValueError("seq() needs at least one term")
    result = terms[-1]
    for t in reversed(terms[:-1]):
        result = Seq(t, result)
    return result


def actions(*names: str) -> Term:
    return seq(*(Action(n) for n in names))


def summands(t: Term) -> list[Term]:
    """Operands of the maximal ``+`` chain rooted at ``t`` (``[t]`` if ``t`` is not a sum)."""
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Alt):
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(node)
    return out


def make_sum(parts: Iterable[Term]) -> Term:
    """Left-nested ``+`` chain over ``parts`` in the given order (prints without parentheses)."""
    it = iter(parts)
    try:
        result = next(it)
    except StopIteration:
        raise ValueError("empty sum") from None
    for p in it:
        result = Alt(result, p)
    return result


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)


def labels(t: Term) -> set[str]:
    return {n.name for n in subterms(t) if isinstance(n, Action)}


def ac_flatten(t: Term) -> Term:
    """Canonical representative of ``t`` modulo associativity and commutativity of ``+``.

    Every maximal ``+`` chain becomes a left-nested chain of its summands sorted by
    :meth:`Term.sort_key` (duplicates kept). Nothing else is rewritten.
    """
    memo: dict[int, Term] = {}
    return _flatten(t, memo)


def _flatten(t: Term, memo: dict[int, Term]) -> Term:
    if t._canon:
        return t
    hit = memo.get(id(t))
    if hit is not None:
        return hit
    if isinstance(t, Alt):
        parts = [_flatten(s, memo) for s in summands(t)]
        parts.sort(key=Term.sort_key)
        out = make_sum(parts)
        if out == t:
            out = t
    elif isinstance(t, Binary):
        left = _flatten(t.left, memo)
        right = _flatten(t.right, memo)
        out = t if (left is t.left and right is t.right) else type(t)(left, right)
    else:
        out = t
    out._canon = True
    memo[id(t)] = out
    return out


def ac_equal(t: Term, u: Term) -> bool:
    return ac_flatten(t) == ac_flatten(u)


def weight(t: Term) -> int:
    """Termination measure: every directed rule application strictly decreases it,
    and AC-equal terms share it.

    ``weight(a) = weight(delta) = 2``, ``s+t -> ws+wt``, ``s.t -> ws**2 * wt``,
    ``s$t -> ws+wt+1``, ``s&t -> (ws*wt)**2``.
    """
    memo: dict[int, int] = {}

    def go(node: Term) -> int:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, (Action, Deadlock)):
            w = 2
        elif isinstance(node, Alt):
            w = sum(go(s) for s in summands(node))
        else:
            left, right = go(node.left), go(node.right)
            if isinstance(node, Seq):
                w = left * left * right
            elif isinstance(node, OppAlt):
                w = left + right + 1
            else:
                w = (left * right) ** 2
        memo[id(node)] = w
        return w

    return go(t)


def initial_labels(t: Term) -> frozenset[str]:
    """Labels of the actions ``t`` can perform first."""
    if isinstance(t, Action):
        return frozenset({t.name})
    if isinstance(t, Deadlock):
        return frozenset()
    if isinstance(t, Seq):
        return initial_labels(t.left)
    if isinstance(t, Play):
        return initial_labels(t.left) & initial_labels(t.right)
    return initial_labels(t.left) | initial_labels(t.right)


def contains(t: Term, kind: type) -> bool:
    return any(isinstance(n, kind) for n in subterms(t))


# --- game roles -------------------------------------------------------------

Role = str


@dataclass(frozen=True)
class GameDeclaration:
    """Which role owns (performs) each action label."""

    players: tuple[Role, ...]
    ownership: dict[str, Role] = field(default_factory=dict)

    def __post_init__(self):
        players = tuple(self.players)
        object.__setattr__(self, "players", players)
        if len(set(players)) < 2 or len(set(players)) != len(players):
            raise ValueError("a game needs at least two distinct roles")
        for label, role in self.ownership.items():
            if role not in players:
                raise ValueError(f"label {label!r} owned by undeclared role {role!r}")

    def owner(self, label: str) -> Role | None:
        return self.ownership.get(label)

    def house(self, role: Role) -> frozenset[str]:
        """All labels owned by ``role``."""
        return frozenset(l for l, r in self.ownership.items() if r == role)

    def others(self, role: Role) -> tuple[Role, ...]:
        return tuple(p for p in self.players if p != role)


@dataclass(frozen=True)
class OwnershipWarning:
    kind: str  # "missing-owner" | "viewer-owned"
    label: str
    message: str


def validate_ownership(t: Term, g: GameDeclaration, viewer: Role) -> list[OwnershipWarning]:
    """Advisory check of a viewer-encoded term against ``g``.

    Reports each label of ``t`` without an owner (once per label), and each
    opponent-choice operand whose initial label the viewer owns itself.
    """
    found: list[OwnershipWarning] = []
    for label in sorted(labels(t)):
        if g.owner(label) is None:
            found.append(OwnershipWarning(
                "missing-owner", label, f"action {label!r} has no owner in the game declaration"))
    for node in subterms(t):
        if not isinstance(node, OppAlt):
            continue
        for operand in (node.left, node.right):
            for label in sorted(initial_labels(operand)):
                if g.owner(label) == viewer:
                    found.append(OwnershipWarning(
                        "viewer-owned", label,
                        f"opponent choice offers {label!r}, which {viewer} owns"))
    return found
