"""Game trees with per-role strategies. Playing strategy terms against each
other should yield the longest common move sequence."""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

from .rewrite import FULL, DEFAULT_STEP_CAP, RewriteTrace, fast_normal_form, normalize, trace_to_json
from .terms import (
    DELTA,
    Action,
    Alt,
    Deadlock,
    GameDeclaration,
    OppAlt,
    Play,
    Role,
    Seq,
    Term,
    ac_equal,
    initial_labels,
)


class GameError(ValueError):
    pass


class GameWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GameTree:
    """A node of a game tree; a node without children is a leaf.

    ``owner`` is the role choosing among ``children``; None for leaves and
    unary steps.
    """

    owner: Role | None = None
    children: tuple[tuple[str, "GameTree"], ...] = ()

    def __post_init__(self):
        moves = [m for m, _ in self.children]
        if len(set(moves)) != len(moves):
            raise GameError(f"duplicate moves out of one node: {sorted(moves)}")
        if len(self.children) > 1 and self.owner is None:
            raise GameError("a branching node needs an owner")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(sub for _, sub in node.children)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def paths(self) -> set[tuple[str, ...]]:
        """Every root-to-node move sequence, including the empty one."""
        out = set()
        stack = [((), self)]
        while stack:
            prefix, node = stack.pop()
            out.add(prefix)
            for move, sub in node.children:
                stack.append((prefix + (move,), sub))
        return out

    def leaf_paths(self) -> list[tuple[str, ...]]:
        out = []
        stack = [((), self)]
        while stack:
            prefix, node = stack.pop()
            if node.is_leaf:
                out.append(prefix)
            for move, sub in reversed(node.children):
                stack.append((prefix + (move,), sub))
        return out


LEAF = GameTree()


@dataclass(frozen=True)
class Strategy:
    role: Role
    subtree: GameTree
    source: GameTree = field(repr=False, compare=False)

    def to_json(self) -> str:
        return json.dumps({"role": self.role,
                           "retained_paths": [list(p) for p in self.subtree.leaf_paths()]})


@dataclass(frozen=True)
class PlaySet:
    traces: frozenset
    maximal: tuple[str, ...] | None


# --- terms to trees -----------------------------------------------------------

def game_tree_from_term(t: Term, g: GameDeclaration, viewer: Role, strict: bool = False) -> GameTree:
    """Unfold a viewer-encoded term into its game tree.

    ``+`` marks choices the viewer makes, ``$`` choices made by others; the
    owner of an opponent choice comes from the labels it offers.
    """
    if viewer not in g.players:
        raise GameError(f"unknown role {viewer!r}")

    def build(node: Term) -> GameTree:
        if isinstance(node, Action):
            return GameTree(None, ((node.name, LEAF),))
        if isinstance(node, Seq):
            return _graft(build(node.left), build(node.right))
        if isinstance(node, (Alt, OppAlt)):
            operands = _chain(node, type(node))
            owner = viewer if isinstance(node, Alt) else _choice_owner(node, g, viewer, strict)
            children = []
            for op in operands:
                sub = build(op)
                if sub.owner is not None and sub.owner != owner and len(sub.children) > 1:
                    raise GameError("a choice mixes moves of different roles")
                children.extend(sub.children)
            return GameTree(owner, tuple(children))
        if isinstance(node, Deadlock):
            raise GameError("game terms cannot contain delta")
        if isinstance(node, Play):
            raise GameError("game terms cannot contain the playing operator")
        raise TypeError(node)

    return build(t)


def _chain(node: Term, kind: type) -> list[Term]:
    out, stack = [], [node]
    while stack:
        n = stack.pop()
        if type(n) is kind:
            stack.append(n.right)
            stack.append(n.left)
        else:
            out.append(n)
    return out


def _graft(tree: GameTree, tail: GameTree) -> GameTree:
    if tree.is_leaf:
        return tail
    return GameTree(tree.owner, tuple((m, _graft(sub, tail)) for m, sub in tree.children))


def _choice_owner(node: OppAlt, g: GameDeclaration, viewer: Role, strict: bool) -> Role:
    offered = initial_labels(node)
    owners = {g.owner(l) for l in offered}
    if len(owners) == 1:
        (owner,) = owners
        if owner is not None and owner != viewer:
            return owner
    if strict and viewer in owners:
        raise GameError(f"{viewer} owns moves of an opponent choice: {sorted(offered)}")
    candidates = owners - {None, viewer}
    if len(g.players) == 2:
        (fallback,) = g.others(viewer)
    elif len(candidates) == 1:
        (fallback,) = candidates
    else:
        raise GameError(f"cannot tell which role chooses among {sorted(offered)}")
    warnings.warn(f"ownership of choice {sorted(offered)} unclear; assuming {fallback}", GameWarning,
                  stacklevel=3)
    return fallback


def tree_to_term(gt: GameTree, viewer: Role) -> Term:
    """Encode a (sub)tree from ``viewer``'s side: its own choices as ``+``,
    everyone else's as ``$``."""
    if gt.is_leaf:
        raise GameError("an empty game tree has no term")

    def go(node: GameTree) -> Term:
        parts = [Action(m) if sub.is_leaf else Seq(Action(m), go(sub)) for m, sub in node.children]
        result = parts[0]
        op = Alt if node.owner == viewer else OppAlt
        for p in parts[1:]:
            result = op(result, p)
        return result

    return go(gt)


# --- strategies ------------------------------------------------------------------

def enumerate_strategies(gt: GameTree, role: Role) -> list[Strategy]:
    """All prunings keeping exactly one child where ``role`` chooses and every
    child elsewhere."""

    def go(node: GameTree) -> list[GameTree]:
        if node.is_leaf:
            return [node]
        if node.owner == role:
            return [GameTree(node.owner, ((m, s),)) for m, sub in node.children for s in go(sub)]
        moves = [m for m, _ in node.children]
        options = [go(sub) for _, sub in node.children]
        return [GameTree(node.owner, tuple(zip(moves, combo))) for combo in itertools.product(*options)]

    return [Strategy(role, sub, gt) for sub in go(gt)]


def count_strategies(gt: GameTree, role: Role) -> int:
    if gt.is_leaf:
        return 1
    counts = [count_strategies(sub, role) for _, sub in gt.children]
    if gt.owner == role:
        return sum(counts)
    total = 1
    for c in counts:
        total *= c
    return total


def is_strategy(sub: GameTree, source: GameTree, role: Role) -> bool:
    """Whether ``sub`` is a valid pruning of ``source`` for ``role``."""
    if source.is_leaf:
        return sub.is_leaf
    if sub.owner != source.owner or sub.is_leaf:
        return False
    original = dict(source.children)
    if any(m not in original for m, _ in sub.children):
        return False
    if source.owner == role:
        if len(sub.children) != 1:
            return False
    elif len(sub.children) != len(source.children):
        return False
    return all(is_strategy(s, original[m], role) for m, s in sub.children)


def strategy_to_term(s: Strategy, g: GameDeclaration | None = None) -> Term:
    return tree_to_term(s.subtree, s.role)


def seq_term(moves) -> Term:
    """``m1 . m2 . ... . mn`` as a term; the empty sequence is deadlock."""
    moves = list(moves)
    if not moves:
        return DELTA
    result = Action(moves[-1])
    for m in reversed(moves[:-1]):
        result = Seq(Action(m), result)
    return result


def intersect_trees(trees) -> PlaySet:
    """Brute-force intersection of the move-sequence sets of ``trees``."""
    trees = list(trees)
    if not trees:
        raise GameError("nothing to intersect")
    common = set(trees[0].paths())
    for tree in trees[1:]:
        common &= tree.paths()
    longest = max(common, key=len)
    unique = all(p == longest[:len(p)] for p in common)
    return PlaySet(frozenset(common), longest if unique else None)


def intersect_strategies(strategies) -> PlaySet:
    strategies = list(strategies)
    if not strategies:
        raise GameError("nothing to intersect")
    source = strategies[0].source
    for s in strategies[1:]:
        if s.source != source:
            raise GameError("strategies come from different game trees")
    return intersect_trees(s.subtree for s in strategies)


def play_term(terms) -> Term:
    """Left-associated playing composition ``t1 & t2 & ... & tn``."""
    terms = list(terms)
    if len(terms) < 2:
        raise GameError("playing needs at least two terms")
    result = terms[0]
    for t in terms[1:]:
        result = Play(result, t)
    return result


@dataclass(frozen=True)
class PlayReport:
    passed: bool
    play_term: Term
    result: Term
    maximal_trace: tuple[str, ...] | None
    trace: RewriteTrace | None  # None when the play was normalised untraced

    def to_json(self) -> str:
        from .syntax import print_term

        return json.dumps({
            "pass": self.passed,
            "play_term": print_term(self.play_term),
            "result": print_term(self.result),
            "maximal_trace": None if self.maximal_trace is None else list(self.maximal_trace),
            "steps": None if self.trace is None else json.loads(trace_to_json(self.trace)),
        }, indent=2)


def verify_play(strategies, g: GameDeclaration | None = None, *, step_cap: int = DEFAULT_STEP_CAP,
                disabled: frozenset = frozenset(), traced: bool = True,
                memo: dict | None = None) -> PlayReport:
    """Normalise the play of the strategies' terms and compare it with the
    longest common move sequence found by brute force.

    With ``traced=False`` the play goes through :func:`fast_normal_form`
    (optionally sharing ``memo`` between calls) and no trace is kept.
    """
    strategies = list(strategies)
    terms = [strategy_to_term(s, g) for s in strategies]
    return _check_play(terms, intersect_strategies(strategies), step_cap, disabled, traced, memo)


def _check_play(terms, playset: PlaySet, step_cap, disabled, traced=True, memo=None) -> PlayReport:
    played = play_term(terms)
    if traced:
        trace = normalize(played, FULL, step_cap=step_cap, disabled=disabled)
        result = trace.final
    else:
        trace = None
        result = fast_normal_form(played, FULL, disabled=disabled, memo=memo)
    if playset.maximal is None:
        passed = False
    else:
        passed = ac_equal(result, seq_term(playset.maximal))
    return PlayReport(passed, played, result, playset.maximal, trace)


def verify_play_terms(terms, g: GameDeclaration, *, step_cap: int = DEFAULT_STEP_CAP,
                      disabled: frozenset = frozenset()) -> PlayReport:
    """Same check starting from strategy terms: term ``i`` belongs to ``g.players[i]``."""
    terms = list(terms)
    if len(terms) != len(g.players):
        raise GameError(f"expected {len(g.players)} strategy terms, one per role, got {len(terms)}")
    trees = [game_tree_from_term(t, g, role) for t, role in zip(terms, g.players)]
    return _check_play(terms, intersect_trees(trees), step_cap, disabled)


def export_tree_dot(gt: GameTree, name: str = "game") -> str:
    lines = [f"digraph {name} {{"]
    counter = itertools.count()

    def go(node: GameTree) -> str:
        ident = f"n{next(counter)}"
        if node.is_leaf:
            lines.append(f'  {ident} [label="", shape=point];')
        else:
            label = node.owner or ""
            lines.append(f'  {ident} [label="{label}", shape=circle];')
        for move, sub in node.children:
            child = go(sub)
            lines.append(f'  {ident} -> {child} [label="{move}"];')
        return ident

    go(gt)
    lines.append("}")
    return "\n".join(lines) + "\n"
