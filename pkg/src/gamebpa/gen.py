"""Seeded random generators for terms and game trees, plus equation-preserving
term variants. All take an explicit ``random.Random``."""
from __future__ import annotations

import random

from .games import GameTree, LEAF
from .terms import (
    DELTA,
    Action,
    Alt,
    Binary,
    Deadlock,
    OppAlt,
    Play,
    Seq,
    Term,
)

LABELS = ("a", "b", "c")
BINARY_OPS = (Seq, Alt, OppAlt, Play)


def random_term(rng: random.Random, max_depth: int = 8, labels=LABELS,
                leaf_prob: float = 0.45, delta_prob: float = 0.15, ops=BINARY_OPS) -> Term:
    """A random closed term no deeper than ``max_depth`` (a leaf has depth 1)."""

    def go(depth: int) -> Term:
        if depth >= max_depth or (depth > 1 and rng.random() < leaf_prob):
            if rng.random() < delta_prob:
                return DELTA
            return Action(rng.choice(labels))
        op = rng.choice(ops)
        return op(go(depth + 1), go(depth + 1))

    return go(1)


def depth(t: Term) -> int:
    if isinstance(t, Binary):
        return 1 + max(depth(t.left), depth(t.right))
    return 1


def _positions(t: Term, path=()):
    yield path, t
    if isinstance(t, Binary):
        yield from _positions(t.left, path + (0,))
        yield from _positions(t.right, path + (1,))


def _put(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    if path[0] == 0:
        return type(t)(_put(t.left, path[1:], new), t.right)
    return type(t)(t.left, _put(t.right, path[1:], new))


def _sound_rewrites(rng: random.Random, node: Term, labels) -> list[Term]:
    """Terms bisimilar to ``node`` obtained by one equation, mostly right to left."""
    out = [Alt(node, node), Alt(node, DELTA), Alt(DELTA, node)]
    if isinstance(node, Alt):
        out.append(Alt(node.right, node.left))
        out.append(OppAlt(node.left, node.right))
        if isinstance(node.left, Seq) and isinstance(node.right, Seq) and node.left.right == node.right.right:
            out.append(Seq(Alt(node.left.left, node.right.left), node.left.right))
    if isinstance(node, OppAlt):
        out.append(OppAlt(node.right, node.left))
        out.append(Alt(node.left, node.right))
    if isinstance(node, Seq) and isinstance(node.right, Seq):
        out.append(Seq(Seq(node.left, node.right.left), node.right.right))
    if isinstance(node, Play):
        out.append(Play(node.right, node.left))
    if isinstance(node, Deadlock):
        other = Action(rng.choice(labels))
        out.append(Seq(DELTA, other))
        a, b = rng.sample(list(labels), 2)
        out.append(Play(Action(a), Action(b)))
    if isinstance(node, Action):
        out.append(Play(node, node))
    return out


def _unsound_rewrites(rng: random.Random, node: Term, labels) -> list[Term]:
    """Small perturbations that usually change behaviour."""
    out = []
    if isinstance(node, Action):
        others = [l for l in labels if l != node.name]
        out.append(Action(rng.choice(others)))
        out.append(DELTA)
    if isinstance(node, Alt):
        out.append(node.left)
        out.append(Seq(node.left, node.right))
    if isinstance(node, Seq):
        out.append(node.left)
        out.append(Alt(node.left, node.right))
    if isinstance(node, (Play, OppAlt)):
        out.append(Alt(node.left, node.right) if isinstance(node, Play) else node.left)
    if isinstance(node, Deadlock):
        out.append(Action(rng.choice(labels)))
    return out


def bisimilar_variant(rng: random.Random, t: Term, rounds: int = 3, labels=LABELS) -> Term:
    for _ in range(rounds):
        path, node = rng.choice(list(_positions(t)))
        t = _put(t, path, rng.choice(_sound_rewrites(rng, node, labels)))
    return t


def perturbed_variant(rng: random.Random, t: Term, labels=LABELS) -> Term:
    choices = [(p, n) for p, n in _positions(t) if _unsound_rewrites(rng, n, labels)]
    path, node = rng.choice(choices)
    return _put(t, path, rng.choice(_unsound_rewrites(rng, node, labels)))


def random_game_tree(rng: random.Random, players, max_depth: int = 5, max_branching: int = 3,
                     ownership: str = "mixed", labels=("a", "b", "c", "d"),
                     leaf_prob: float = 0.3) -> GameTree:
    """A random game tree of at most ``max_depth`` moves along any path.

    ``ownership`` is ``"mixed"`` (each choice owned by a random role) or
    ``"alternating"`` (roles take turns by depth).
    """
    players = list(players)

    def go(level: int) -> GameTree:
        if level >= max_depth or (level > 0 and rng.random() < leaf_prob):
            return LEAF
        width = rng.randint(1, max_branching)
        moves = rng.sample(list(labels), width)
        if width == 1:
            owner = None
        elif ownership == "alternating":
            owner = players[level % len(players)]
        else:
            owner = rng.choice(players)
        return GameTree(owner, tuple((m, go(level + 1)) for m in moves))

    return go(0)
