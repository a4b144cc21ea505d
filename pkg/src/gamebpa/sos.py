"""Transition systems generated by the structural operational rules, with
strong bisimulation checked by partition refinement."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .terms import (
    Action,
    Alt,
    Deadlock,
    OppAlt,
    Play,
    Seq,
    Term,
    ac_flatten,
)

DEFAULT_STATE_CAP = 100_000


class _Terminated:
    __slots__ = ()

    def __repr__(self):
        return "✓"


TERMINATED = _Terminated()


class StateLimitExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"transition system exceeds {cap} states")
        self.cap = cap


def transitions(t: Term) -> set[tuple[str, Term | _Terminated]]:
    """One-step moves of ``t``: pairs ``(label, successor)`` where the successor
    is a term or :data:`TERMINATED`."""
    memo: dict[int, set] = {}

    def go(node: Term) -> set:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, Action):
            out = {(node.name, TERMINATED)}
        elif isinstance(node, Deadlock):
            out = set()
        elif isinstance(node, (Alt, OppAlt)):
            # opponent choice behaves as plain choice once someone resolves it
            out = go(node.left) | go(node.right)
        elif isinstance(node, Seq):
            out = set()
            for label, nxt in go(node.left):
                out.add((label, node.right if nxt is TERMINATED else Seq(nxt, node.right)))
        elif isinstance(node, Play):
            out = set()
            right = go(node.right)
            for label, xl in go(node.left):
                for label2, yl in right:
                    if label != label2:
                        continue
                    if xl is TERMINATED:
                        out.add((label, yl))
                    elif yl is TERMINATED:
                        out.add((label, xl))
                    else:
                        out.add((label, Play(xl, yl)))
        else:
            raise TypeError(f"not a process term: {node!r}")
        memo[id(node)] = out
        return out

    return set(go(t))


@dataclass
class Lts:
    states: list[Term]
    transitions: set[tuple[int, str, int]] = field(default_factory=set)
    terminating: set[tuple[int, str]] = field(default_factory=set)
    root: int = 0

    def successors(self, state: int):
        return sorted((l, d) for s, l, d in self.transitions if s == state)

    def to_json(self) -> str:
        from .syntax import print_term

        return json.dumps({
            "states": [print_term(s) for s in self.states],
            "root": self.root,
            "transitions": [{"from": s, "label": l, "to": d} for s, l, d in sorted(self.transitions)],
            "terminating": [{"state": s, "label": l} for s, l in sorted(self.terminating)],
        }, indent=2)


def build_lts(t: Term, state_cap: int = DEFAULT_STATE_CAP) -> Lts:
    """Reachable fragment of the generated transition system, breadth first,
    with states identified modulo AC of ``+``."""
    root = ac_flatten(t)
    index = {root: 0}
    lts = Lts(states=[root])
    queue = deque([root])
    while queue:
        state = queue.popleft()
        src = index[state]
        for label, nxt in sorted(transitions(state), key=_move_order):
            if nxt is TERMINATED:
                lts.terminating.add((src, label))
                continue
            nxt = ac_flatten(nxt)
            dst = index.get(nxt)
            if dst is None:
                if len(lts.states) >= state_cap:
                    raise StateLimitExceeded(state_cap)
                dst = index[nxt] = len(lts.states)
                lts.states.append(nxt)
                queue.append(nxt)
            lts.transitions.add((src, label, dst))
    return lts


def _move_order(move):
    label, nxt = move
    return (label, "" if nxt is TERMINATED else ac_flatten(nxt).sort_key())


@dataclass
class BisimResult:
    equivalent: bool
    relation: set[tuple[int, int]] | None = None
    witness: tuple[str, ...] | None = None
    left: Lts | None = None
    right: Lts | None = None

    def __bool__(self):
        return self.equivalent


def _refine(n_states: int, edges: list[list[tuple[str, int]]], tick: int):
    """Signature refinement. Returns per-round block assignments; the last is stable.

    State ``tick`` is the distinguished successful-termination sink.
    """
    blocks = [1 if s == tick else 0 for s in range(n_states)]
    rounds = [blocks]
    while True:
        sigs = {}
        new = []
        for s in range(n_states):
            sig = (blocks[s], frozenset((l, blocks[d]) for l, d in edges[s]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(blocks)):
            return rounds
        blocks = new
        rounds.append(blocks)


def bisimilar(t: Term, u: Term, state_cap: int = DEFAULT_STATE_CAP) -> BisimResult:
    """Decide strong bisimilarity of ``t`` and ``u``.

    Each a-labelled successful termination is an a-transition into one shared
    sink, which is kept apart from deadlock from the start.
    """
    left = build_lts(t, state_cap)
    right = build_lts(u, state_cap)
    offset = len(left.states)
    tick = offset + len(right.states)
    n = tick + 1
    edges: list[list[tuple[str, int]]] = [[] for _ in range(n)]
    for lts, base in ((left, 0), (right, offset)):
        for s, l, d in lts.transitions:
            edges[base + s].append((l, base + d))
        for s, l in lts.terminating:
            edges[base + s].append((l, tick))

    rounds = _refine(n, edges, tick)
    final = rounds[-1]
    if final[0] == final[offset]:
        relation = {(p, q - offset) for p in range(offset) for q in range(offset, tick)
                    if final[p] == final[q]}
        return BisimResult(True, relation=relation, left=left, right=right)
    witness = _attack(0, offset, edges, rounds, tick)
    return BisimResult(False, witness=witness, left=left, right=right)


def _attack(p: int, q: int, edges, rounds, tick) -> tuple[str, ...]:
    """Labels of an attacker play that separates ``p`` from ``q``; the last move
    cannot be answered by the defender."""

    def split_round(a, b):
        for k, blocks in enumerate(rounds):
            if blocks[a] != blocks[b]:
                return k
        return None

    moves: list[str] = []
    while True:
        k = split_round(p, q)
        if k == 0:
            # one side has terminated successfully, the other has not
            return tuple(moves)
        prev = rounds[k - 1]
        chosen = None
        for attacker, defender, flip in ((p, q, False), (q, p, True)):
            for label, d in sorted(edges[attacker]):
                answers = [d2 for l2, d2 in edges[defender] if l2 == label and prev[d2] == prev[d]]
                if not answers:
                    chosen = (label, d, defender, flip)
                    break
            if chosen:
                break
        label, d, defender, flip = chosen
        moves.append(label)
        replies = [d2 for l2, d2 in edges[defender] if l2 == label]
        if not replies:
            return tuple(moves)
        # defender answers with the reply that survives longest
        best = max(replies, key=lambda d2: split_round(d, d2) or len(rounds))
        p, q = (best, d) if flip else (d, best)


def is_bisimulation(left: Lts, right: Lts, relation: set[tuple[int, int]]) -> bool:
    """Check the transfer and termination clauses for ``relation`` directly."""
    def moves(lts, s):
        return [(l, d) for src, l, d in lts.transitions if src == s]

    def terms(lts, s):
        return {l for src, l in lts.terminating if src == s}

    for p, q in relation:
        for l, p2 in moves(left, p):
            if not any(l2 == l and (p2, q2) in relation for l2, q2 in moves(right, q)):
                return False
        for l, q2 in moves(right, q):
            if not any(l2 == l and (p2, q2) in relation for l2, p2 in moves(left, p)):
                return False
        if terms(left, p) != terms(right, q):
            return False
    return True


def _dot_quote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def export_dot(lts: Lts, name: str = "lts") -> str:
    from .syntax import print_term

    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, state in enumerate(lts.states):
        shape = "box" if i == lts.root else "ellipse"
        lines.append(f"  s{i} [label={_dot_quote(print_term(state))}, shape={shape}];")
    if lts.terminating:
        lines.append('  done [label="✓", shape=doublecircle];')
    for s, l, d in sorted(lts.transitions):
        lines.append(f"  s{s} -> s{d} [label={_dot_quote(l)}];")
    for s, l in sorted(lts.terminating):
        lines.append(f"  s{s} -> done [label={_dot_quote(l)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
