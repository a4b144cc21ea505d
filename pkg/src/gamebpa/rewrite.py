"""Directed rewriting with the axioms of the algebra, modulo associativity and
commutativity of ``+``.

Terms are kept in :func:`ac_flatten` canonical form between steps, so matching
against a sum only ever looks at its sorted summand list.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

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
    ac_flatten,
    make_sum,
    summands,
)

FULL = "full"
P_VIEW = "p-view"
MODES = (FULL, P_VIEW)

DEFAULT_STEP_CAP = 1_000_000


class RuleId(str, enum.Enum):
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    OA1 = "OA1"
    DL1 = "DL1"
    DL2 = "DL2"
    PO1 = "PO1"
    PO2 = "PO2"
    PO3 = "PO3"
    PO4 = "PO4"
    PO5 = "PO5"
    PO6 = "PO6"
    PO7 = "PO7"
    PO8 = "PO8"
    PO9 = "PO9"
    PO10 = "PO10"
    PO11 = "PO11"
    PO12 = "PO12"
    PO13 = "PO13"
    PO14 = "PO14"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RewriteStep:
    rule: RuleId
    position: tuple[int, ...]  # child indices from the root, 0 = left, 1 = right
    before: Term
    after: Term


@dataclass(frozen=True)
class RewriteTrace:
    initial: Term
    steps: tuple[RewriteStep, ...]
    final: Term

    @property
    def rules(self) -> list[str]:
        return [s.rule.value for s in self.steps]


class StepLimitExceeded(RuntimeError):
    """Raised when normalisation runs past its step cap; always an engine bug."""

    def __init__(self, cap: int, trace: RewriteTrace):
        super().__init__(f"rewriting did not terminate within {cap} steps")
        self.cap = cap
        self.trace = trace


def _is_action(t: Term) -> bool:
    return isinstance(t, Action)


def _prefix(t: Term) -> Action | None:
    """The leading action of ``v.x``, else None."""
    if isinstance(t, Seq) and isinstance(t.left, Action):
        return t.left
    return None


def _split_sum(t: Term) -> tuple[Term, Term]:
    """Isolate the first summand (canonical order) of a sum as ``x``, the rest as ``y``."""
    parts = sorted(summands(t), key=Term.sort_key)
    return parts[0], make_sum(parts[1:])


def match_root(t: Term, mode: str = FULL, disabled: frozenset = frozenset()):
    """Try every rule at the root of ``t`` in rule-table order.

    Returns ``(rule, replacement)`` for the first rule that applies, else None.
    ``t`` is expected in canonical form.
    """
    for rule, result in _candidates(t, mode):
        if rule not in disabled:
            return rule, result
    return None


def _candidates(t: Term, mode: str):
    R = RuleId
    if isinstance(t, Alt):
        parts = sorted(summands(t), key=Term.sort_key)
        for i in range(len(parts) - 1):
            if parts[i] == parts[i + 1]:
                yield R.A3, make_sum(parts[:i + 1] + parts[i + 2:])
                break
        if isinstance(parts[0], Deadlock):
            yield R.DL1, make_sum(parts[1:])
        return

    if isinstance(t, Seq):
        left, right = t.left, t.right
        if isinstance(left, Alt):
            x, y = _split_sum(left)
            yield R.A4, Alt(Seq(x, right), Seq(y, right))
        if isinstance(left, Seq):
            yield R.A5, Seq(left.left, Seq(left.right, right))
        if isinstance(left, Deadlock):
            yield R.DL2, DELTA
        return

    if isinstance(t, OppAlt):
        if mode == FULL:
            yield R.OA1, Alt(t.left, t.right)
        return

    if not isinstance(t, Play):
        return

    x, y = t.left, t.right
    if _is_action(x) and _is_action(y):
        yield (R.PO1, x) if x.name == y.name else (R.PO2, DELTA)
    if isinstance(x, Deadlock):
        yield R.PO3, DELTA
    if isinstance(y, Deadlock):
        yield R.PO4, DELTA
    py, px = _prefix(y), _prefix(x)
    if _is_action(x) and py is not None:
        yield (R.PO5, y) if x.name == py.name else (R.PO6, DELTA)
    if px is not None and _is_action(y):
        yield (R.PO7, x) if px.name == y.name else (R.PO8, DELTA)
    if px is not None and py is not None:
        if px.name == py.name:
            yield R.PO9, Seq(px, Play(x.right, y.right))
        else:
            yield R.PO10, DELTA
    if isinstance(x, OppAlt):
        yield R.PO11, Play(Alt(x.left, x.right), y)
    if isinstance(y, OppAlt):
        yield R.PO12, Play(x, Alt(y.left, y.right))
    if isinstance(x, Alt):
        first, rest = _split_sum(x)
        yield R.PO13, Alt(Play(first, y), Play(rest, y))
    if isinstance(y, Alt):
        first, rest = _split_sum(y)
        yield R.PO14, Alt(Play(x, first), Play(x, rest))


def _replace(t: Term, position: tuple[int, ...], new: Term) -> Term:
    spine = []
    node = t
    for i in position:
        spine.append(node)
        node = node.children[i]
    for parent, i in zip(reversed(spine), reversed(position)):
        new = type(parent)(new, parent.right) if i == 0 else type(parent)(parent.left, new)
    return new


def _find_redex(t: Term, mode: str, disabled: frozenset, strategy: str, normal: set | None):
    """Locate the redex chosen by ``strategy`` in canonical ``t``.

    ``innermost``: first node in post-order (left before right) whose root matches.
    ``outermost``: first node in pre-order. Interior nodes of a ``+`` chain are
    never redexes themselves; the chain top stands for the whole sum.
    ``normal`` caches subterms known to contain no redex (innermost only).
    """
    stack = [(t, (), False, False)]
    while stack:
        node, path, inner, expanded = stack.pop()
        if not expanded:
            if normal is not None and not inner and node in normal:
                continue
            if strategy == "outermost" and not inner:
                hit = match_root(node, mode, disabled)
                if hit is not None:
                    return path, hit
            if isinstance(node, Binary):
                if strategy == "innermost":
                    stack.append((node, path, inner, True))
                is_sum = isinstance(node, Alt)
                stack.append((node.right, path + (1,), is_sum and isinstance(node.right, Alt), False))
                stack.append((node.left, path + (0,), is_sum and isinstance(node.left, Alt), False))
                continue
            if strategy == "outermost":
                continue
        if inner:
            continue
        hit = match_root(node, mode, disabled)
        if hit is not None:
            return path, hit
        if normal is not None:
            normal.add(node)
    return None


def rewrite_step(t: Term, mode: str = FULL, *, strategy: str = "innermost",
                 disabled: frozenset = frozenset(), _normal: set | None = None) -> RewriteStep | None:
    """Apply exactly one rule at the leftmost-innermost redex of ``t``.

    In ``p-view`` mode OA1 is switched off, so opponent choices survive unless a
    playing operator consumes them. Returns None when ``t`` is a normal form.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    before = ac_flatten(t)
    found = _find_redex(before, mode, frozenset(disabled), strategy, _normal)
    if found is None:
        return None
    path, (rule, replacement) = found
    after = ac_flatten(_replace(before, path, replacement))
    return RewriteStep(rule, path, before, after)


def normalize(t: Term, mode: str = FULL, *, step_cap: int = DEFAULT_STEP_CAP,
              strategy: str = "innermost", disabled: frozenset = frozenset()) -> RewriteTrace:
    """Rewrite ``t`` to its normal form, recording every step.

    ``steps[0].before`` is the canonical form of ``t``; each step's ``after`` is
    the next step's ``before``.
    """
    if step_cap <= 0:
        raise ValueError("step cap must be positive")
    normal: set | None = set() if strategy == "innermost" else None
    steps: list[RewriteStep] = []
    current = ac_flatten(t)
    while True:
        step = rewrite_step(current, mode, strategy=strategy, disabled=disabled, _normal=normal)
        if step is None:
            return RewriteTrace(t, tuple(steps), current)
        if len(steps) >= step_cap:
            raise StepLimitExceeded(step_cap, RewriteTrace(t, tuple(steps), current))
        steps.append(step)
        current = step.after


def normal_form(t: Term, mode: str = FULL, **kw) -> Term:
    return normalize(t, mode, **kw).final


def fast_normal_form(t: Term, mode: str = FULL, *, disabled: frozenset = frozenset(),
                     memo: dict | None = None) -> Term:
    """Normal form without a trace: children first, then the root, with every
    normalised subterm memoised. Uses the same rule table as :func:`normalize`.

    Pass the same ``memo`` dict across calls to share work between related terms.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    disabled = frozenset(disabled)
    memo = {} if memo is None else memo

    def nf(node: Term) -> Term:
        # node is canonical
        done = memo.get(node)
        if done is not None:
            return done
        if isinstance(node, Alt):
            rebuilt = ac_flatten(make_sum([nf(p) for p in summands(node)]))
        elif isinstance(node, Binary):
            rebuilt = ac_flatten(type(node)(nf(node.left), nf(node.right)))
        else:
            rebuilt = node
        hit = match_root(rebuilt, mode, disabled)
        result = rebuilt if hit is None else nf(ac_flatten(hit[1]))
        memo[node] = memo[rebuilt] = result
        return result

    return nf(ac_flatten(t))


def is_basic_term(t: Term) -> bool:
    """True iff ``t`` uses only actions, delta, ``.`` and ``+``."""
    from .terms import subterms

    return not any(isinstance(n, (OppAlt, Play)) for n in subterms(t))


def trace_to_json(trace: RewriteTrace) -> str:
    from .syntax import print_term

    return json.dumps([
        {
            "rule": s.rule.value,
            "position": list(s.position),
            "before": print_term(s.before),
            "after": print_term(s.after),
        }
        for s in trace.steps
    ], indent=2)
