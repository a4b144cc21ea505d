"""Randomised property suites relating the rewrite system to the
transition-system semantics and the game model.

Each suite takes a seeded ``random.Random`` and a sample count and returns a
:class:`SuiteResult`; the first failing sample is kept as a counterexample.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .games import enumerate_strategies, verify_play
from .gen import bisimilar_variant, perturbed_variant, random_game_tree, random_term
from .rewrite import DEFAULT_STEP_CAP, FULL, StepLimitExceeded, is_basic_term, normalize
from .sos import bisimilar
from .syntax import parse_term, print_term
from .terms import Alt, OppAlt, Play, Seq, ac_equal, weight


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    counterexample: dict | None = None
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, **details):
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = {"suite": self.name, **details}


def _timed(fn):
    def run(rng: random.Random, count: int, disabled: frozenset = frozenset(), **kw) -> SuiteResult:
        start = time.perf_counter()
        result = fn(rng, count, frozenset(disabled), **kw)
        result.seconds = time.perf_counter() - start
        return result

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _term_corpus(rng: random.Random, count: int, max_depth: int = 8):
    return [random_term(rng, max_depth=max_depth) for _ in range(count)]


@_timed
def weight_decrease(rng, count, disabled, step_cap: int = DEFAULT_STEP_CAP):
    """Every rewrite step strictly lowers the weight and no run hits the step cap."""
    res = SuiteResult("weight-decrease")
    steps = 0
    for t in _term_corpus(rng, count):
        res.checked += 1
        try:
            trace = normalize(t, FULL, step_cap=step_cap, disabled=disabled)
        except StepLimitExceeded:
            res.fail(term=print_term(t), reason="step cap exceeded")
            continue
        steps += len(trace.steps)
        for s in trace.steps:
            if weight(s.after) >= weight(s.before):
                res.fail(term=print_term(t), rule=s.rule.value,
                         before=print_term(s.before), after=print_term(s.after),
                         reason="weight did not decrease")
                break
    res.notes["steps"] = steps
    return res


@_timed
def purity(rng, count, disabled):
    """Full-mode normal forms contain neither opponent choice nor play."""
    res = SuiteResult("purity")
    for t in _term_corpus(rng, count):
        res.checked += 1
        nf = normalize(t, FULL, disabled=disabled).final
        if not is_basic_term(nf):
            res.fail(term=print_term(t), normal_form=print_term(nf), reason="normal form is not basic")
    return res


@_timed
def soundness(rng, count, disabled):
    """A term and its normal form are bisimilar."""
    res = SuiteResult("soundness")
    for t in _term_corpus(rng, count):
        res.checked += 1
        nf = normalize(t, FULL, disabled=disabled).final
        if not bisimilar(t, nf):
            res.fail(term=print_term(t), normal_form=print_term(nf), reason="not bisimilar to its normal form")
    return res


@_timed
def completeness(rng, count, disabled):
    """Bisimilarity coincides with AC-equality of normal forms."""
    res = SuiteResult("completeness")
    same = 0
    for _ in range(count):
        t = random_term(rng, max_depth=6)
        u = bisimilar_variant(rng, t) if rng.random() < 0.5 else perturbed_variant(rng, t)
        res.checked += 1
        semantic = bisimilar(t, u).equivalent
        syntactic = ac_equal(normalize(t, FULL, disabled=disabled).final,
                             normalize(u, FULL, disabled=disabled).final)
        same += semantic
        if semantic != syntactic:
            res.fail(left=print_term(t), right=print_term(u), bisimilar=semantic,
                     normal_forms_equal=syntactic, reason="bisimilarity and normal forms disagree")
    res.notes["bisimilar_pairs"] = same
    return res


CONGRUENCE_OPS = {"+": Alt, ".": Seq, "$": OppAlt, "&": Play}


@_timed
def congruence(rng, count, disabled, ops=tuple(CONGRUENCE_OPS)):
    """Bisimilarity is preserved by every binary operator; ``count`` quadruples per operator."""
    res = SuiteResult("congruence")
    for symbol in ops:
        op = CONGRUENCE_OPS[symbol]
        for _ in range(count):
            t = random_term(rng, max_depth=5)
            u = random_term(rng, max_depth=5)
            t2, u2 = bisimilar_variant(rng, t), bisimilar_variant(rng, u)
            res.checked += 1
            if not (bisimilar(t, t2) and bisimilar(u, u2)):
                res.fail(left=print_term(t), left_variant=print_term(t2), right=print_term(u),
                         right_variant=print_term(u2), reason="variant generator broke bisimilarity")
                continue
            if not bisimilar(op(t, u), op(t2, u2)):
                res.fail(operator=symbol, left=print_term(t), left_variant=print_term(t2),
                         right=print_term(u), right_variant=print_term(u2),
                         reason="operator does not preserve bisimilarity")
    return res


MAX_COMBINATIONS = 2_000


@_timed
def play_matches_intersection(rng, count, disabled, max_combinations: int = MAX_COMBINATIONS):
    """Playing every combination of per-role strategies normalises to the
    longest common move sequence; half the trees have two roles, half three."""
    res = SuiteResult("play-oracle")
    plays = 0
    trees = 0
    while trees < count:
        players = ("P", "O") if trees % 2 == 0 else ("P1", "P2", "P3")
        ownership = "alternating" if rng.random() < 0.3 else "mixed"
        tree = random_game_tree(rng, players, max_depth=5, max_branching=3, ownership=ownership)
        per_role = [enumerate_strategies(tree, role) for role in players]
        total = 1
        for s in per_role:
            total *= len(s)
        if total > max_combinations:
            res.notes["resampled"] = res.notes.get("resampled", 0) + 1
            continue
        trees += 1
        res.checked += 1
        memo: dict = {}  # plays over one tree share most subterms
        for combo in itertools.product(*per_role):
            plays += 1
            report = verify_play(combo, disabled=disabled, traced=False, memo=memo)
            if not report.passed:
                res.fail(play_term=print_term(report.play_term), result=print_term(report.result),
                         maximal_trace=None if report.maximal_trace is None else list(report.maximal_trace),
                         reason="play does not yield the maximal common trace")
                break
    res.notes["plays"] = plays
    return res


SUITES = {
    "weight-decrease": weight_decrease,
    "purity": purity,
    "soundness": soundness,
    "completeness": completeness,
    "congruence": congruence,
    "play-oracle": play_matches_intersection,
}


def run_all(seed: int, count: int, disabled: frozenset = frozenset(),
            tree_count: int | None = None) -> list[SuiteResult]:
    """Run every suite; each gets its own generator derived from ``seed`` so
    results do not depend on which suites ran before. The play suite samples
    ``tree_count`` game trees (default ``count``)."""
    results = []
    for name, suite in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        n = tree_count if name == "play-oracle" and tree_count is not None else count
        results.append(suite(rng, n, disabled))
    return results


def roundtrip_check(t) -> bool:
    return parse_term(print_term(t)) == t
