import random

from gamebpa import properties
from gamebpa.gen import (
    bisimilar_variant,
    depth,
    perturbed_variant,
    random_game_tree,
    random_term,
)
from gamebpa.sos import bisimilar
from gamebpa.terms import Action, Alt, Deadlock, OppAlt, Play, Seq, subterms


def test_random_terms_respect_depth_and_use_every_constructor():
    rng = random.Random(1)
    seen = set()
    for _ in range(500):
        t = random_term(rng, max_depth=8)
        assert 2 <= depth(t) <= 8
        seen.update(type(n) for n in subterms(t))
    assert seen == {Action, Deadlock, Seq, Alt, OppAlt, Play}


def test_random_terms_are_reproducible():
    assert random_term(random.Random(5)) == random_term(random.Random(5))


def test_variants_stay_bisimilar():
    rng = random.Random(2)
    for _ in range(300):
        t = random_term(rng, max_depth=5)
        assert bisimilar(t, bisimilar_variant(rng, t))


def test_perturbations_usually_change_behaviour():
    rng = random.Random(3)
    changed = sum(not bisimilar(t, perturbed_variant(rng, t))
                  for t in (random_term(rng, max_depth=5) for _ in range(300)))
    assert changed > 150


def test_perturbation_of_terms_without_actions():
    rng = random.Random(0)
    t = OppAlt(Deadlock(), Deadlock())
    variants = {perturbed_variant(rng, t) for _ in range(50)}
    assert any(not bisimilar(t, v) for v in variants)


def test_game_trees_respect_bounds():
    rng = random.Random(4)
    for ownership in ("mixed", "alternating"):
        for _ in range(200):
            tree = random_game_tree(rng, ("P1", "P2", "P3"), max_depth=5, max_branching=3, ownership=ownership)
            assert max(len(p) for p in tree.paths()) <= 5
            for node in tree.nodes():
                assert len(node.children) <= 3
                if len(node.children) > 1:
                    assert node.owner in ("P1", "P2", "P3")


def test_alternating_ownership_follows_depth():
    tree = random_game_tree(random.Random(6), ("P", "O"), max_depth=5, ownership="alternating")
    stack = [(tree, 0)]
    while stack:
        node, level = stack.pop()
        if len(node.children) > 1:
            assert node.owner == ("P", "O")[level % 2]
        stack.extend((sub, level + 1) for _, sub in node.children)


class TestSuites:
    def test_all_pass_on_a_small_sample(self):
        results = properties.run_all(11, 25)
        assert [r.name for r in results] == list(properties.SUITES)
        assert all(r.passed for r in results), [r.counterexample for r in results]

    def test_suites_do_not_depend_on_each_other(self):
        full = properties.run_all(3, 10)
        alone = properties.SUITES["completeness"](random.Random("3:completeness"), 10)
        assert full[3].notes == alone.notes

    def test_disabling_a_play_rule_is_detected(self):
        results = {r.name: r for r in properties.run_all(2, 30, frozenset({"PO9"}))}
        assert not results["play-oracle"].passed
        assert not results["purity"].passed
        assert results["play-oracle"].counterexample["reason"]

    def test_disabling_a_sum_rule_breaks_completeness(self):
        results = {r.name: r for r in properties.run_all(2, 60, frozenset({"A3"}))}
        assert not results["completeness"].passed

    def test_tree_count_override(self):
        results = properties.run_all(1, 5, tree_count=2)
        assert results[-1].checked == 2
