import itertools
import json
import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from gamebpa import scenarios
from gamebpa.games import (
    LEAF,
    GameError,
    GameTree,
    GameWarning,
    count_strategies,
    enumerate_strategies,
    export_tree_dot,
    game_tree_from_term,
    intersect_strategies,
    intersect_trees,
    is_strategy,
    play_term,
    seq_term,
    strategy_to_term,
    tree_to_term,
    verify_play,
    verify_play_terms,
)
from gamebpa.gen import random_game_tree
from gamebpa.rewrite import normal_form
from gamebpa.syntax import parse_game_decl, parse_term as p, print_term
from gamebpa.terms import DELTA, Deadlock, GameDeclaration, Play, ac_equal, contains

SUBMIT = scenarios.SUBMITTING_ORDER
PURCHASE = scenarios.PURCHASING
EXTENDED = scenarios.EXTENDED_PURCHASING


def unary(*moves):
    tree = LEAF
    for m in reversed(moves):
        tree = GameTree(None, ((m, tree),))
    return tree


class TestGameTree:
    def test_branching_needs_owner(self):
        with pytest.raises(GameError):
            GameTree(None, (("a", LEAF), ("b", LEAF)))

    def test_moves_must_differ(self):
        with pytest.raises(GameError):
            GameTree("P", (("a", LEAF), ("a", LEAF)))

    def test_paths_are_prefix_closed(self):
        tree = GameTree("P", (("a", unary("b")), ("c", LEAF)))
        assert tree.paths() == {(), ("a",), ("a", "b"), ("c",)}
        assert tree.leaf_paths() == [("a", "b"), ("c",)]
        assert tree.size() == 4


class TestFromTerm:
    def test_single_action(self):
        g = GameDeclaration(("P", "O"), {"a": "P"})
        assert game_tree_from_term(p("a"), g, "P") == unary("a")

    def test_scenario_view(self):
        tree = game_tree_from_term(SUBMIT.view("P"), SUBMIT.game, "P")
        assert tree == GameTree(None, (("start", GameTree(None, (("write", GameTree("O", (
            ("submit", unary("store")), ("cancel", LEAF)))),))),))

    def test_purchasing_views_give_the_same_tree(self):
        g = PURCHASE.game
        p_tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        o_tree = game_tree_from_term(PURCHASE.view("O"), g, "O")
        assert p_tree == o_tree
        branch = p_tree.children[0][1].children[0][1]
        assert branch.owner == "O" and len(branch.children) == 3
        lower = dict(branch.children)["sPlane"].children[0][1]
        assert lower.owner == "P" and [m for m, _ in lower.children] == ["pOnLine", "pOffLine"]

    def test_three_views_agree(self):
        trees = {game_tree_from_term(EXTENDED.view(r), EXTENDED.game, r) for r in EXTENDED.game.players}
        assert len(trees) == 1

    def test_play_rejected(self):
        with pytest.raises(GameError):
            game_tree_from_term(p("a & a"), SUBMIT.game, "P")

    def test_deadlock_rejected(self):
        with pytest.raises(GameError):
            game_tree_from_term(p("a . delta"), SUBMIT.game, "P")

    def test_duplicate_moves_rejected(self):
        with pytest.raises(GameError):
            game_tree_from_term(p("a . b + a . c"), GameDeclaration(("P", "O")), "P")

    def test_unknown_role(self):
        with pytest.raises(GameError):
            game_tree_from_term(p("a"), SUBMIT.game, "Z")

    def test_unclear_ownership_falls_back_with_warning(self):
        g = GameDeclaration(("P", "O"))
        with pytest.warns(GameWarning):
            tree = game_tree_from_term(p("a $ b"), g, "P")
        assert tree.owner == "O"

    def test_viewer_owned_opponent_choice_fails_in_strict_mode(self):
        g = GameDeclaration(("P", "O"), {"a": "P", "b": "P"})
        with pytest.raises(GameError):
            game_tree_from_term(p("a $ b"), g, "P", strict=True)

    def test_three_roles_need_a_known_owner(self):
        g = GameDeclaration(("P1", "P2", "P3"))
        with pytest.raises(GameError):
            game_tree_from_term(p("a $ b"), g, "P1")


class TestStrategies:
    def test_purchasing_counts(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        assert len(enumerate_strategies(tree, "P")) == 2
        assert len(enumerate_strategies(tree, "O")) == 3

    def test_purchasing_strategy_terms(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        p_terms = {print_term(strategy_to_term(s, g)) for s in enumerate_strategies(tree, "P")}
        assert print_term(PURCHASE.strategy_terms()[0]) in p_terms
        o_terms = [strategy_to_term(s, g) for s in enumerate_strategies(tree, "O")]
        expected = p("start . shopping . sPlane . oPlane . (pOffLine $ pOnLine)")
        # opponent choices are printed in tree order; compare modulo operand order
        assert any(normal_form(t) == normal_form(expected) for t in o_terms)
        assert print_term(o_terms[2]) == "start . shopping . sPlane . oPlane . (pOnLine $ pOffLine)"

    def test_no_owned_branch_means_one_strategy(self):
        tree = GameTree("O", (("a", LEAF), ("b", LEAF)))
        (only,) = enumerate_strategies(tree, "P")
        assert only.subtree == tree

    def test_linear_term(self):
        g = GameDeclaration(("P", "O"))
        tree = game_tree_from_term(p("a . b . c"), g, "P")
        for role in ("P", "O"):
            (s,) = enumerate_strategies(tree, role)
            assert strategy_to_term(s) == p("a . b . c")

    def test_count_respects_pruning(self):
        # choosing b removes the P choice below a
        tree = GameTree("P", (("a", GameTree("P", (("c", LEAF), ("d", LEAF)))), ("b", LEAF)))
        assert count_strategies(tree, "P") == 3 == len(enumerate_strategies(tree, "P"))
        assert count_strategies(tree, "O") == 1

    def test_json(self):
        tree = GameTree("P", (("a", LEAF), ("b", LEAF)))
        s = enumerate_strategies(tree, "P")[1]
        assert json.loads(s.to_json()) == {"role": "P", "retained_paths": [["b"]]}

    @settings(max_examples=60)
    @given(st.randoms(use_true_random=False), st.sampled_from(["mixed", "alternating"]))
    def test_enumeration_matches_generate_and_filter(self, rng, ownership):
        tree = random_game_tree(rng, ("P", "O"), max_depth=3, max_branching=3, ownership=ownership)
        if tree.size() > 20:
            return
        for role in ("P", "O"):
            found = enumerate_strategies(tree, role)
            assert len(found) == count_strategies(tree, role)
            assert all(is_strategy(s.subtree, tree, role) for s in found)
            assert len({s.subtree for s in found}) == len(found)
            assert {s.subtree for s in found} == set(_all_valid_prunings(tree, role))


def _all_prunings(tree):
    """Every subtree that keeps a non-empty subset of children at each branch."""
    if tree.is_leaf:
        yield tree
        return
    moves = tree.children
    for k in range(1, len(moves) + 1):
        for subset in itertools.combinations(moves, k):
            options = [list(_all_prunings(sub)) for _, sub in subset]
            for combo in itertools.product(*options):
                yield GameTree(tree.owner, tuple((m, c) for (m, _), c in zip(subset, combo)))


def _all_valid_prunings(tree, role):
    return [t for t in _all_prunings(tree) if is_strategy(t, tree, role)]


class TestIsStrategy:
    def test_rejects_two_owned_children(self):
        tree = GameTree("P", (("a", LEAF), ("b", LEAF)))
        assert not is_strategy(tree, tree, "P")

    def test_rejects_dropped_opponent_child(self):
        tree = GameTree("O", (("a", LEAF), ("b", LEAF)))
        assert not is_strategy(GameTree("O", (("a", LEAF),)), tree, "P")


class TestIntersection:
    def test_purchasing(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        ps = [s for s in enumerate_strategies(tree, "P") if "pOffLine" in print_term(strategy_to_term(s))]
        os_ = [s for s in enumerate_strategies(tree, "O") if "sPlane" in print_term(strategy_to_term(s))]
        result = intersect_strategies([ps[0], os_[0]])
        assert result.maximal == ("start", "shopping", "sPlane", "oPlane", "pOffLine")
        assert () in result.traces

    def test_three_roles(self):
        g = EXTENDED.game
        trees = [game_tree_from_term(t, g, r) for t, r in zip(EXTENDED.strategy_terms(), g.players)]
        assert intersect_trees(trees).maximal == ("start", "shopping", "sPlane", "oPlane", "pOffLine", "ByBank")

    def test_self_intersection(self):
        tree = GameTree("O", (("a", unary("b")), ("c", LEAF)))
        (s,) = enumerate_strategies(tree, "P")
        result = intersect_strategies([s, s])
        assert result.traces == frozenset(tree.paths())
        assert result.maximal is None  # two incomparable maximal paths

    def test_different_sources_rejected(self):
        (s,) = enumerate_strategies(unary("a"), "P")
        (t,) = enumerate_strategies(unary("b"), "O")
        with pytest.raises(GameError):
            intersect_strategies([s, t])

    def test_empty(self):
        with pytest.raises(GameError):
            intersect_strategies([])


class TestTerms:
    def test_seq_term(self):
        assert seq_term(["a", "b", "c"]) == p("a . b . c")
        assert seq_term([]) == DELTA

    def test_play_term_left_associates(self):
        assert play_term([p("a"), p("b"), p("c")]) == p("(a & b) & c")

    def test_play_needs_two(self):
        with pytest.raises(GameError):
            play_term([p("a")])

    def test_tree_to_term_round_trip(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        assert tree_to_term(tree, "P") == PURCHASE.view("P")

    def test_empty_tree_has_no_term(self):
        with pytest.raises(GameError):
            tree_to_term(LEAF, "P")


class TestVerifyPlay:
    @pytest.mark.parametrize("scenario", scenarios.ALL, ids=lambda s: s.name)
    def test_scenarios(self, scenario):
        report = verify_play_terms(scenario.strategy_terms(), scenario.game)
        assert report.passed
        assert print_term(report.result) == scenario.expected

    def test_report_json(self):
        report = verify_play_terms(SUBMIT.strategy_terms(), SUBMIT.game)
        data = json.loads(report.to_json())
        assert data["pass"] is True
        assert data["result"] == "start . write . submit . store"
        assert data["maximal_trace"] == ["start", "write", "submit", "store"]
        assert [s["rule"] for s in data["steps"]][-1] == "DL1"

    def test_count_must_match_roles(self):
        with pytest.raises(GameError):
            verify_play_terms(SUBMIT.strategy_terms()[:1], SUBMIT.game)

    def test_all_purchasing_combinations(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        for combo in itertools.product(enumerate_strategies(tree, "P"), enumerate_strategies(tree, "O")):
            report = verify_play(combo, g)
            assert report.passed
            assert not contains(report.result, Deadlock)

    def test_untraced_matches_traced(self):
        g = PURCHASE.game
        tree = game_tree_from_term(PURCHASE.view("P"), g, "P")
        memo = {}
        for combo in itertools.product(enumerate_strategies(tree, "P"), enumerate_strategies(tree, "O")):
            fast = verify_play(combo, g, traced=False, memo=memo)
            assert fast.trace is None and fast.result == verify_play(combo, g).result

    def test_disabled_rule_makes_the_check_fail(self):
        tree = game_tree_from_term(SUBMIT.view("P"), SUBMIT.game, "P")
        combo = [enumerate_strategies(tree, "P")[0], enumerate_strategies(tree, "O")[0]]
        assert verify_play(combo).passed
        assert not verify_play(combo, disabled=frozenset({"PO9"})).passed

    @settings(max_examples=40)
    @given(st.randoms(use_true_random=False), st.sampled_from([("P", "O"), ("P1", "P2", "P3")]))
    def test_random_trees(self, rng, players):
        tree = random_game_tree(rng, players, max_depth=4)
        per_role = [enumerate_strategies(tree, r) for r in players]
        memo = {}
        for combo in itertools.islice(itertools.product(*per_role), 200):
            report = verify_play(combo, traced=False, memo=memo)
            assert report.passed
            if not tree.is_leaf:
                assert not contains(report.result, Deadlock)

    def test_play_order_does_not_matter(self):
        rng = random.Random(13)
        checked = 0
        while checked < 100:
            tree = random_game_tree(rng, ("P1", "P2", "P3"), max_depth=4)
            combo = [rng.choice(enumerate_strategies(tree, r)) for r in ("P1", "P2", "P3")]
            t1, t2, t3 = (strategy_to_term(s) for s in combo)
            left = normal_form(Play(Play(t1, t2), t3))
            right = normal_form(Play(t1, Play(t2, t3)))
            swapped = normal_form(Play(Play(t3, t1), t2))
            assert ac_equal(left, right) and ac_equal(left, swapped)
            checked += 1


class TestDot:
    def test_owner_labels(self):
        tree = game_tree_from_term(SUBMIT.view("P"), SUBMIT.game, "P")
        dot = export_tree_dot(tree)
        assert dot.startswith("digraph game {")
        assert '[label="O", shape=circle]' in dot
        assert '[label="cancel"]' in dot
        assert dot.count("->") == tree.size() - 1


def test_scenario_declarations_parse():
    for s in scenarios.ALL:
        g = parse_game_decl(s.declaration)
        for role in g.players:
            with warnings.catch_warnings():
                warnings.simplefilter("error", GameWarning)
                game_tree_from_term(s.view(role), g, role, strict=True)
