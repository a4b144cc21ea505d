import hypothesis.strategies as st
from hypothesis import settings

from gamebpa.terms import DELTA, Action, Alt, OppAlt, Play, Seq

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

LABELS = st.sampled_from(["a", "b", "c", "d1", "pOffLine"])

leaves = st.one_of(LABELS.map(Action), st.just(DELTA))


def _extend(children):
    ops = st.sampled_from([Seq, Alt, OppAlt, Play])
    return st.builds(lambda op, l, r: op(l, r), ops, children, children)


terms = st.recursive(leaves, _extend, max_leaves=24)

# terms small enough to expand into transition systems quickly
small_terms = st.recursive(leaves, _extend, max_leaves=8)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
