import random

import pytest

from amrkbqa.amr import (
    AmrEdge,
    AmrGraph,
    AmrNode,
    DanglingReentrancyError,
    DuplicateVariableError,
    QuestionMode,
    UnbalancedParensError,
    detect_question_mode,
    graph_equal,
    parse_penman,
    serialize_penman,
    shortest_path,
)
from _gen import bfs_distance, random_amr_graph

EXAMPLE_ONE = (
    '(s / star-01 :ARG1 (m / movie :mod (c / country :name (n / name :op1 "Spain"))) '
    ":ARG2 (a / amr-unknown))"
)
JAMES_BOND = (
    '(m / marry-01 :ARG1 (p / person :name (n / name :op1 "James" :op2 "Bond")) '
    ":mode interrogative)"
)


class TestParse:
    def test_minimal_graph(self):
        g = parse_penman("(a / amr-unknown)")
        assert len(g.nodes) == 1
        assert len(g.edges) == 0
        assert g.root == "a"
        assert g.node("a").concept == "amr-unknown"

    def test_example_one_counts(self):
        g = parse_penman(EXAMPLE_ONE)
        assert len(g.nodes) == 5
        assert len(g.edges) == 4
        assert g.root == "s"
        assert g.node("n").attribute_values(":op1") == ['"Spain"']

    def test_mode_attribute_on_root(self):
        g = parse_penman(JAMES_BOND)
        assert (":mode", "interrogative") in g.node("m").attributes

    def test_reentrancy_resolves(self):
        g = parse_penman("(a / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
        assert ("g", ":ARG0", "b") in [(e.source, e.role, e.target) for e in g.edges]

    def test_forward_reentrancy_resolves(self):
        g = parse_penman("(a / and :ARG0 b :ARG1 (b / boy))")
        assert sum(1 for e in g.edges if e.target == "b") == 2

    def test_unbalanced_parens_offset(self):
        with pytest.raises(UnbalancedParensError) as err:
            parse_penman("(a / thing :mod (b / other)")
        assert err.value.offset == len("(a / thing :mod (b / other)")

    def test_trailing_garbage_rejected(self):
        with pytest.raises(UnbalancedParensError):
            parse_penman("(a / thing))")

    def test_duplicate_variable(self):
        with pytest.raises(DuplicateVariableError) as err:
            parse_penman("(a / thing :mod (a / other))")
        assert err.value.var == "a"
        assert err.value.offset == 17

    def test_dangling_reentrancy(self):
        text = "(a / thing :mod zz)"
        with pytest.raises(DanglingReentrancyError) as err:
            parse_penman(text)
        assert err.value.var == "zz"
        assert err.value.offset == text.index("zz")

    def test_numeric_and_polarity_constants(self):
        g = parse_penman("(t / temperature :quant 5 :polarity -)")
        assert (":quant", "5") in g.node("t").attributes
        assert (":polarity", "-") in g.node("t").attributes

    def test_directed_cycle_rejected(self):
        with pytest.raises(ValueError, match="cycle"):
            parse_penman("(a / x :ARG0 (b / y :ARG0 a))")


class TestSerialize:
    def test_minimal(self):
        g = parse_penman("(a / amr-unknown)")
        assert serialize_penman(g) == "(a / amr-unknown)"

    def test_reentrancy_single_definition(self):
        nodes = {
            "a": AmrNode("a", "x"),
            "b": AmrNode("b", "y"),
            "c": AmrNode("c", "z"),
        }
        edges = [AmrEdge("a", ":r1", "b"), AmrEdge("b", ":r2", "c"), AmrEdge("a", ":r3", "c")]
        g = AmrGraph("a", nodes, edges)
        text = serialize_penman(g)
        assert text == "(a / x :r1 (b / y :r2 (c / z)) :r3 c)"
        assert graph_equal(parse_penman(text), g)

    @pytest.mark.parametrize("text", [EXAMPLE_ONE, JAMES_BOND, "(a / amr-unknown)"])
    def test_fixture_roundtrip(self, text):
        g = parse_penman(text)
        assert graph_equal(parse_penman(serialize_penman(g)), g)

    def test_random_roundtrip(self):
        rng = random.Random(7)
        for _ in range(300):
            g, _, _ = random_amr_graph(rng)
            assert graph_equal(parse_penman(serialize_penman(g)), g)


class TestQuestionMode:
    def test_interrogative(self):
        assert detect_question_mode(parse_penman(JAMES_BOND)) is QuestionMode.INTERROGATIVE

    def test_imperative(self):
        g = parse_penman("(l / list-01 :mode imperative :ARG1 (p / person))")
        assert detect_question_mode(g) is QuestionMode.IMPERATIVE

    def test_inquisitive_with_unknown(self):
        assert detect_question_mode(parse_penman(EXAMPLE_ONE)) is QuestionMode.INQUISITIVE

    def test_defaults_to_inquisitive(self):
        assert detect_question_mode(parse_penman("(p / person)")) is QuestionMode.INQUISITIVE

    def test_imperative_wins_over_interrogative(self):
        g = parse_penman("(l / list-01 :mode imperative :mode interrogative :ARG1 (p / person))")
        assert detect_question_mode(g) is QuestionMode.IMPERATIVE


class TestShortestPath:
    def test_zero_length(self):
        g = parse_penman(EXAMPLE_ONE)
        assert len(shortest_path(g, "s", "s")) == 0

    def test_example_one_sequence(self):
        g = parse_penman(EXAMPLE_ONE)
        path = shortest_path(g, "a", "c")
        assert path.as_sequence(g) == [
            "amr-unknown",
            ":ARG2^-1",
            "star-01",
            ":ARG1",
            "movie",
            ":mod",
            "country",
        ]

    def test_no_path(self):
        nodes = {"a": AmrNode("a", "x"), "b": AmrNode("b", "y"), "c": AmrNode("c", "z")}
        edges = [AmrEdge("a", ":r", "b"), AmrEdge("a", ":r", "c")]
        g = AmrGraph("a", nodes, edges)
        path = shortest_path(g, "b", "c")
        assert len(path) == 2  # connected through the root
        orphaned = AmrGraph("a", {"a": nodes["a"]}, [])
        with pytest.raises(KeyError):
            shortest_path(orphaned, "a", "b")

    def test_matches_bfs_oracle_on_random_graphs(self):
        rng = random.Random(11)
        for _ in range(500):
            g, _, _ = random_amr_graph(rng, attributes=False)
            names = sorted(g.nodes)
            a, b = rng.choice(names), rng.choice(names)
            expected = bfs_distance(g, a, b)
            assert expected is not None
            assert len(shortest_path(g, a, b)) == expected

    def test_deterministic_under_ties(self):
        nodes = {v: AmrNode(v, f"c{v}") for v in "axyt"}
        edges = [
            AmrEdge("a", ":b", "x"),
            AmrEdge("a", ":a", "y"),
            AmrEdge("x", ":a", "t"),
            AmrEdge("y", ":z", "t"),
        ]
        g = AmrGraph("a", nodes, edges)
        path = shortest_path(g, "a", "t")
        # both two-step routes tie on length; (:a, y) sorts before (:b, x)
        assert [s.node for s in path.steps] == ["y", "t"]
        assert shortest_path(g, "a", "t") == path
