import random

import pytest

from amrkbqa.bounds import TRUE, UNKNOWN
from amrkbqa.kb import (
    GraphPattern,
    KnowledgeBase,
    MalformedLineError,
    PrefixTable,
    Triple,
    eval_bgp,
    load_ntriples,
    term_text,
)
from _gen import closure_pairs, nested_loop_bgp

PREFIXES = PrefixTable(
    {
        "dbr": "http://dbpedia.org/resource/",
        "dbo": "http://dbpedia.org/ontology/",
        "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
        "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    }
)


def kb_from(triples):
    kb = KnowledgeBase()
    for s, p, o in triples:
        kb.add(Triple(s, p, o))
    return kb


class TestLoad:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.nt"
        path.write_text("")
        assert len(load_ntriples(path, PREFIXES)) == 0

    def test_toy_kb_loads_and_is_queryable(self, toy_kb):
        assert len(toy_kb) > 250
        assert toy_kb.contains("dbr:Che_(2008_film)", "dbo:producer", "dbr:Benicio_del_Toro")

    def test_missing_dot_is_malformed(self, tmp_path):
        path = tmp_path / "bad.nt"
        path.write_text(
            "<http://dbpedia.org/resource/A> <http://dbpedia.org/ontology/p> "
            "<http://dbpedia.org/resource/B>\n"
        )
        with pytest.raises(MalformedLineError) as err:
            load_ntriples(path, PREFIXES)
        assert err.value.lineno == 1

    def test_duplicates_ignored(self, tmp_path):
        line = (
            "<http://dbpedia.org/resource/A> <http://dbpedia.org/ontology/p> "
            "<http://dbpedia.org/resource/B> .\n"
        )
        path = tmp_path / "dup.nt"
        path.write_text(line + line)
        assert len(load_ntriples(path, PREFIXES)) == 1

    def test_literals_and_comments(self, tmp_path):
        path = tmp_path / "lit.nt"
        path.write_text(
            "# comment line\n"
            '<http://dbpedia.org/resource/A> <http://dbpedia.org/ontology/height> "12.5" .\n'
        )
        kb = load_ntriples(path, PREFIXES)
        assert kb.triples[0].o == '"12.5"'
        assert term_text('"12.5"') == "12.5"

    def test_schema_triples_populate_metadata(self, toy_kb):
        assert "dbo:Work" in toy_kb.subclass["dbo:Film"]
        assert toy_kb.domain["dbo:starring"] == "dbo:Work"


class TestAsk:
    def test_present_fact(self, toy_kb):
        assert toy_kb.ask("dbr:Che_(2008_film)", "dbo:country", "dbr:Spain") == TRUE

    def test_absent_fact_is_unknown(self, toy_kb):
        assert toy_kb.ask("dbr:Michael_Jordan", "dbo:birthPlace", "dbr:Canada") == UNKNOWN

    def test_empty_kb(self):
        assert KnowledgeBase().ask("dbr:A", "dbo:p", "dbr:B") == UNKNOWN

    def test_monotone_under_addition(self):
        kb = kb_from([("dbr:A", "dbo:p", "dbr:B")])
        asked = [("dbr:A", "dbo:p", "dbr:B"), ("dbr:A", "dbo:p", "dbr:C")]
        before = [kb.ask(*t) for t in asked]
        kb.add(Triple("dbr:A", "dbo:p", "dbr:C"))
        after = [kb.ask(*t) for t in asked]
        for b, a in zip(before, after):
            assert not (b == TRUE and a == UNKNOWN)
            assert a.lower >= b.lower


class TestIsaStar:
    def test_reflexive(self, toy_kb):
        assert toy_kb.isa_star("dbo:Film", "dbo:Film")

    def test_soccer_club_is_not_an_actor(self, toy_kb):
        assert not toy_kb.isa_star("dbo:SoccerClub", "dbo:Actor")

    def test_transitive_chain(self, toy_kb):
        assert toy_kb.isa_star("dbo:Actor", "dbo:Agent")

    def test_matches_closure_oracle(self):
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randint(2, 10)
            edges = []
            for i in range(1, n):
                parent = rng.randint(0, i - 1)
                edges.append((f"C{i}", f"C{parent}"))
            for _ in range(rng.randint(0, 3)):
                i, j = sorted(rng.sample(range(n), 2))
                edges.append((f"C{j}", f"C{i}"))
            kb = kb_from([(a, "rdfs:subClassOf", b) for a, b in edges])
            closed = closure_pairs(edges)
            for a in range(n):
                for b in range(n):
                    assert kb.isa_star(f"C{a}", f"C{b}") == (
                        (f"C{a}", f"C{b}") in closed or a == b
                    )


class TestDomainRange:
    def test_declared(self, toy_kb):
        assert toy_kb.domain_range("dbo:starring") == ("dbo:Work", "dbo:Actor")
        assert toy_kb.domain_range("dbo:club") == ("dbo:Athlete", "dbo:SportsTeam")

    def test_undeclared(self, toy_kb):
        assert toy_kb.domain_range("dbo:nonexistent") == (None, None)

    def test_range_only(self, toy_kb):
        assert toy_kb.domain_range("dbo:country") == (None, "dbo:Country")


class TestEvalBgp:
    def test_running_example_single_solution(self, toy_kb):
        pattern = GraphPattern(
            patterns=[
                ("?x", "rdf:type", "dbo:Film"),
                ("?x", "dbo:country", "dbr:Spain"),
                ("?x", "dbo:producer", "dbr:Benicio_del_Toro"),
                ("?x", "dbo:starring", "?z"),
                ("?z", "rdf:type", "dbo:Person"),
            ]
        )
        assert eval_bgp(toy_kb, pattern) == [
            {"?x": "dbr:Che_(2008_film)", "?z": "dbr:Benicio_del_Toro"}
        ]

    def test_values_restriction(self, toy_kb):
        pattern = GraphPattern(
            patterns=[("?x", "rdf:type", "dbo:Film")],
            values={"?x": frozenset({"dbr:Che_(2008_film)"})},
        )
        assert eval_bgp(toy_kb, pattern) == [{"?x": "dbr:Che_(2008_film)"}]

    def test_unsatisfiable(self, toy_kb):
        pattern = GraphPattern(patterns=[("?x", "dbo:starring", "dbr:Iraq")])
        assert eval_bgp(toy_kb, pattern) == []

    def test_matches_nested_loop_oracle(self):
        rng = random.Random(5)
        entities = [f"dbr:E{i}" for i in range(6)]
        props = [f"dbo:p{i}" for i in range(3)]
        for _ in range(150):
            triples = {
                (rng.choice(entities), rng.choice(props), rng.choice(entities))
                for _ in range(rng.randint(3, 25))
            }
            kb = kb_from(triples)
            patterns = []
            for _ in range(rng.randint(1, 3)):
                s = rng.choice(entities + ["?a", "?b"])
                p = rng.choice(props)
                o = rng.choice(entities + ["?b", "?c"])
                patterns.append((s, p, o))
            expected = nested_loop_bgp(sorted(triples), patterns)
            assert eval_bgp(kb, GraphPattern(patterns=patterns)) == expected

    def test_oracle_agreement_on_larger_store(self):
        rng = random.Random(13)
        entities = [f"dbr:E{i}" for i in range(25)]
        props = [f"dbo:p{i}" for i in range(4)]
        triples = {
            (rng.choice(entities), rng.choice(props), rng.choice(entities))
            for _ in range(700)
        }
        kb = kb_from(triples)
        patterns = [("?a", "dbo:p0", "?b"), ("?b", "dbo:p1", "?c")]
        expected = nested_loop_bgp(sorted(triples), patterns)
        assert eval_bgp(kb, GraphPattern(patterns=patterns)) == expected


class TestPrefixes:
    def test_abbreviate_longest_match(self):
        assert PREFIXES.abbreviate("http://dbpedia.org/resource/Spain") == "dbr:Spain"

    def test_unknown_namespace_kept_verbatim(self):
        assert PREFIXES.abbreviate("http://example.org/x") == "<http://example.org/x>"

    def test_expand_roundtrip(self):
        iri = "http://dbpedia.org/ontology/starring"
        assert PREFIXES.expand(PREFIXES.abbreviate(iri)) == iri
