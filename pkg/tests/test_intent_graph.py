import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_graph
from dipcomm.errors import DanglingReference, DuplicateVariable, GraphSyntaxError, UnbalancedText
from dipcomm.intent import (
    Edge,
    IntentGraph,
    Literal,
    check_diplomacy_graph,
    graphs_to_text,
    is_isomorphic,
    parse_graph_blocks,
    parse_graph_text,
    serialize_graph,
    to_triples,
    underspecification,
)

MOVE_TO_BREST = """(m / move-01
    :ARG1 (u / unit
        :mod (c2 / country
            :name (n2 / name :op1 "Austria")))
    :ARG2 (p2 / province
        :name (n3 / name :op1 "Brest")))"""

BUMP_FROM_ROMANIA = """(m / move-01
    :ARG1 (u / unit
        :location (p2 / province
            :name (n / name :op1 "Romania")))
    :ARG2 (p3 / province
        :name (n3 / name :op1 "Bulgaria")))"""


def test_parse_move_to_brest():
    g = parse_graph_text(MOVE_TO_BREST)
    assert g.root == "m" and g.concept("m") == "move-01"
    u = g.target("m", "ARG1")
    assert g.concept(u) == "unit"
    assert g.name_of(g.target(u, "mod")) == "Austria"
    assert g.name_of(g.target("m", "ARG2")) == "Brest"


def test_single_node():
    g = parse_graph_text("(h / hold-03)")
    assert g.root == "h" and dict(g.nodes) == {"h": "hold-03"} and g.edges == ()


def test_empty_graph_sentinel():
    e = parse_graph_text("()")
    assert e.is_empty and e == IntentGraph.empty()
    assert serialize_graph(e) == "()"
    assert not is_isomorphic(e, parse_graph_text("(h / hold-03)"))
    assert to_triples(e) == set()
    assert check_diplomacy_graph(e) == []


def test_reentrancy_and_inverse_roles():
    g = parse_graph_text("(a / agree-01 :ARG0 (i / i) :ARG1 (m / move-01 :ARG0 i))")
    assert Edge("m", "ARG0", "i") in g.edges
    h = parse_graph_text("(u / unit :ARG1-of (m / move-01))")
    assert h.edges == (Edge("m", "ARG1", "u"),)
    assert is_isomorphic(h, parse_graph_text(serialize_graph(h)))


def test_constants():
    g = parse_graph_text('(m / move-01 :polarity - :ARG2 (p / province :name (n / name :op1 "New York")))')
    assert Edge("m", "polarity", Literal("-", quoted=False)) in g.edges
    assert g.name_of("p") == "New York"
    assert '"New York"' in serialize_graph(g)


@pytest.mark.parametrize("text,err", [
    ("(m / move-01 :ARG1 (u / unit)", UnbalancedText),
    ("(m / move-01))", UnbalancedText),
    ("(m / move-01 :ARG1 (m / unit))", DuplicateVariable),
    ("(m / move-01 :ARG1 u)", DanglingReference),
    ("(m / move-01) (x / unit)", UnbalancedText),
    ("(m move-01)", GraphSyntaxError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_graph_text(text)


def test_graph_invariants_enforced():
    with pytest.raises(DanglingReference):
        IntentGraph({"a": "x"}, (Edge("a", "ARG0", "b"),), "a")
    with pytest.raises(GraphSyntaxError):
        IntentGraph({"a": "x", "b": "y"}, (), "a")


def test_serializer_layout_and_role_order():
    g = parse_graph_text(BUMP_FROM_ROMANIA)
    text = serialize_graph(g)
    assert text == BUMP_FROM_ROMANIA
    assert text.index(":location") < text.index(":ARG2")
    assert serialize_graph(parse_graph_text(MOVE_TO_BREST)) == MOVE_TO_BREST
    scrambled = parse_graph_text('(m / move-01 :purpose (g / gain-02) :ARG2 (p / province) :ARG10 (x / unit) '
                                 ':ARG1 (u / unit) :op2 "b" :op1 "a")')
    lines = serialize_graph(scrambled)
    order = [lines.index(r) for r in (":ARG1 ", ":ARG2 ", ":ARG10 ", ":op1 ", ":op2 ", ":purpose ")]
    assert order == sorted(order)


def test_triples_counts():
    one = parse_graph_text("(h / hold-03)")
    assert {(t.source, t.relation, t.target) for t in to_triples(one)} == {("h", "instance", "hold-03"),
                                                                         ("h", "TOP", "hold-03")}
    g = parse_graph_text(MOVE_TO_BREST)
    assert len(g.nodes) == 6 and len(g.edges) == 7
    assert len(to_triples(g)) == 14


@pytest.mark.parametrize("seed", range(20))
def test_triple_count_identity(seed):
    g = random_graph(random.Random(seed), 1 + seed % 7)
    assert len(to_triples(g)) == len(g.nodes) + len(g.edges) + 1


def test_round_trip_200_random_graphs():
    rng = random.Random(2024)
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 9))
        text = serialize_graph(g)
        again = parse_graph_text(text)
        assert is_isomorphic(g, again), text
        assert serialize_graph(again) == text


def test_isomorphism_detects_differences():
    g = parse_graph_text(MOVE_TO_BREST)
    renamed = g.rename({"m": "z", "u": "y", "c2": "x", "n2": "w", "p2": "q", "n3": "r"})
    assert is_isomorphic(g, renamed)
    other = parse_graph_text(MOVE_TO_BREST.replace("Brest", "Paris"))
    assert not is_isomorphic(g, other)


def test_blocks_with_ids():
    text = "# ::id m1\n(h / hold-03)\n\n# ::id m2\n()\n"
    blocks = parse_graph_blocks(text)
    assert [i for i, _ in blocks] == ["m1", "m2"]
    assert blocks[1][1].is_empty
    assert parse_graph_blocks(graphs_to_text(blocks))[0][0] == "m1"


# -- checker ---------------------------------------------------------------------


def test_build_location_rule():
    bad = parse_graph_text('(b / build-01 :ARG0 (c / country :name (n / name :op1 "England")) '
                           ':ARG1 (f / fleet :location (p / province :name (n2 / name :op1 "London"))))')
    codes = [(d.code, d.severity, d.message) for d in check_diplomacy_graph(bad)]
    assert ("build-location", "error", "location must attach to build-01") in codes
    good = parse_graph_text('(b / build-01 :ARG0 (c / country :name (n / name :op1 "England")) '
                            ':ARG1 (f / fleet) :location (p / province :name (n2 / name :op1 "London")))')
    assert [d for d in check_diplomacy_graph(good) if d.severity == "error"] == []


def test_bump_graph_missing_only_country():
    g = parse_graph_text(BUMP_FROM_ROMANIA)
    diags = check_diplomacy_graph(g)
    assert [d for d in diags if d.severity == "error"] == []
    assert underspecification(g).missing == {"unit-nationality"}


def test_brest_graph_missing_location():
    assert underspecification(parse_graph_text(MOVE_TO_BREST)).missing == {"unit-location"}


def test_unknown_concept_and_missing_destination():
    g = parse_graph_text("(m / move-01 :ARG1 (u / frobnicate-01))")
    codes = {d.code for d in check_diplomacy_graph(g)}
    assert "unknown-concept" in codes and "missing-destination" in codes


def test_agreement_without_object():
    assert underspecification(parse_graph_text("(a / agree-01 :ARG0 (i / i))")).missing == {"agreement-object"}
    assert not underspecification(parse_graph_text("(a / agree-01 :ARG0 (i / i) :ARG1 (m / move-01 "
                                                   ":ARG1 (f / fleet :mod (c / country) :location (p / province)) "
                                                   ":ARG2 (q / province)))"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_renaming_preserves_triples_and_checks(seed, n):
    g = random_graph(random.Random(seed), n)
    mapping = {v: f"r{i}" for i, v in enumerate(sorted(g.nodes))}
    h = g.rename(mapping)
    assert len(to_triples(h)) == len(to_triples(g))
    assert [(d.code, d.severity) for d in check_diplomacy_graph(h)] == \
           [(d.code, d.severity) for d in check_diplomacy_graph(g)] or \
           sorted((d.code, d.severity) for d in check_diplomacy_graph(h)) == \
           sorted((d.code, d.severity) for d in check_diplomacy_graph(g))
    assert underspecification(h) == underspecification(g)


_SLOT_ADDITIONS = {
    "unit-location": (Edge("u", "location", "p"), {"p": "province"}),
    "unit-nationality": (Edge("u", "mod", "c"), {"c": "country"}),
}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["unit", "army", "fleet"]), st.booleans(), st.booleans(),
       st.sampled_from(["unit-location", "unit-nationality"]))
def test_adding_a_slot_never_adds_missing_slots(kind, has_loc, has_country, slot):
    nodes = {"m": "move-01", "u": kind, "d": "province"}
    edges = [Edge("m", "ARG1", "u"), Edge("m", "ARG2", "d")]
    if has_loc:
        nodes["p"] = "province"
        edges.append(Edge("u", "location", "p"))
    if has_country:
        nodes["c"] = "country"
        edges.append(Edge("u", "mod", "c"))
    g = IntentGraph(nodes, tuple(edges), "m")
    edge, extra = _SLOT_ADDITIONS[slot]
    if set(extra) & set(nodes):
        return
    h = IntentGraph({**nodes, **extra}, tuple(edges) + (edge,), "m")
    assert underspecification(h).missing <= underspecification(g).missing
    assert slot not in underspecification(h).missing
