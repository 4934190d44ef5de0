import random

import pytest

from _gen import random_state
from _oracles import grounding_oracle
from dipcomm.errors import NoActorUnit
from dipcomm.game import POWERS, Power, legal_builds, legal_moves, make_state, parse_order
from dipcomm.intent import parse_graph_text, underspecification
from dipcomm.parser import (
    ActKind,
    GraphBuilder,
    MessageContext,
    classify_attempt,
    extract_acts,
    ground,
    ground_graph,
    preprocess,
)
from dipcomm.parser.templates import AMR_ONLY, NATURAL_LANGUAGE, render_message

ENG, GER, RUS, TUR, AUS, ITA = Power.ENG, Power.GER, Power.RUS, Power.TUR, Power.AUS, Power.ITA
STATE = make_state(["GER F SKA", "ENG F NWY", "RUS A SWE", "RUS F STP/SC", "RUS A RUM", "TUR F BLA",
                    "ENG A LON", "AUS A VIE"])
STEAL_STP = "You can steal STP from Russia if you're in SWE next turn. I will support you there."


def ctx(sender, recipient, state=STATE, mid="m1"):
    return MessageContext(sender, recipient, state, message_id=mid)


# -- preprocessing ----------------------------------------------------------------


def test_preprocess_pronouns_and_there():
    out = preprocess("I will support you there", ENG, GER)
    assert out.text == "England will support Germany there"
    assert [r.original for r in out.replacements] == ["I", "you"]


def test_preprocess_abbreviations():
    assert preprocess("SWE", ENG, GER).text == "Sweden"
    assert preprocess("F STP/SC to BOT via StP", ENG, GER).text == \
        "F St. Petersburg (south coast) to Gulf of Bothnia via St. Petersburg"
    # spelled-out aliases stay as written, full names containing aliases are untouched
    assert preprocess("Romania and Gulf of Lyon", ENG, GER).text == "Romania and Gulf of Lyon"


@pytest.mark.parametrize("text", [STEAL_STP, "Yeah I am holding London", "your ENG fleet, my StP army",
                                  "I'm moving to Brest", "Are you moving to Helgoland?"])
def test_preprocess_idempotent(text):
    once = preprocess(text, TUR, ITA).text
    assert preprocess(once, TUR, ITA).text == once


# -- extraction ----------------------------------------------------------------------


def test_steal_quote_gives_proposal_and_support_commitment():
    acts = extract_acts(STEAL_STP, ctx(ENG, GER))
    assert [a.kind for a in acts] == [ActKind.PROPOSAL, ActKind.COMMITMENT]
    proposal, support = acts
    g = proposal.action_graph
    assert g.concept(g.root) == "move-01" and g.name_of(g.target(g.root, "ARG2")) == "Sweden"
    assert g.concept(g.target(g.root, "purpose")) == "gain-02"
    assert not proposal.conditional and proposal.actor == GER
    assert support.actor == ENG
    assert ground(proposal, ctx(ENG, GER)) == {parse_order("F SKA - SWE")}
    assert ground(support, ctx(ENG, GER)) == {parse_order("F NWY S F SKA - SWE")}


def test_short_answer_binds_to_latest_proposal():
    prior = extract_acts(STEAL_STP, ctx(ENG, GER, mid="e1"))
    (agreement,) = extract_acts("Sure", ctx(GER, ENG, mid="g1"), prior)
    assert agreement.kind is ActKind.AGREEMENT and agreement.actor == GER
    assert agreement.accepts == "e1"
    assert ground(agreement, ctx(GER, ENG)) == {parse_order("F SKA - SWE")}


def test_short_answer_without_proposal_is_nothing():
    assert extract_acts("Sure", ctx(GER, ENG)) == []
    # a commitment from the other side is not something to agree to
    prior = extract_acts("I am going to try to move to English Channel", ctx(GER, ENG))
    assert [a.kind for a in prior] == [ActKind.COMMITMENT]
    assert extract_acts("Sure", ctx(ENG, GER), prior) == []


@pytest.mark.parametrize("text", ["Lemme think about your idea", "Any designs on Norway?",
                                  "I think you could get it this turn.", "Are you moving to Helgoland?",
                                  "I'm not gonna move out of Belgium", "It might help you hold London",
                                  "Nice, with support from Hel that should work out."])
def test_messages_without_acts(text):
    assert extract_acts(text, ctx(ENG, GER)) == []


def test_bump_leaves_nationality_open():
    (act,) = extract_acts("just bumping Bulgaria from Romania", ctx(RUS, TUR))
    g = act.action_graph
    assert g.concept(g.root) == "move-01"
    assert underspecification(g).missing == {"unit-nationality"}
    assert g.name_of(g.target(g.target(g.root, "ARG1"), "location")) == "Romania"


def test_first_person_move_names_the_country():
    acts = extract_acts("Let's work on our plan, I'm moving to Brest", ctx(AUS, ITA))
    (move_act,) = [a for a in acts if a.action_graph.concept(a.action_graph.root) == "move-01"]
    assert underspecification(move_act.action_graph).missing == {"unit-location"}


def test_hold_statement_after_yes():
    (act,) = extract_acts("Yeah I am holding London", ctx(ENG, GER))
    assert act.kind is ActKind.COMMITMENT
    assert ground(act, ctx(ENG, GER)) == {parse_order("A LON H")}


def test_conditionals_are_flagged():
    tur_msg = extract_acts("If you retreat from Serbia into Budapest, then I'm in", ctx(TUR, ITA, mid="t1"))
    assert [a.kind for a in tur_msg] == [ActKind.PROPOSAL] and tur_msg[0].conditional
    reply = extract_acts("I will do that if Serbia gets dislodged", ctx(ITA, TUR), tur_msg)
    assert [a.kind for a in reply] == [ActKind.AGREEMENT] and reply[0].conditional


def test_dmz_and_alliance_are_classified_but_not_grounded():
    (dmz,) = extract_acts("Yes, we can keep Burgundy clear", ctx(ENG, GER))
    assert dmz.action_graph.concept(dmz.action_graph.root) == "demilitarize-01"
    assert ground(dmz, ctx(ENG, GER)) == frozenset()
    (ally,) = extract_acts("Let's work together on England.", ctx(Power.FRA, GER))
    assert ally.action_graph.concept(ally.action_graph.root) == "ally-01"


def test_third_party_reports():
    (act,) = extract_acts("Russia will move to Norway", ctx(ENG, GER))
    assert act.kind is ActKind.THIRD_PARTY_REPORT and act.actor == RUS


def test_order_shorthand_in_text():
    (act,) = extract_acts("You should probably move Sweden -> Norway.", ctx(ENG, RUS))
    assert act.kind is ActKind.PROPOSAL
    assert ground(act, ctx(ENG, RUS)) == {parse_order("A SWE - NWY")}


def test_graph_text_messages():
    text = render_message(ActKind.PROPOSAL, parse_order("F SKA - SWE", STATE), ENG, GER, AMR_ONLY)
    (act,) = extract_acts(text, ctx(ENG, GER))
    assert act.kind is ActKind.PROPOSAL and ground(act, ctx(ENG, GER)) == {parse_order("F SKA - SWE")}
    assert extract_acts("()", ctx(ENG, GER)) == []


# -- grounding ---------------------------------------------------------------------


def test_bump_grounds_with_nationality_from_the_board():
    g = parse_graph_text('(m / move-01 :ARG1 (u / unit :location (p / province :name (n / name :op1 "Romania"))) '
                         ':ARG2 (p2 / province :name (n2 / name :op1 "Bulgaria")))')
    (order,) = ground_graph(g, STATE)
    assert order == parse_order("A RUM - BUL") and order.unit.owner == RUS


def test_no_actor_unit():
    (act,) = extract_acts("I will move my fleet in Skagerrak to Sweden.", ctx(ENG, GER))
    with pytest.raises(NoActorUnit):
        ground(act, ctx(ENG, GER))


def test_ambiguous_move_has_several_candidates():
    (act,) = extract_acts("I will move to Norway", ctx(RUS, ENG))
    assert ground(act, ctx(RUS, ENG)) == {parse_order("A SWE - NWY")}
    (act,) = extract_acts("I will move my army", ctx(RUS, ENG))
    assert parse_order("A SWE - NWY") in ground(act, ctx(RUS, ENG))
    assert parse_order("A RUM - BUL") in ground(act, ctx(RUS, ENG))


def test_classify_attempt():
    o = parse_order("F SKA - SWE")
    assert classify_attempt(o, [parse_order("F SKA - NTH")])
    assert not classify_attempt(o, [o])


def _partial_graph(order, rng):
    """The order's graph with some unit slots dropped."""
    b = GraphBuilder()
    gmap = STATE.game_map

    def unit(u, acting):
        kind = u.kind if rng.random() < 0.5 else None
        loc = gmap.province(u.province).name if (rng.random() < 0.6 or not acting) else None
        nat = u.owner if rng.random() < 0.5 else None
        return b.unit(kind, loc, None, nat)

    k = order.kind.value
    if k == "move":
        r = b.node("move-01")
        b.edge(r, "ARG1", unit(order.unit, True))
        b.edge(r, "ARG2", b.province(gmap.province(order.dest.split("/")[0]).name))
    elif k == "hold":
        r = b.node("hold-01")
        b.edge(r, "ARG1", unit(order.unit, True))
    elif k == "support_move":
        r = b.node("support-01")
        b.edge(r, "ARG0", unit(order.unit, True))
        m = b.node("move-01")
        b.edge(r, "ARG1", m)
        b.edge(m, "ARG1", unit(order.target, False))
        b.edge(m, "ARG2", b.province(gmap.province(order.dest).name))
    elif k == "support_hold":
        r = b.node("support-01")
        b.edge(r, "ARG0", unit(order.unit, True))
        b.edge(r, "ARG1", unit(order.target, False))
    else:
        r = b.node("transport-01")
        b.edge(r, "ARG0", unit(order.unit, True))
        b.edge(r, "ARG1", unit(order.target, False))
        b.edge(r, "ARG2", b.province(gmap.province(order.dest).name))
    return b.build(r)


@pytest.mark.parametrize("seed", range(6))
def test_grounding_matches_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(8):
        state = random_state(rng, rng.randint(4, 10), "S1902M")
        u = rng.choice(sorted(state.units))
        order = rng.choice(sorted(legal_moves(state, u)))
        g = _partial_graph(order, rng)
        got = ground_graph(g, state)
        assert got == grounding_oracle(g, state)
        assert order in got


def test_grounding_builds_matches_brute_force():
    state = make_state(["ENG F NTH"], turn="W1901A", sc_ownership={"LON": ENG, "EDI": ENG, "LVP": ENG, "NWY": ENG})
    g = parse_graph_text('(b / build-01 :ARG0 (c / country :name (n / name :op1 "England")) :ARG1 (u / unit) '
                         ':location (p / province :name (n2 / name :op1 "London")))')
    assert ground_graph(g, state) == grounding_oracle(g, state) == \
        {o for o in legal_builds(state, ENG) if o.unit.province == "LON"}


# -- templates ---------------------------------------------------------------------


def test_templates():
    o = parse_order("F SKA - SWE", STATE)
    assert render_message(ActKind.COMMITMENT, o, GER, ENG, NATURAL_LANGUAGE) == \
        "I will move my fleet in Skagerrak to Sweden."
    s = parse_order("F NWY S F SKA - SWE", STATE)
    assert render_message(ActKind.PROPOSAL, s, GER, ENG, NATURAL_LANGUAGE) == \
        "You should support my fleet in Skagerrak into Sweden with your fleet in Norway."


def test_render_parse_round_trip():
    rng = random.Random(77)
    for _ in range(100):
        state = random_state(rng, rng.randint(4, 16), "F1903M")
        u = rng.choice(sorted(state.units))
        order = rng.choice(sorted(legal_moves(state, u)))
        kind = rng.choice([ActKind.COMMITMENT, ActKind.PROPOSAL])
        other = rng.choice([p for p in POWERS if p != u.owner])
        s, r = (u.owner, other) if kind is ActKind.COMMITMENT else (other, u.owner)
        for level in (NATURAL_LANGUAGE, AMR_ONLY):
            c = MessageContext(s, r, state)
            (act,) = extract_acts(render_message(kind, order, s, r, level), c)
            assert act.kind is kind and ground(act, c) == {order}
