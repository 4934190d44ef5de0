import itertools

import pytest

from dipcomm.detectors import (
    BROKEN_COMMITMENT,
    PERSUASION_ATTEMPT,
    PERSUASION_SUCCESS,
    Confusion,
    IntentLedger,
    TurnMessage,
    analyze_turn,
    broken_commitment,
    confusion,
    detect_turn,
    message_flags,
    persuasion,
    scan_turn,
)
from dipcomm.errors import MissingLedgerEntry
from dipcomm.game import Power, make_state, parse_order
from dipcomm.parser import ActKind, CommunicativeAct, order_graph

ENG, GER, RUS = Power.ENG, Power.GER, Power.RUS
STATE = make_state(["GER F SKA", "GER A BER", "ENG F NWY", "ENG A LON", "RUS A SWE", "RUS F STP/SC"])
TURN = "S1901M"
STEAL = "You can steal STP from Russia if you're in SWE next turn. I will support you there."


def _ledger(ger_initial, ger_final, eng_initial=("F NWY H", "A LON H"), eng_final=("F NWY S F SKA - SWE", "A LON H")):
    led = IntentLedger()
    led.record_initial(GER, TURN, [parse_order(x) for x in ger_initial], STATE)
    led.record_final(GER, TURN, [parse_order(x) for x in ger_final], STATE)
    led.record_initial(ENG, TURN, [parse_order(x) for x in eng_initial], STATE)
    led.record_final(ENG, TURN, [parse_order(x) for x in eng_final], STATE)
    return led


def test_agreed_move_broken():
    msgs = [TurnMessage("g1", GER, ENG, "Yes, I agree. I will move to Sweden.")]
    events = detect_turn(msgs, STATE, _ledger(["F SKA - NTH", "A BER H"], ["F SKA - NWY", "A BER H"]))
    assert [(e.kind, e.sender, e.action.render(), e.verdict) for e in events] == \
        [(BROKEN_COMMITMENT, GER, "F SKA - SWE", 1)]


def test_persuaded_move():
    msgs = [TurnMessage("e1", ENG, GER, STEAL), TurnMessage("g1", GER, ENG, "Sure")]
    events = detect_turn(msgs, STATE, _ledger(["F SKA - NTH", "A BER H"], ["F SKA - SWE", "A BER H"]))
    kinds = [(e.kind, e.message_id, e.verdict) for e in events]
    assert (PERSUASION_ATTEMPT, "e1", 1) in kinds and (PERSUASION_SUCCESS, "e1", 1) in kinds
    assert [k for k in kinds if k[0] == BROKEN_COMMITMENT and k[2] == 1] == []
    # the support promise was kept
    assert (BROKEN_COMMITMENT, "e1", 0) in kinds


def test_proposal_already_intended_is_not_an_attempt():
    msgs = [TurnMessage("e1", ENG, GER, STEAL)]
    events = detect_turn(msgs, STATE, _ledger(["F SKA - SWE", "A BER H"], ["F SKA - SWE", "A BER H"]))
    assert [e.kind for e in events] == [BROKEN_COMMITMENT]


def test_missing_ledger_entry():
    acts = analyze_turn([TurnMessage("g1", GER, ENG, "I will move to Sweden.")], STATE)
    with pytest.raises(MissingLedgerEntry):
        scan_turn(acts, IntentLedger(), TURN)


def test_ledger_rejects_illegal_orders_and_round_trips():
    led = IntentLedger()
    with pytest.raises(ValueError):
        led.record_initial(GER, TURN, [parse_order("F SKA - MUN")], STATE)
    led = _ledger(["F SKA - NTH", "A BER H"], ["F SKA - NWY", "A BER H"])
    again = IntentLedger.from_records(led.to_records())
    assert again.final(GER, TURN) == led.final(GER, TURN)
    assert again.initial(ENG, TURN) == led.initial(ENG, TURN)


def _act(kind, order, sender, recipient, conditional=False):
    actor = recipient if kind is ActKind.PROPOSAL else sender
    return CommunicativeAct(kind, order_graph(order), actor, frozenset([order]), conditional, "m", sender, recipient)


UNIVERSE = [parse_order(x) for x in ("F SKA - SWE", "F SKA - NTH", "A BER - KIE", "A BER H")]


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def test_equations_over_all_1024_cases():
    n = 0
    for a, intents, finals in itertools.product(UNIVERSE, list(_subsets(UNIVERSE)), list(_subsets(UNIVERSE))):
        n += 1
        in_f, in_i = a in finals, a in intents
        assert broken_commitment(a, finals) == (0 if in_f else 1)
        assert persuasion(intents, a, finals) == (1 if in_f and not in_i else 0)
        led = IntentLedger()
        led.record_initial(GER, TURN, intents)
        led.record_final(GER, TURN, finals)
        ev = scan_turn([_act(ActKind.COMMITMENT, a, GER, ENG)], led, TURN)
        assert [e.verdict for e in ev] == [broken_commitment(a, finals)]
        ev = scan_turn([_act(ActKind.PROPOSAL, a, ENG, GER)], led, TURN)
        assert sum(e.kind == PERSUASION_SUCCESS for e in ev) == persuasion(intents, a, finals)
        assert sum(e.kind == PERSUASION_ATTEMPT for e in ev) == (0 if in_i else 1)
    assert n == 1024


def test_conditional_acts_are_not_scored():
    led = _ledger(["F SKA - NTH", "A BER H"], ["F SKA - NWY", "A BER H"])
    acts = [_act(ActKind.COMMITMENT, parse_order("F SKA - SWE"), GER, ENG, conditional=True)]
    assert scan_turn(acts, led, TURN) == []


def test_confusion_counts_from_reference_tables():
    c = Confusion(tp=20, fp=19, fn=8, tn=4745)
    assert round(c.precision, 3) == 0.513 and round(c.recall, 3) == 0.714
    c = Confusion(tp=3, fp=72, fn=13, tn=1523)
    assert round(c.precision, 3) == 0.040 and round(c.recall, 3) == 0.188
    c = Confusion(tp=5, fp=284, fn=7, tn=1572)
    assert round(c.precision, 3) == 0.017 and round(c.recall, 3) == 0.417


def test_confusion_from_flags():
    gold = {"a": True, "b": False, "c": True, "d": False}
    pred = {"a": True, "b": True}
    assert confusion(pred, gold) == Confusion(1, 1, 1, 1)
    events = scan_turn([_act(ActKind.COMMITMENT, UNIVERSE[0], GER, ENG)],
                       _ledger(["F SKA - NTH", "A BER H"], ["F SKA - NWY", "A BER H"]), TURN)
    assert message_flags(events) == {"m": True}
    assert confusion(events, {"m": True, "n": False}) == Confusion(1, 0, 0, 1)
