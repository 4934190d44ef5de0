"""Broken-commitment and persuasion detection against logged intents.

For a grounded action ``a`` from a message in a turn:

* a commitment (or agreement) is broken when ``a`` is not among the
  sender's final orders;
* a proposal is a persuasion attempt when ``a`` is not among the
  recipient's initial intents, and a success when it also appears among
  the recipient's final orders.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from dipcomm.errors import MissingLedgerEntry, NoActorUnit
from dipcomm.game.orders import Order, parse_order
from dipcomm.game.powers import Power
from dipcomm.game.rules import validate_order
from dipcomm.game.state import GameState
from dipcomm.parser.acts import ActKind, CommunicativeAct, MessageContext
from dipcomm.parser.grammar import extract_acts
from dipcomm.parser.grounding import ground

BROKEN_COMMITMENT = "broken_commitment"
PERSUASION_ATTEMPT = "persuasion_attempt"
PERSUASION_SUCCESS = "persuasion_success"
EVENT_KINDS = (BROKEN_COMMITMENT, PERSUASION_ATTEMPT, PERSUASION_SUCCESS)


def broken_commitment(action: Order, finals: Iterable[Order]) -> int:
    return int(action not in set(finals))


def persuasion(intents: Iterable[Order], action: Order, finals: Iterable[Order]) -> int:
    return int(action in set(finals) and action not in set(intents))


# -- ledger ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LedgerEntry:
    initial: frozenset[Order] | None = None
    final: frozenset[Order] | None = None


class IntentLedger:
    """Initial intents and final orders per (power, turn key)."""

    def __init__(self):
        self._entries: dict[tuple[Power, str], LedgerEntry] = {}

    def _check(self, orders: Iterable[Order], state: GameState | None) -> frozenset[Order]:
        orders = frozenset(orders)
        if state is not None:
            for o in orders:
                diag = validate_order(state, o)
                if diag is not None:
                    raise ValueError(f"ledger order {o} is illegal: {diag}")
        return orders

    def record_initial(self, power: Power, turn: str, orders: Iterable[Order], state: GameState | None = None):
        e = self._entries.get((power, turn), LedgerEntry())
        self._entries[(power, turn)] = LedgerEntry(self._check(orders, state), e.final)

    def record_final(self, power: Power, turn: str, orders: Iterable[Order], state: GameState | None = None):
        e = self._entries.get((power, turn), LedgerEntry())
        self._entries[(power, turn)] = LedgerEntry(e.initial, self._check(orders, state))

    def initial(self, power: Power, turn: str) -> frozenset[Order]:
        e = self._entries.get((power, turn))
        if e is None or e.initial is None:
            raise MissingLedgerEntry(f"no initial intents for {power} in {turn}")
        return e.initial

    def final(self, power: Power, turn: str) -> frozenset[Order]:
        e = self._entries.get((power, turn))
        if e is None or e.final is None:
            raise MissingLedgerEntry(f"no final orders for {power} in {turn}")
        return e.final

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[tuple[Power, str, LedgerEntry]]:
        for (p, t), e in sorted(self._entries.items()):
            yield p, t, e

    def to_records(self) -> list[dict]:
        out = []
        for p, t, e in self:
            out.append({
                "power": p.value,
                "turn": t,
                "initial": None if e.initial is None else sorted(o.render() for o in e.initial),
                "final": None if e.final is None else sorted(o.render() for o in e.final),
            })
        return out

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "IntentLedger":
        led = cls()
        for r in records:
            p = Power.parse(r["power"])
            if r.get("initial") is not None:
                led.record_initial(p, r["turn"], [parse_order(x) for x in r["initial"]])
            if r.get("final") is not None:
                led.record_final(p, r["turn"], [parse_order(x) for x in r["final"]])
        return led


# -- events ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectionEvent:
    kind: str
    message_id: str
    sender: Power
    recipient: Power
    turn: str
    action: Order
    verdict: int

    def as_dict(self) -> dict:
        d = asdict(self)
        d["sender"] = self.sender.value
        d["recipient"] = self.recipient.value
        d["action"] = self.action.render()
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def scan_turn(acts: Sequence[CommunicativeAct], ledger: IntentLedger, turn: str) -> list[DetectionEvent]:
    """Events for the grounded acts of one negotiation turn.

    Conditional acts, third-party reports and acts with an empty grounding
    are skipped. When a commitment grounds to several orders, it counts as
    kept if any of them was played.
    """
    events: list[DetectionEvent] = []
    seen: set[tuple] = set()

    def emit(kind: str, act: CommunicativeAct, action: Order, verdict: int):
        key = (kind, act.message_id, action)
        if key in seen:
            return
        seen.add(key)
        events.append(DetectionEvent(kind, act.message_id, act.sender, act.recipient, turn, action, verdict))

    for act in acts:
        if act.conditional or not act.grounded:
            continue
        cands = sorted(act.grounded)
        if act.kind in (ActKind.COMMITMENT, ActKind.AGREEMENT):
            finals = ledger.final(act.actor, turn)
            kept = [o for o in cands if o in finals]
            action = kept[0] if kept else cands[0]
            emit(BROKEN_COMMITMENT, act, action, broken_commitment(action, finals))
        elif act.kind is ActKind.PROPOSAL:
            intents = ledger.initial(act.actor, turn)
            finals = ledger.final(act.actor, turn)
            asked = [o for o in cands if o not in intents]
            if not asked:
                continue
            won = [o for o in asked if persuasion(intents, o, finals)]
            emit(PERSUASION_ATTEMPT, act, won[0] if won else asked[0], 1)
            if won:
                emit(PERSUASION_SUCCESS, act, won[0], 1)
    return events


@dataclass(frozen=True)
class TurnMessage:
    message_id: str
    sender: Power
    recipient: Power
    text: str


def analyze_message(msg: TurnMessage, state: GameState,
                    prior: Sequence[CommunicativeAct] = ()) -> list[CommunicativeAct]:
    """Grounded acts of one message; ``prior`` holds earlier acts of the turn."""
    ctx = MessageContext(msg.sender, msg.recipient, state, message_id=msg.message_id)
    out = []
    for act in extract_acts(msg.text, ctx, prior):
        try:
            orders = ground(act, ctx)
        except NoActorUnit:
            orders = frozenset()
        out.append(act.with_grounding(orders))
    return out


def analyze_turn(messages: Sequence[TurnMessage], state: GameState) -> list[CommunicativeAct]:
    """Extract and ground the acts of one turn's messages, in order."""
    acts: list[CommunicativeAct] = []
    for msg in messages:
        acts.extend(analyze_message(msg, state, acts))
    return acts


def detect_turn(messages: Sequence[TurnMessage], state: GameState, ledger: IntentLedger) -> list[DetectionEvent]:
    return scan_turn(analyze_turn(messages, state), ledger, state.turn.key)


# -- evaluation -----------------------------------------------------------------------


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def message_flags(events: Iterable[DetectionEvent], kind: str = BROKEN_COMMITMENT) -> dict[str, bool]:
    """Per-message prediction: any event of ``kind`` with verdict 1."""
    flags: dict[str, bool] = {}
    for e in events:
        if e.kind == kind:
            flags[e.message_id] = flags.get(e.message_id, False) or bool(e.verdict)
    return flags


def confusion(predicted, gold: Mapping[str, bool], kind: str = BROKEN_COMMITMENT) -> Confusion:
    """Message-level confusion counts over the messages in ``gold``.

    ``predicted`` is either a map from message id to flag or a list of
    events, reduced with :func:`message_flags`. Messages with no prediction
    count as negative.
    """
    if not isinstance(predicted, Mapping):
        predicted = message_flags(predicted, kind)
    tp = fp = fn = tn = 0
    for mid, truth in gold.items():
        guess = bool(predicted.get(mid, False))
        if guess and truth:
            tp += 1
        elif guess:
            fp += 1
        elif truth:
            fn += 1
        else:
            tn += 1
    return Confusion(tp, fp, fn, tn)
