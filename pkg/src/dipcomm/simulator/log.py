"""Game logs as JSON Lines: a header, one record per movement turn, a summary.

Orders are stored in their shorthand ("F SKA - SWE") and units as
"GER F SKA" so that a log can be read without the package.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from dipcomm import SCHEMA_VERSION
from dipcomm.errors import SchemaError, SchemaMismatch
from dipcomm.game.orders import parse_order
from dipcomm.game.powers import POWERS, Power
from dipcomm.game.state import GameState, make_state
from dipcomm.simulator.agents import AgentConfig, Assignment

_SUMMARY_RE = re.compile(
    r"^\s*" + r",\s*".join(rf"(?P<{p.value}>{p.value})\s+(?P<n{p.value}>\d+)" for p in POWERS)
    + r"\.\s*\((?P<comm>[A-Z ]*)\)\s*$"
)


@dataclass(frozen=True)
class MessageRecord:
    message_id: str
    sender: Power
    recipient: Power
    round: int
    level: str
    text: str
    intent_kind: str | None = None  # what the sender meant to convey
    intent_order: str | None = None
    widened: str | None = None  # random-corpus fallback, if any

    def as_dict(self) -> dict:
        return {
            "message_id": self.message_id, "sender": self.sender.value, "recipient": self.recipient.value,
            "round": self.round, "level": self.level, "text": self.text, "intent_kind": self.intent_kind,
            "intent_order": self.intent_order, "widened": self.widened,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MessageRecord":
        return cls(d["message_id"], Power.parse(d["sender"]), Power.parse(d["recipient"]), int(d["round"]),
                   d["level"], d["text"], d.get("intent_kind"), d.get("intent_order"), d.get("widened"))


@dataclass
class TurnLog:
    turn: str
    units: list[str]
    centers: dict[str, str]
    intents: dict[str, list[str]] = field(default_factory=dict)
    messages: list[MessageRecord] = field(default_factory=list)
    finals: dict[str, list[str]] = field(default_factory=dict)
    outcomes: dict[str, str] = field(default_factory=dict)
    retreats: dict[str, list[str]] = field(default_factory=dict)
    adjustments: dict[str, list[str]] = field(default_factory=dict)
    sc_counts: dict[str, int] = field(default_factory=dict)

    def state(self) -> GameState:
        """Board position at the start of the turn."""
        return make_state(self.units, self.turn, self.centers)

    def as_dict(self) -> dict:
        return {
            "record": "turn", "turn": self.turn, "units": self.units, "centers": self.centers,
            "intents": self.intents, "messages": [m.as_dict() for m in self.messages], "finals": self.finals,
            "outcomes": self.outcomes, "retreats": self.retreats, "adjustments": self.adjustments,
            "sc_counts": self.sc_counts,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TurnLog":
        return cls(d["turn"], list(d["units"]), dict(d["centers"]), dict(d["intents"]),
                   [MessageRecord.from_dict(m) for m in d["messages"]], dict(d["finals"]), dict(d["outcomes"]),
                   dict(d.get("retreats", {})), dict(d.get("adjustments", {})), dict(d["sc_counts"]))


@dataclass
class GameLog:
    game_id: str
    root_seed: int
    assignments: dict[Power, Assignment]
    rounds: int
    turns: list[TurnLog] = field(default_factory=list)
    final_centers: dict[Power, int] = field(default_factory=dict)

    @property
    def communicators(self) -> list[Power]:
        return [p for p in POWERS if self.assignments[p].communicates]

    @property
    def summary(self) -> str:
        return format_summary(self.final_centers, self.communicators)

    def level_of(self, power: Power) -> str:
        return self.assignments[power].level

    def messages(self) -> list[MessageRecord]:
        return [m for t in self.turns for m in t.messages]

    def ledger(self):
        from dipcomm.detectors import IntentLedger

        led = IntentLedger()
        for t in self.turns:
            for p, orders in t.intents.items():
                led.record_initial(Power.parse(p), t.turn, [parse_order(x) for x in orders])
            for p, orders in t.finals.items():
                led.record_final(Power.parse(p), t.turn, [parse_order(x) for x in orders])
        return led

    def detect(self):
        """Parse, ground and score every message of the game."""
        from dipcomm.detectors import TurnMessage, analyze_turn, scan_turn

        led = self.ledger()
        events = []
        for t in self.turns:
            if not t.messages:
                continue
            msgs = [TurnMessage(m.message_id, m.sender, m.recipient, m.text) for m in t.messages]
            events.extend(scan_turn(analyze_turn(msgs, t.state()), led, t.turn))
        return events

    # -- serialization ------------------------------------------------------------------

    def header(self) -> dict:
        return {
            "record": "header", "schema_version": SCHEMA_VERSION, "game_id": self.game_id,
            "root_seed": self.root_seed, "rounds": self.rounds,
            "assignments": {p.value: {"level": a.level, **a.agent.as_dict()} for p, a in self.assignments.items()},
        }

    def to_jsonl(self) -> str:
        lines = [self.header()]
        lines += [t.as_dict() for t in self.turns]
        lines.append({"record": "summary", "summary": self.summary,
                      "centers": {p.value: n for p, n in self.final_centers.items()}})
        return "".join(json.dumps(d, sort_keys=True) + "\n" for d in lines)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_jsonl(cls, text: str) -> "GameLog":
        log = None
        for i, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"not JSON: {e.msg}", i) from None
            kind = d.get("record")
            try:
                if kind == "header":
                    check_schema_version(d.get("schema_version"))
                    assignments = {}
                    for p, a in d["assignments"].items():
                        a = dict(a)
                        level = a.pop("level")
                        assignments[Power.parse(p)] = Assignment(AgentConfig.from_dict(a), level)
                    log = cls(d["game_id"], int(d["root_seed"]), assignments, int(d["rounds"]))
                elif log is None:
                    raise SchemaError("record before header", i)
                elif kind == "turn":
                    log.turns.append(TurnLog.from_dict(d))
                elif kind == "summary":
                    log.final_centers = {Power.parse(p): int(n) for p, n in d["centers"].items()}
                else:
                    raise SchemaError(f"unknown record type {kind!r}", i)
            except (KeyError, TypeError, ValueError) as e:
                if isinstance(e, (SchemaError, SchemaMismatch)):
                    raise
                raise SchemaError(f"bad {kind} record: {e}", i) from None
        if log is None:
            raise SchemaError("no header record")
        return log

    @classmethod
    def read(cls, path: str | Path) -> "GameLog":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))


def check_schema_version(version) -> None:
    major = str(SCHEMA_VERSION).split(".")[0]
    if version is None or str(version).split(".")[0] != major:
        raise SchemaMismatch(f"unsupported schema version {version!r}; this reader handles {major}.x")


def format_summary(centers: Mapping[Power, int], communicators: Iterable[Power]) -> str:
    """'AUS 0, ENG 0, FRA 4, GER 10, ITA 5, RUS 6, TUR 9. (FRA GER TUR)'"""
    counts = ", ".join(f"{p.value} {centers.get(p, 0)}" for p in POWERS)
    comm = set(communicators)
    return f"{counts}. ({' '.join(p.value for p in POWERS if p in comm)})"


def parse_summary(line: str) -> tuple[dict[Power, int], list[Power]]:
    m = _SUMMARY_RE.match(line)
    if not m:
        raise SchemaError(f"not a summary line: {line!r}")
    centers = {p: int(m.group(f"n{p.value}")) for p in POWERS}
    comm = [Power.parse(x) for x in m.group("comm").split()]
    return centers, comm
