"""Annotated negotiation corpora in JSON Lines.

One record per line, distinguished by ``type``:

* ``header``: ``schema_version`` (optional; checked when present)
* ``state``: ``game_id``, ``turn``, ``units`` ("GER F SKA"), optional ``centers``
* ``orders``: ``game_id``, ``turn``, ``power``, ``initial`` and ``final`` order lists
* ``message``: ``game_id``, ``turn``, ``message_id``, ``sender``, ``recipient``,
  ``text``, optional ``gold`` map of detector kind to flag
* ``annotation``: ``message_id``, ``annotator``, ``outgoing_label``
  (truth/lie/neutral, sender only) or ``incoming_label`` (truth/lie, recipient only)
* ``guess``: ``game_id``, ``annotator``, ``turn`` (int), ``power``, ``guess`` (human/agent)

Malformed records raise :class:`SchemaError` with the line number.
Records that are well formed but break a corpus invariant are kept out and
reported as diagnostics.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from dipcomm.detectors import DetectionEvent, IntentLedger, TurnMessage, analyze_turn, scan_turn
from dipcomm.errors import SchemaError, SchemaMismatch
from dipcomm.game.orders import parse_order
from dipcomm.game.powers import Power
from dipcomm.game.state import GameState, make_state
from dipcomm.simulator.log import check_schema_version

OUTGOING_LABELS = ("truth", "lie", "neutral")
INCOMING_LABELS = ("truth", "lie")
GUESSES = ("human", "agent")

_REQUIRED = {
    "header": (),
    "state": ("game_id", "turn", "units"),
    "orders": ("game_id", "turn", "power", "initial", "final"),
    "message": ("game_id", "turn", "message_id", "sender", "recipient", "text"),
    "annotation": ("message_id", "annotator"),
    "guess": ("game_id", "annotator", "turn", "power", "guess"),
}


@dataclass(frozen=True)
class CorpusMessage:
    game_id: str
    turn: str
    message_id: str
    sender: Power
    recipient: Power
    text: str
    gold: Mapping[str, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Annotation:
    message_id: str
    annotator: Power
    outgoing_label: str | None = None
    incoming_label: str | None = None


@dataclass(frozen=True)
class IdentityGuessRecord:
    game_id: str
    annotator: Power
    turn: int
    power: Power
    guess: str


@dataclass(frozen=True)
class CorpusDiagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class Corpus:
    messages: list[CorpusMessage] = field(default_factory=list)
    states: dict[tuple[str, str], GameState] = field(default_factory=dict)
    ledgers: dict[str, IntentLedger] = field(default_factory=dict)
    annotations: list[Annotation] = field(default_factory=list)
    guesses: list[IdentityGuessRecord] = field(default_factory=list)
    diagnostics: list[CorpusDiagnostic] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        """Totals in the shape of a corpus overview table."""
        players = {(m.game_id, p) for m in self.messages for p in (m.sender, m.recipient)}
        return {
            "games": len({m.game_id for m in self.messages} | {g for g, _ in self.states}),
            "players": len(players),
            "messages": len(self.messages),
            "lies_sent": sum(1 for a in self.annotations if a.outgoing_label == "lie"),
            "lies_perceived": sum(1 for a in self.annotations if a.incoming_label == "lie"),
            "intents": sum(1 for led in self.ledgers.values() for _ in led),
        }

    def gold(self, kind: str) -> dict[str, bool]:
        return {m.message_id: bool(m.gold[kind]) for m in self.messages if kind in m.gold}

    def turns(self) -> list[tuple[str, str, list[CorpusMessage]]]:
        """Messages grouped by (game, turn), in first-appearance order."""
        groups: dict[tuple[str, str], list[CorpusMessage]] = {}
        for m in self.messages:
            groups.setdefault((m.game_id, m.turn), []).append(m)
        return [(g, t, ms) for (g, t), ms in groups.items()]


def _power(d: Mapping, key: str) -> Power:
    return Power.parse(str(d[key]))


def parse_corpus_lines(lines: Iterable[str]) -> Corpus:
    corpus = Corpus()
    by_id: dict[str, CorpusMessage] = {}
    seen_guess: set[tuple] = set()
    pending: list[tuple[int, Annotation]] = []
    for i, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not JSON: {e.msg}", i) from None
        if not isinstance(d, dict):
            raise SchemaError("record is not an object", i)
        kind = d.get("type")
        if kind not in _REQUIRED:
            raise SchemaError(f"unknown record type {kind!r}", i)
        missing = [k for k in _REQUIRED[kind] if k not in d]
        if missing:
            raise SchemaError(f"{kind} record lacks {', '.join(missing)}", i)
        try:
            if kind == "header":
                check_schema_version(d.get("schema_version"))
            elif kind == "state":
                key = (str(d["game_id"]), str(d["turn"]))
                corpus.states[key] = make_state(d["units"], key[1], d.get("centers"))
            elif kind == "orders":
                led = corpus.ledgers.setdefault(str(d["game_id"]), IntentLedger())
                p, turn = _power(d, "power"), str(d["turn"])
                led.record_initial(p, turn, [parse_order(x) for x in d["initial"]])
                led.record_final(p, turn, [parse_order(x) for x in d["final"]])
            elif kind == "message":
                gold = d.get("gold") or {}
                if not isinstance(gold, dict):
                    raise SchemaError("gold must be an object", i)
                m = CorpusMessage(str(d["game_id"]), str(d["turn"]), str(d["message_id"]), _power(d, "sender"),
                                  _power(d, "recipient"), str(d["text"]), {str(k): bool(v) for k, v in gold.items()})
                if m.message_id in by_id:
                    corpus.diagnostics.append(CorpusDiagnostic(i, f"duplicate message id {m.message_id}"))
                    continue
                if m.sender == m.recipient:
                    corpus.diagnostics.append(CorpusDiagnostic(i, f"{m.message_id} is addressed to its sender"))
                    continue
                if (m.game_id, m.turn) not in corpus.states:
                    corpus.diagnostics.append(CorpusDiagnostic(i, f"{m.message_id}: no state for {m.game_id} {m.turn}"))
                by_id[m.message_id] = m
                corpus.messages.append(m)
            elif kind == "annotation":
                out, inc = d.get("outgoing_label"), d.get("incoming_label")
                if out is not None and out not in OUTGOING_LABELS:
                    raise SchemaError(f"outgoing_label must be one of {OUTGOING_LABELS}", i)
                if inc is not None and inc not in INCOMING_LABELS:
                    raise SchemaError(f"incoming_label must be one of {INCOMING_LABELS}", i)
                if out is None and inc is None:
                    raise SchemaError("annotation carries no label", i)
                pending.append((i, Annotation(str(d["message_id"]), _power(d, "annotator"), out, inc)))
            elif kind == "guess":
                if d["guess"] not in GUESSES:
                    raise SchemaError(f"guess must be one of {GUESSES}", i)
                g = IdentityGuessRecord(str(d["game_id"]), _power(d, "annotator"), int(d["turn"]),
                                        _power(d, "power"), d["guess"])
                key = (g.game_id, g.annotator, g.power, g.turn)
                if key in seen_guess:
                    corpus.diagnostics.append(CorpusDiagnostic(i, f"second guess for {key}"))
                    continue
                if g.annotator == g.power:
                    corpus.diagnostics.append(CorpusDiagnostic(i, f"{g.annotator.value} guesses about itself"))
                    continue
                seen_guess.add(key)
                corpus.guesses.append(g)
        except (SchemaError, SchemaMismatch):
            raise
        except (ValueError, KeyError, TypeError, LookupError) as e:
            raise SchemaError(f"bad {kind} record: {e}", i) from None
    for i, a in pending:
        m = by_id.get(a.message_id)
        if m is None:
            corpus.diagnostics.append(CorpusDiagnostic(i, f"annotation for unknown message {a.message_id}"))
            continue
        if a.outgoing_label is not None and a.annotator != m.sender:
            corpus.diagnostics.append(CorpusDiagnostic(
                i, f"outgoing label on {a.message_id}, which {a.annotator.value} received"))
            continue
        if a.incoming_label is not None and a.annotator != m.recipient:
            corpus.diagnostics.append(CorpusDiagnostic(
                i, f"incoming label on {a.message_id}, which {a.annotator.value} did not receive"))
            continue
        corpus.annotations.append(a)
    corpus.diagnostics.sort(key=lambda d: d.line)
    return corpus


def ingest_corpus(path: str | Path) -> Corpus:
    return parse_corpus_lines(Path(path).read_text(encoding="utf-8").splitlines())


def detect_corpus(corpus: Corpus) -> list[DetectionEvent]:
    """Run the parser and detectors over every (game, turn) with a board state."""
    events: list[DetectionEvent] = []
    for game, turn, msgs in corpus.turns():
        state = corpus.states.get((game, turn))
        if state is None:
            continue
        ledger = corpus.ledgers.get(game, IntentLedger())
        acts = analyze_turn([TurnMessage(m.message_id, m.sender, m.recipient, m.text) for m in msgs], state)
        events.extend(scan_turn(acts, ledger, turn))
    return events


def event_counts(events: Iterable[DetectionEvent]) -> Counter:
    return Counter((e.kind, e.verdict) for e in events)


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture corpus, e.g. ``fixture_path("skagerrak")``."""
    from importlib import resources

    return Path(str(resources.files("dipcomm").joinpath(f"data/fixtures/{name}.jsonl")))
