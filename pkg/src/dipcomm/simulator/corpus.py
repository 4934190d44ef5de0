"""Random-message corpus: past-game chatter replayed without regard to the board."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from dipcomm.errors import EmptyCorpus, SchemaError
from dipcomm.game.powers import Power

PAIR = "pair"  # no record for the year, sampled from the same sender and recipient
ANY = "any"  # no record for the pair either, sampled from the whole corpus


@dataclass(frozen=True)
class CorpusRecord:
    sender: Power
    recipient: Power
    year: int
    text: str


@dataclass(frozen=True)
class SampledMessage:
    text: str
    widened: str | None = None


def parse_corpus(lines: Sequence[str]) -> list[CorpusRecord]:
    out = []
    for i, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            out.append(CorpusRecord(Power.parse(d["sender"]), Power.parse(d["recipient"]), int(d["year"]),
                                    str(d["text"])))
        except (ValueError, KeyError, TypeError) as e:
            raise SchemaError(f"bad corpus record: {e}", i) from None
    return out


def load_corpus(path: str | Path | None = None) -> list[CorpusRecord]:
    """Load a JSON Lines corpus; with no path, the bundled one."""
    if path is None:
        text = resources.files("dipcomm").joinpath("data/random_corpus.jsonl").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_corpus(text.splitlines())


def sample_random_message(corpus: Sequence[CorpusRecord], sender: Power, recipient: Power, year: int,
                          rng: random.Random) -> SampledMessage:
    """Uniform draw over records matching sender, recipient and year.

    Falls back to the (sender, recipient) records and then to the whole
    corpus; ``widened`` says which fallback was used.
    """
    if not corpus:
        raise EmptyCorpus("random-message corpus is empty")
    pool = [r for r in corpus if r.sender == sender and r.recipient == recipient and r.year == year]
    widened = None
    if not pool:
        pool = [r for r in corpus if r.sender == sender and r.recipient == recipient]
        widened = PAIR
    if not pool:
        pool = list(corpus)
        widened = ANY
    return SampledMessage(pool[rng.randrange(len(pool))].text, widened)
