"""Text normalization before extraction: first- and second-person pronouns
become country names and province abbreviations become full names.

Only abbreviations are expanded (upper-case codes such as "SWE" and short
aliases such as "StP"); longer spellings like "Romania" are left as written
because the province grammar already recognizes them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from dipcomm.game.board import GameMap, standard_map
from dipcomm.game.powers import Power

COAST_WORDS = {"NC": "north coast", "SC": "south coast", "EC": "east coast"}


@dataclass(frozen=True)
class Replacement:
    start: int  # offsets into the text the replacement was applied to
    end: int
    original: str
    replacement: str


@dataclass(frozen=True)
class NormalizedText:
    text: str
    original: str
    replacements: tuple[Replacement, ...] = ()

    def __str__(self) -> str:
        return self.text


# Pronoun forms in priority order; {S} is the sender, {R} the recipient.
_PRONOUNS = [
    (r"I'm|I am|Im", "{S} is"),
    (r"I've|I have", "{S} has"),
    (r"I'll", "{S} will"),
    (r"I'd", "{S} would"),
    (r"I", "{S}"),
    (r"[Mm]e|[Mm]yself", "{S}"),
    (r"[Mm]y|[Mm]ine", "{S}'s"),
    (r"[Yy]ou're|[Yy]ou are|[Yy]oure", "{R} is"),
    (r"[Aa]re you", "is {R}"),
    (r"[Yy]ou've|[Yy]ou have", "{R} has"),
    (r"[Yy]ou'll", "{R} will"),
    (r"[Yy]ou'd", "{R} would"),
    (r"[Yy]our|[Yy]ours", "{R}'s"),
    (r"[Yy]ou|[Yy]ourself|u", "{R}"),
]
_PRONOUN_RE = re.compile(
    r"(?<![\w'’])(?:" + "|".join(f"(?P<p{i}>{pat})" for i, (pat, _) in enumerate(_PRONOUNS)) + r")(?![\w'’])"
)


def _is_abbreviation(alias: str) -> bool:
    return len(alias) <= 4 or alias.isupper() or "." in alias


@lru_cache(maxsize=8)
def _abbreviations(gmap: GameMap) -> tuple[re.Pattern, dict[str, str]]:
    full: dict[str, str] = {}
    for code, p in gmap.provinces.items():
        full[code] = p.name
        full[p.name] = p.name  # matched so that aliases inside full names stay untouched
        for coast in p.coasts:
            word = COAST_WORDS.get(coast, coast.lower())
            for form in (f"{code}/{coast}", f"{code}({coast})", f"{code} ({coast})"):
                full[form] = f"{p.name} ({word})"
    for alias, code in gmap.alias_forms.items():
        if _is_abbreviation(alias) and alias not in full:
            full[alias] = gmap.provinces[code].name
    keys = sorted(full, key=lambda k: (-len(k), k))
    pattern = re.compile(r"(?<![\w'’.])(" + "|".join(re.escape(k) for k in keys) + r")(?![\w'’])")
    return pattern, full


def _sub(pattern: re.Pattern, text: str, fn, reps: list[Replacement]) -> str:
    pieces, pos = [], 0
    for m in pattern.finditer(text):
        new = fn(m)
        if new is None or new == m.group(0):
            continue
        pieces.append(text[pos:m.start()])
        pieces.append(new)
        reps.append(Replacement(m.start(), m.end(), m.group(0), new))
        pos = m.end()
    pieces.append(text[pos:])
    return "".join(pieces)


def preprocess(text: str, sender: Power, recipient: Power, game_map: GameMap | None = None) -> NormalizedText:
    """Rewrite pronouns and abbreviations. Applying it twice changes nothing."""
    gmap = game_map or standard_map()
    text = text.replace("’", "'")
    reps: list[Replacement] = []

    def on_pronoun(m: re.Match) -> str:
        i = next(k for k in range(len(_PRONOUNS)) if m.group(f"p{k}") is not None)
        return _PRONOUNS[i][1].format(S=sender.full_name, R=recipient.full_name)

    out = _sub(_PRONOUN_RE, text, on_pronoun, reps)
    pattern, full = _abbreviations(gmap)
    out = _sub(pattern, out, lambda m: full[m.group(1)], reps)
    return NormalizedText(out, text, tuple(reps))
