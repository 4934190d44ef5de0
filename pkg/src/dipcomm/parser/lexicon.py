"""Placeholder tokenization of province and country mentions.

After tokenization a sentence such as "England will support Germany into
Sweden" reads "«c:eng» will support «c:ger» into «p0»", which keeps the clause
grammar free of place-name spelling.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from dipcomm.game.board import GameMap
from dipcomm.game.powers import POWERS
from dipcomm.parser.preprocess import COAST_WORDS

_WORD_COAST = {v: k for k, v in COAST_WORDS.items()}


@dataclass(frozen=True)
class Mention:
    code: str
    coast: str | None
    surface: str

    def graph_name(self, gmap: GameMap) -> str:
        """Name to put in a graph: the spelled-out alias as written, else the map name."""
        s = self.surface.strip()
        if len(s) > 4 and s.lower() in gmap.aliases and s.lower() != gmap.province(self.code).name.lower():
            return s
        return gmap.province(self.code).name


@lru_cache(maxsize=8)
def _province_regex(gmap: GameMap) -> tuple[re.Pattern, dict[str, str]]:
    lookup: dict[str, str] = {}
    exact: set[str] = set()
    for code, p in gmap.provinces.items():
        lookup[p.name.lower()] = code
        exact.add(code)
    for alias, code in gmap.alias_forms.items():
        lookup.setdefault(alias.lower(), code)
        if len(alias) <= 4:
            exact.add(alias)
    names = {p.name.lower() for p in gmap.provinces.values()}
    spelled = sorted((k for k in lookup if len(k) > 4 or k in names), key=len, reverse=True)
    short = sorted(exact, key=len, reverse=True)
    coast = r"(?:\s*\((?P<c1>north|south|east) coast\)|/(?P<c2>NC|SC|EC)\b)?"
    pre = r"(?:(?P<c0>north|south|east) coast of )?"
    body = "(?P<name>(?i:" + "|".join(re.escape(k) for k in spelled) + ")|" + "|".join(re.escape(k) for k in short) + ")"
    pattern = re.compile(r"(?<![\w«])" + pre + body + r"(?![\w'’-])" + coast)
    for k in short:
        lookup.setdefault(k.lower(), gmap.resolve_code(k))
    return pattern, lookup


_COUNTRY_WORDS: dict[str, str] = {}
for _p in POWERS:
    _COUNTRY_WORDS[_p.full_name.lower()] = _p.value.lower()
    _COUNTRY_WORDS[_p.adjective.lower()] = _p.value.lower()
_COUNTRY_RE = re.compile(r"(?<![\w«])(" + "|".join(sorted(_COUNTRY_WORDS, key=len, reverse=True)) + r")s?(?![\w])",
                         re.I)
_SHORTHAND_RE = re.compile(r"(?<![\w])([AF])\s+(?=«p\d+»)")
_ARTICLE_RE = re.compile(r"\bthe\s+(?=«p\d+»)", re.I)  # "to the North Sea"


def tokenize(text: str, gmap: GameMap) -> tuple[str, list[Mention]]:
    """Replace province and country mentions by placeholders and lower-case the rest."""
    pattern, lookup = _province_regex(gmap)
    mentions: list[Mention] = []

    def on_province(m: re.Match) -> str:
        code = lookup[m.group("name").lower()]
        word = m.group("c0") or m.group("c1")
        coast = _WORD_COAST.get(f"{word} coast") if word else m.group("c2")
        if coast not in gmap.province(code).coasts:
            coast = None
        mentions.append(Mention(code, coast, m.group("name")))
        return f"«p{len(mentions) - 1}»"

    out = pattern.sub(on_province, text)
    out = _COUNTRY_RE.sub(lambda m: f"«c:{_COUNTRY_WORDS[m.group(1).lower()]}»", out)
    out = _SHORTHAND_RE.sub(lambda m: "army " if m.group(1) == "A" else "fleet ", out)
    out = _ARTICLE_RE.sub("", out)
    return out.lower(), mentions
