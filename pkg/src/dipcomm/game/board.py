"""Map topology: provinces, coasts, per-unit-kind adjacency.

Maps are loaded from a small line-oriented text format (see
``data/standard.map``) so that tests can build miniature boards.
"""
from __future__ import annotations

import shlex
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from dipcomm.errors import MapFormatError, UnknownProvince
from dipcomm.game.powers import Power

LAND, SEA, COASTAL = "land", "sea", "coastal"
ARMY, FLEET = "A", "F"


@dataclass(frozen=True)
class Province:
    code: str
    name: str
    kind: str
    is_supply_center: bool = False
    home: Power | None = None
    coasts: tuple[str, ...] = ()


def split_location(loc: str) -> tuple[str, str | None]:
    """'STP/NC' -> ('STP', 'NC'); 'PAR' -> ('PAR', None)."""
    if "/" in loc:
        code, coast = loc.split("/", 1)
        return code, coast
    return loc, None


def province_of(loc: str) -> str:
    return loc.split("/", 1)[0]


class GameMap:
    """Immutable board description.

    ``army_adj`` maps province codes to province codes; ``fleet_adj`` maps
    fleet locations (a province code, or ``CODE/COAST`` for split-coast
    provinces) to fleet locations.
    """

    def __init__(self, provinces, army_adj, fleet_adj, start=(), aliases=None, version="1", alias_forms=None):
        self.provinces: dict[str, Province] = dict(provinces)
        self.army_adj: dict[str, frozenset[str]] = {k: frozenset(v) for k, v in army_adj.items()}
        self.fleet_adj: dict[str, frozenset[str]] = {k: frozenset(v) for k, v in fleet_adj.items()}
        self.start: tuple[tuple[Power, str, str], ...] = tuple(start)
        self.aliases: dict[str, str] = dict(aliases or {})
        # alias as written in the map file -> province code
        self.alias_forms: dict[str, str] = dict(alias_forms or {a: c for a, c in self.aliases.items()})
        self.version = version
        self._check()
        self._sea_touch = self._build_sea_touch()

    # -- validation -------------------------------------------------------

    def _check(self) -> None:
        for code, nbrs in self.army_adj.items():
            p = self.province(code)
            if p.kind == SEA:
                raise MapFormatError(f"army adjacency on sea province {code}")
            for n in nbrs:
                if self.province(n).kind == SEA:
                    raise MapFormatError(f"army adjacency {code}-{n} enters the sea")
                if code not in self.army_adj.get(n, ()):
                    raise MapFormatError(f"army adjacency {code}-{n} is not symmetric")
        for loc, nbrs in self.fleet_adj.items():
            code, coast = split_location(loc)
            p = self.province(code)
            if p.kind == LAND:
                raise MapFormatError(f"fleet adjacency on land province {code}")
            if p.coasts and coast not in p.coasts:
                raise MapFormatError(f"fleet location {loc} must name one of {p.coasts}")
            if coast and not p.coasts:
                raise MapFormatError(f"{code} has no named coasts")
            for n in nbrs:
                if loc not in self.fleet_adj.get(n, ()):
                    raise MapFormatError(f"fleet adjacency {loc}-{n} is not symmetric")

    def _build_sea_touch(self) -> dict[str, frozenset[str]]:
        touch: dict[str, set[str]] = {}
        for loc, nbrs in self.fleet_adj.items():
            code = province_of(loc)
            if self.provinces[code].kind != SEA:
                continue
            touch.setdefault(code, set()).update(province_of(n) for n in nbrs)
        return {k: frozenset(v) for k, v in touch.items()}

    # -- lookups ----------------------------------------------------------

    def province(self, code: str) -> Province:
        try:
            return self.provinces[code]
        except KeyError:
            raise UnknownProvince(code) from None

    def resolve_code(self, text: str) -> str:
        """Province code for a code, full name or alias (case-insensitive)."""
        key = text.strip()
        up = key.upper()
        if up in self.provinces:
            return up
        low = key.lower()
        for p in self.provinces.values():
            if p.name.lower() == low:
                return p.code
        if low in self.aliases:
            return self.aliases[low]
        raise UnknownProvince(text)

    def normalize_location(self, text: str) -> str:
        """Canonical location string, e.g. 'stp(nc)' -> 'STP/NC'."""
        t = text.strip().upper().replace("(", "/").replace(")", "")
        t = t.replace(" /", "/")
        code, coast = split_location(t)
        code = self.resolve_code(code)
        p = self.provinces[code]
        if coast is None:
            return code
        coast = coast.strip()
        if coast not in p.coasts:
            raise UnknownProvince(f"{code}/{coast}")
        return f"{code}/{coast}"

    @property
    def supply_centers(self) -> frozenset[str]:
        return frozenset(c for c, p in self.provinces.items() if p.is_supply_center)

    def home_centers(self, power: Power) -> frozenset[str]:
        return frozenset(c for c, p in self.provinces.items() if p.home == power)

    def fleet_locations(self, code: str) -> tuple[str, ...]:
        p = self.province(code)
        if p.kind == LAND:
            return ()
        if p.coasts:
            return tuple(f"{code}/{c}" for c in p.coasts)
        return (code,)

    # -- movement ---------------------------------------------------------

    def can_occupy(self, kind: str, loc: str) -> bool:
        code, coast = split_location(loc)
        p = self.provinces.get(code)
        if p is None:
            return False
        if kind == ARMY:
            return p.kind != SEA and coast is None
        return p.kind != LAND and (coast in p.coasts if p.coasts else coast is None)

    def adjacent(self, kind: str, src: str, dst: str) -> bool:
        """Direct adjacency of two locations for a unit kind."""
        if kind == ARMY:
            return province_of(dst) in self.army_adj.get(province_of(src), ())
        return dst in self.fleet_adj.get(src, ())

    def destinations(self, kind: str, src: str) -> frozenset[str]:
        if kind == ARMY:
            return self.army_adj.get(province_of(src), frozenset())
        return self.fleet_adj.get(src, frozenset())

    def can_reach(self, kind: str, src: str, code: str) -> bool:
        """Whether a unit at ``src`` could move into some part of province ``code``."""
        if kind == ARMY:
            return code in self.army_adj.get(province_of(src), ())
        return any(province_of(n) == code for n in self.fleet_adj.get(src, ()))

    def fleet_coasts_toward(self, src: str, code: str) -> list[str]:
        return sorted(n for n in self.fleet_adj.get(src, ()) if province_of(n) == code)

    def sea_touches(self, sea: str, code: str) -> bool:
        return code in self._sea_touch.get(sea, ())

    def seas(self) -> list[str]:
        return sorted(c for c, p in self.provinces.items() if p.kind == SEA)

    def neighbours(self, code: str) -> frozenset[str]:
        """Province-level neighbours for any unit kind."""
        out = set(self.army_adj.get(code, ()))
        for loc in self.fleet_locations(code):
            out.update(province_of(n) for n in self.fleet_adj.get(loc, ()))
        return frozenset(out)

    def distances_from(self, sources) -> dict[str, int]:
        dist = {s: 0 for s in sources}
        queue = deque(dist)
        while queue:
            cur = queue.popleft()
            for n in self.neighbours(cur):
                if n not in dist:
                    dist[n] = dist[cur] + 1
                    queue.append(n)
        return dist


# -- file format --------------------------------------------------------------


def parse_map(text: str) -> GameMap:
    provinces: dict[str, Province] = {}
    coasts: dict[str, tuple[str, ...]] = {}
    army: dict[str, set[str]] = {}
    fleet: dict[str, set[str]] = {}
    start: list[tuple[Power, str, str]] = []
    aliases: dict[str, str] = {}
    alias_forms: dict[str, str] = {}
    version = "1"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            tok = shlex.split(line)
        except ValueError as exc:
            raise MapFormatError(f"line {lineno}: {exc}") from None
        head = tok[0]
        try:
            if head == "version":
                version = tok[1]
            elif head == "province":
                code, kind, sc, home, name = tok[1:6]
                if kind not in (LAND, SEA, COASTAL):
                    raise MapFormatError(f"line {lineno}: bad province kind {kind!r}")
                provinces[code] = Province(
                    code=code,
                    name=name,
                    kind=kind,
                    is_supply_center=sc == "SC",
                    home=None if home == "-" else Power(home),
                )
            elif head == "coasts":
                coasts[tok[1]] = tuple(tok[2:])
            elif head in ("army", "fleet"):
                loc = tok[1].rstrip(":")
                target = army if head == "army" else fleet
                target.setdefault(loc, set()).update(tok[2:])
            elif head == "start":
                start.append((Power(tok[1]), tok[2], tok[3]))
            elif head == "alias":
                for a in tok[2:]:
                    aliases[a.lower()] = tok[1]
                    alias_forms[a] = tok[1]
            else:
                raise MapFormatError(f"line {lineno}: unknown record {head!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, MapFormatError):
                raise
            raise MapFormatError(f"line {lineno}: {exc}") from None
    for code, cs in coasts.items():
        if code not in provinces:
            raise MapFormatError(f"coasts for unknown province {code}")
        p = provinces[code]
        provinces[code] = Province(p.code, p.name, p.kind, p.is_supply_center, p.home, cs)
    for table in (army, fleet):
        for loc, nbrs in table.items():
            for n in (loc, *nbrs):
                if province_of(n) not in provinces:
                    raise UnknownProvince(n)
    return GameMap(provinces, army, fleet, start, aliases, version, alias_forms)


def load_map(path: str | Path) -> GameMap:
    return parse_map(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def standard_map() -> GameMap:
    text = resources.files("dipcomm").joinpath("data/standard.map").read_text(encoding="utf-8")
    return parse_map(text)
