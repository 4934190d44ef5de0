from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping

from dipcomm.game.board import GameMap, standard_map
from dipcomm.game.orders import Unit
from dipcomm.game.powers import Power

SPRING, FALL = "Spring", "Fall"
MOVEMENT, RETREAT, ADJUSTMENT = "Movement", "Retreat", "Adjustment"

_TURN_KEY = re.compile(r"^([SFW])(\d{4})([MRA])$")


@dataclass(frozen=True, order=True)
class Turn:
    year: int
    season: str = SPRING
    phase: str = MOVEMENT

    def __post_init__(self):
        if self.year < 1901:
            raise ValueError(f"year {self.year} precedes 1901")
        if self.season not in (SPRING, FALL):
            raise ValueError(f"bad season {self.season!r}")
        if self.phase not in (MOVEMENT, RETREAT, ADJUSTMENT):
            raise ValueError(f"bad phase {self.phase!r}")
        if self.phase == ADJUSTMENT and self.season != FALL:
            raise ValueError("adjustments happen after Fall")

    @property
    def key(self) -> str:
        """Log key such as 'S1901M', 'F1901R' or 'W1901A'."""
        s = "W" if self.phase == ADJUSTMENT else self.season[0]
        return f"{s}{self.year}{self.phase[0]}"

    @classmethod
    def from_key(cls, key: str) -> "Turn":
        m = _TURN_KEY.match(key.strip().upper())
        if not m:
            raise ValueError(f"bad turn key {key!r}")
        s, year, ph = m.groups()
        phase = {"M": MOVEMENT, "R": RETREAT, "A": ADJUSTMENT}[ph]
        season = FALL if s in ("F", "W") else SPRING
        return cls(int(year), season, phase)

    @property
    def sort_index(self) -> int:
        order = {(SPRING, MOVEMENT): 0, (SPRING, RETREAT): 1, (FALL, MOVEMENT): 2, (FALL, RETREAT): 3,
                 (FALL, ADJUSTMENT): 4}
        return self.year * 10 + order[(self.season, self.phase)]

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class Dislodged:
    unit: Unit
    attacker_origin: str


@dataclass(frozen=True)
class GameState:
    """Board position at one phase. Treat as immutable."""

    game_map: GameMap
    turn: Turn
    units: frozenset[Unit]
    sc_ownership: Mapping[str, Power] = field(default_factory=dict)
    dislodged: tuple[Dislodged, ...] = ()
    contested: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "units", frozenset(self.units))
        object.__setattr__(self, "sc_ownership", MappingProxyType(dict(self.sc_ownership)))
        seen: dict[str, Unit] = {}
        for u in self.units:
            if u.province in seen:
                raise ValueError(f"two units in {u.province}: {seen[u.province]} and {u}")
            if not self.game_map.can_occupy(u.kind, u.location):
                raise ValueError(f"{u} cannot stand at {u.location}")
            seen[u.province] = u
        if len(self.sc_ownership) > len(self.game_map.supply_centers):
            raise ValueError("more owned centers than the map has")

    __hash__ = None  # type: ignore[assignment]

    @property
    def phase(self) -> str:
        return self.turn.phase

    @property
    def season(self) -> str:
        return self.turn.season

    @property
    def year(self) -> int:
        return self.turn.year

    def unit_at(self, province: str) -> Unit | None:
        return self._by_province().get(province)

    def _by_province(self) -> dict[str, Unit]:
        cache = self.__dict__.get("_occ")
        if cache is None:
            cache = {u.province: u for u in self.units}
            object.__setattr__(self, "_occ", cache)
        return cache

    def units_of(self, power: Power) -> list[Unit]:
        return sorted(u for u in self.units if u.owner == power)

    def dislodged_units(self) -> list[Unit]:
        return [d.unit for d in self.dislodged]

    def centers_of(self, power: Power) -> list[str]:
        return sorted(c for c, p in self.sc_ownership.items() if p == power)

    def with_(self, **changes) -> "GameState":
        return replace(self, **changes)


def supply_center_count(state: GameState, power: Power) -> int:
    return sum(1 for p in state.sc_ownership.values() if p == power)


def initial_state(game_map: GameMap | None = None, year: int = 1901) -> GameState:
    gmap = game_map or standard_map()
    units = [Unit(kind, gmap.normalize_location(loc), power) for power, kind, loc in gmap.start]
    owners = {c: p.home for c, p in gmap.provinces.items() if p.is_supply_center and p.home is not None}
    return GameState(gmap, Turn(year), frozenset(units), owners)


def make_state(
    units: Iterable[tuple[Power | str, str, str]] | Iterable[str],
    turn: Turn | str = "S1901M",
    sc_ownership: Mapping[str, Power | str] | None = None,
    game_map: GameMap | None = None,
) -> GameState:
    """Build a state from compact unit descriptions.

    ``units`` entries are ``(power, kind, location)`` triples or strings like
    ``"GER F SKA"``. When ``sc_ownership`` is omitted, home centers start
    owned by their home power.
    """
    gmap = game_map or standard_map()
    parsed = []
    for u in units:
        if isinstance(u, str):
            power, kind, loc = u.split()
        else:
            power, kind, loc = u
        parsed.append(Unit(kind.upper(), gmap.normalize_location(loc), Power.parse(str(power))))
    if isinstance(turn, str):
        turn = Turn.from_key(turn)
    if sc_ownership is None:
        owners = {c: p.home for c, p in gmap.provinces.items() if p.is_supply_center and p.home is not None}
    else:
        owners = {c: Power.parse(str(p)) for c, p in sc_ownership.items()}
    return GameState(gmap, turn, frozenset(parsed), owners)

