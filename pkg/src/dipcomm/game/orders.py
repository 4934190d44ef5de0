"""Units, orders, and the conventional order shorthand ("F SKA - SWE")."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

from dipcomm.errors import MalformedOrder, NoSuchUnit, UnknownProvince
from dipcomm.game.board import ARMY, FLEET, GameMap, province_of, standard_map
from dipcomm.game.powers import Power

if TYPE_CHECKING:
    from dipcomm.game.state import GameState


@dataclass(frozen=True, order=True)
class Unit:
    kind: str  # "A" or "F"
    location: str  # province code, or CODE/COAST for fleets on split coasts
    owner: Power | None = None

    @property
    def province(self) -> str:
        return province_of(self.location)

    def render(self) -> str:
        return f"{self.kind} {self.location}"

    def __str__(self) -> str:
        return self.render()


class OrderKind(str, Enum):
    HOLD = "hold"
    MOVE = "move"
    SUPPORT_HOLD = "support_hold"
    SUPPORT_MOVE = "support_move"
    CONVOY = "convoy"
    RETREAT = "retreat"
    DISBAND = "disband"
    BUILD = "build"


MOVEMENT_KINDS = frozenset(
    {OrderKind.HOLD, OrderKind.MOVE, OrderKind.SUPPORT_HOLD, OrderKind.SUPPORT_MOVE, OrderKind.CONVOY}
)


@dataclass(frozen=True, eq=False)
class Order:
    """One unit's instruction.

    Equality and hashing use :meth:`key`, which ignores the owner, the
    ``via_convoy`` flag and coasts; two orders are equal when they move the
    same unit the same way.
    """

    kind: OrderKind
    unit: Unit
    target: Unit | None = None
    dest: str | None = None
    via_convoy: bool = False

    def key(self) -> tuple:
        t = self.target
        return (
            self.kind.value,
            self.unit.kind,
            self.unit.location if self.kind is OrderKind.BUILD else self.unit.province,
            t.kind if t else "",
            t.province if t else "",
            province_of(self.dest) if self.dest else "",
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Order):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __lt__(self, other: "Order") -> bool:
        return self.key() < other.key()

    @property
    def owner(self) -> Power | None:
        return self.unit.owner

    def render(self) -> str:
        u = self.unit.render()
        k = self.kind
        if k is OrderKind.HOLD:
            return f"{u} H"
        if k is OrderKind.MOVE:
            return f"{u} - {self.dest}" + (" VIA" if self.via_convoy else "")
        if k is OrderKind.SUPPORT_HOLD:
            return f"{u} S {self.target.render()}"
        if k is OrderKind.SUPPORT_MOVE:
            return f"{u} S {self.target.render()} - {self.dest}"
        if k is OrderKind.CONVOY:
            return f"{u} C {self.target.render()} - {self.dest}"
        if k is OrderKind.RETREAT:
            return f"{u} R {self.dest}"
        if k is OrderKind.DISBAND:
            return f"{u} D"
        return f"{u} B"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        owner = f"{self.unit.owner.value} " if self.unit.owner else ""
        return f"Order({owner}{self.render()!r})"


def hold(unit: Unit) -> Order:
    return Order(OrderKind.HOLD, unit)


def move(unit: Unit, dest: str, via_convoy: bool = False) -> Order:
    return Order(OrderKind.MOVE, unit, dest=dest, via_convoy=via_convoy)


def support_hold(unit: Unit, target: Unit) -> Order:
    return Order(OrderKind.SUPPORT_HOLD, unit, target=target)


def support_move(unit: Unit, target: Unit, dest: str) -> Order:
    return Order(OrderKind.SUPPORT_MOVE, unit, target=target, dest=dest)


def convoy(unit: Unit, target: Unit, dest: str) -> Order:
    return Order(OrderKind.CONVOY, unit, target=target, dest=dest)


# -- parsing ------------------------------------------------------------------

_ARROW = re.compile(r"\s*(?:->|\u2192|\u2013|\u2014|-)\s*")
_POWER_PREFIX = re.compile(r"^\s*([A-Za-z\-]+)\s*:\s*")


def _tokens(text: str) -> list[str]:
    text = _POWER_PREFIX.sub(lambda m: m.group(1) + " ", text)
    text = _ARROW.sub(" - ", text)
    text = re.sub(r"\s*\(\s*", "(", text)
    return text.upper().split()


def parse_order(text: str, state: "GameState | None" = None, game_map: GameMap | None = None) -> Order:
    """Parse conventional order shorthand into an :class:`Order`.

    With ``state`` the acting unit is looked up on the board (its owner and
    coast are filled in) and a ``-`` order in a retreat phase becomes a
    retreat.
    """
    gmap = state.game_map if state is not None else (game_map or standard_map())
    toks = _tokens(text)
    if not toks:
        raise MalformedOrder("empty order")
    owner: Power | None = None
    if toks[0] in ("BUILD", "DISBAND"):
        verb = toks.pop(0)
        toks.append("B" if verb == "BUILD" else "D")
    if len(toks) > 1 and toks[1] in ("A", "F", "ARMY", "FLEET", "BUILD", "DISBAND"):
        try:
            owner = Power.parse(toks[0])
            toks.pop(0)
        except ValueError:
            pass
    if toks and toks[0] in ("BUILD", "DISBAND"):
        verb = toks.pop(0)
        toks.append("B" if verb == "BUILD" else "D")

    pos = 0

    def take_unit(required_kind: bool) -> Unit:
        nonlocal pos
        if pos >= len(toks):
            raise MalformedOrder(f"missing unit in {text!r}")
        kind = None
        if toks[pos] in (ARMY, FLEET):
            kind = toks[pos]
            pos += 1
        elif toks[pos] in ("ARMY", "FLEET"):
            kind = toks[pos][0]
            pos += 1
        if pos >= len(toks):
            raise MalformedOrder(f"missing location in {text!r}")
        loc = _location(gmap, toks[pos])
        pos += 1
        if kind is None and required_kind:
            raise MalformedOrder(f"missing unit type in {text!r}")
        return Unit(kind or "?", loc)

    actor = take_unit(required_kind=state is None)
    if pos >= len(toks):
        raise MalformedOrder(f"missing order type in {text!r}")
    verb = toks[pos]
    pos += 1
    rest = toks[pos:]

    if state is not None:
        actor = _resolve_actor(state, actor, verb)
    elif owner is not None:
        actor = replace(actor, owner=owner)
    if actor.kind == "?":
        raise MalformedOrder(f"missing unit type in {text!r}")

    if verb == "H" or verb == "HOLD":
        order = hold(actor)
    elif verb == "-":
        if not rest:
            raise MalformedOrder(f"move without destination in {text!r}")
        dest = _location(gmap, rest[0])
        via = len(rest) > 1 and rest[1] == "VIA"
        if len(rest) > (2 if via else 1):
            raise MalformedOrder(f"trailing tokens in {text!r}")
        if state is not None and actor.kind == FLEET:
            dest = _infer_coast(gmap, actor.location, dest)
        if state is not None and state.phase == "Retreat":
            order = Order(OrderKind.RETREAT, actor, dest=dest)
        else:
            order = move(actor, dest, via)
    elif verb == "R":
        if len(rest) != 1:
            raise MalformedOrder(f"retreat needs one destination in {text!r}")
        dest = _location(gmap, rest[0])
        if state is not None and actor.kind == FLEET:
            dest = _infer_coast(gmap, actor.location, dest)
        order = Order(OrderKind.RETREAT, actor, dest=dest)
    elif verb in ("S", "C"):
        pos = 0
        toks = rest
        target = take_unit(required_kind=state is None)
        if state is not None:
            target = _lookup_target(state, target)
        if target.kind == "?":
            raise MalformedOrder(f"missing unit type for target in {text!r}")
        tail = toks[pos:]
        if not tail or tail == ["H"]:
            if verb == "C":
                raise MalformedOrder(f"convoy without destination in {text!r}")
            order = support_hold(actor, target)
        elif tail[0] == "-" and len(tail) == 2:
            dest = _location(gmap, tail[1])
            order = (support_move if verb == "S" else convoy)(actor, target, province_of(dest))
        else:
            raise MalformedOrder(f"cannot read {text!r}")
    elif verb in ("D", "DISBAND") and not rest:
        order = Order(OrderKind.DISBAND, actor)
    elif verb in ("B", "BUILD") and not rest:
        order = Order(OrderKind.BUILD, actor)
    else:
        raise MalformedOrder(f"unknown order type {verb!r} in {text!r}")
    return order


def _location(gmap: GameMap, tok: str) -> str:
    try:
        return gmap.normalize_location(tok)
    except UnknownProvince:
        raise UnknownProvince(tok) from None


def _infer_coast(gmap: GameMap, src: str, dest: str) -> str:
    prov = gmap.province(province_of(dest))
    if prov.coasts and "/" not in dest:
        options = gmap.fleet_coasts_toward(src, prov.code)
        if len(options) == 1:
            return options[0]
    return dest


def _resolve_actor(state: "GameState", unit: Unit, verb: str) -> Unit:
    if verb == "B" or verb == "BUILD":
        if unit.kind == "?":
            raise MalformedOrder("build needs a unit type")
        home = state.game_map.province(unit.province).home
        return replace(unit, owner=home)
    pool = state.dislodged_units() if state.phase == "Retreat" else state.units
    found = next((u for u in pool if u.province == unit.province), None)
    if found is None or (unit.kind != "?" and found.kind != unit.kind):
        raise NoSuchUnit(f"no {unit.kind if unit.kind != '?' else 'unit'} at {unit.location}")
    return found


def _lookup_target(state: "GameState", unit: Unit) -> Unit:
    found = state.unit_at(unit.province)
    if found is not None and (unit.kind == "?" or found.kind == unit.kind):
        return found
    return unit


def render_order(order: Order) -> str:
    return order.render()
