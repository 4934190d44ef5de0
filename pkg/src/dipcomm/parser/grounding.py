"""Resolving action graphs to the concrete legal orders they can mean."""
from __future__ import annotations

from typing import Iterable

from dipcomm.errors import NoActorUnit
from dipcomm.game.board import ARMY, FLEET, GameMap
from dipcomm.game.orders import Order, OrderKind, Unit, hold, move, support_hold, support_move
from dipcomm.game.orders import convoy as convoy_order
from dipcomm.game.powers import POWERS, Power
from dipcomm.game.rules import validate_order
from dipcomm.game.state import RETREAT, GameState
from dipcomm.intent.checker import unit_node
from dipcomm.intent.graph import IntentGraph, Literal
from dipcomm.parser.acts import ActKind, CommunicativeAct, MessageContext
from dipcomm.parser.graphs import CONCEPT_KIND, UnitSpec, read_place, read_power, read_unit

GROUNDABLE = frozenset({"move-01", "retreat-01", "hold-01", "disband-01", "support-01", "transport-01", "build-01"})


def _var(g: IntentGraph, var: str, role: str) -> str | None:
    t = g.target(var, role)
    return None if t is None or isinstance(t, Literal) else t


def _units(state: GameState, spec: UnitSpec, retreat: bool = False) -> list[Unit]:
    pool = state.dislodged_units() if retreat else state.units
    return sorted(u for u in pool if spec.matches(u))


def _destinations(gmap: GameMap, place: tuple[str, str | None] | None, unit: Unit | None) -> list[str]:
    """Candidate destination strings, spelling out coasts for fleets."""
    if place is None:
        return []
    code, coast = place
    if coast:
        return [f"{code}/{coast}"]
    if unit is not None and unit.kind == FLEET and gmap.province(code).coasts:
        return [code] + [f"{code}/{c}" for c in gmap.province(code).coasts]
    return [code]


def _all_destinations(gmap: GameMap, unit: Unit) -> list[str]:
    return sorted(gmap.destinations(unit.kind, unit.location)) + sorted(
        c for c in gmap.provinces if unit.kind == ARMY and c != unit.province)


def _actor_spec(g: IntentGraph, var: str | None, gmap: GameMap, actor: Power | None) -> UnitSpec:
    spec = read_unit(g, var, gmap)
    if spec.nationality is None and actor is not None:
        spec = UnitSpec(spec.kind, spec.province, spec.coast, actor)
    return spec


def _instantiate(g: IntentGraph, root: str, state: GameState, actor: Power | None) -> tuple[list[Order], list[Unit]]:
    """Candidate orders (not yet validated) and the acting units they draw on."""
    gmap = state.game_map
    concept = g.nodes[root]
    out: list[Order] = []
    if concept in ("move-01", "retreat-01"):
        retreat = concept == "retreat-01" or state.phase == RETREAT
        spec = _actor_spec(g, unit_node(g, root), gmap, actor)
        units = _units(state, spec, retreat)
        place = read_place(g, _var(g, root, "ARG2"), gmap)
        for u in units:
            dests = _destinations(gmap, place, u) if place else (
                [] if _var(g, root, "ARG2") is not None else _all_destinations(gmap, u))
            for d in dests:
                out.append(Order(OrderKind.RETREAT, u, dest=d) if retreat else move(u, d))
        return out, units
    if concept in ("hold-01", "disband-01"):
        spec = _actor_spec(g, unit_node(g, root), gmap, actor)
        units = _units(state, spec, concept == "disband-01" and state.phase == RETREAT)
        for u in units:
            out.append(hold(u) if concept == "hold-01" else Order(OrderKind.DISBAND, u))
        return out, units
    if concept == "support-01":
        spec = _actor_spec(g, unit_node(g, root), gmap, actor)
        supporters = _units(state, spec)
        inner = _var(g, root, "ARG1")
        if inner is None:
            return [], supporters
        if g.nodes[inner] == "move-01":
            tspec = read_unit(g, _var(g, inner, "ARG1"), gmap)
            place = read_place(g, _var(g, inner, "ARG2"), gmap)
            if place is None:
                return [], supporters
            targets = _units(state, tspec)
            for s in supporters:
                for t in targets:
                    out.append(support_move(s, t, place[0]))
        elif g.nodes[inner] in CONCEPT_KIND:
            targets = _units(state, read_unit(g, inner, gmap))
            for s in supporters:
                for t in targets:
                    out.append(support_hold(s, t))
        elif g.nodes[inner] == "hold-01":
            targets = _units(state, read_unit(g, unit_node(g, inner), gmap))
            for s in supporters:
                for t in targets:
                    out.append(support_hold(s, t))
        return out, supporters
    if concept == "transport-01":
        spec = _actor_spec(g, unit_node(g, root), gmap, actor)
        fleets = _units(state, UnitSpec(FLEET, spec.province, spec.coast, spec.nationality))
        aspec = read_unit(g, _var(g, root, "ARG1"), gmap)
        armies = _units(state, UnitSpec(ARMY, aspec.province, None, aspec.nationality))
        place = read_place(g, _var(g, root, "ARG2"), gmap)
        if place is not None:
            for f in fleets:
                for a in armies:
                    out.append(convoy_order(f, a, place[0]))
        return out, fleets
    if concept == "build-01":
        power = read_power(g, _var(g, root, "ARG0")) or actor
        kv = _var(g, root, "ARG1")
        kind = CONCEPT_KIND.get(g.nodes[kv]) if kv else None
        place = read_place(g, _var(g, root, "location"), gmap)
        if place is None:
            return [], []
        powers = [power] if power else list(POWERS)
        for p in powers:
            for k in ([kind] if kind else [ARMY, FLEET]):
                locs = [place[0]] if k == ARMY or not gmap.province(place[0]).coasts else (
                    [f"{place[0]}/{place[1]}"] if place[1] else list(gmap.fleet_locations(place[0])))
                for loc in locs:
                    out.append(Order(OrderKind.BUILD, Unit(k, loc, p)))
        # a build needs no unit on the board; report the home center owner as the actor unit pool
        return out, [o.unit for o in out]
    return [], []


def ground_graph(g: IntentGraph, state: GameState, actor: Power | None = None) -> frozenset[Order]:
    """Every legal order ``g`` can stand for.

    Slots the graph leaves open are filled from the state. The acting unit's
    nationality defaults to ``actor`` when given; with ``actor=None`` every
    power's units are candidates. Raises :class:`NoActorUnit` when ``actor``
    is given and owns no unit fitting the graph.
    """
    if g.is_empty:
        return frozenset()
    root = g.root
    if g.nodes[root] == "agree-01":
        inner = _var(g, root, "ARG1")
        if inner is None:
            return frozenset()
        root = inner
    if g.nodes[root] not in GROUNDABLE:
        return frozenset()
    candidates, units = _instantiate(g, root, state, actor)
    if actor is not None and not units:
        raise NoActorUnit(f"{actor} has no unit matching the {g.nodes[root]} graph")
    return frozenset(o for o in candidates if validate_order(state, o) is None)


def ground(act: CommunicativeAct, ctx: MessageContext) -> frozenset[Order]:
    """Grounded order set for one act."""
    if act.kind is ActKind.NONE:
        raise ValueError("cannot ground an act of kind none")
    return ground_graph(act.action_graph, ctx.state, act.actor)


def ground_all(acts: Iterable[CommunicativeAct], ctx: MessageContext) -> list[CommunicativeAct]:
    """Acts with their grounded sets filled in; unresolvable acts get an empty set."""
    out = []
    for act in acts:
        try:
            orders = ground(act, ctx)
        except NoActorUnit:
            orders = frozenset()
        out.append(act.with_grounding(orders))
    return out


def classify_attempt(proposal: Order, intents: Iterable[Order]) -> bool:
    """True when a proposal asks for something the recipient did not already intend."""
    return proposal not in set(intents)
