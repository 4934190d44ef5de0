"""Order legality: validate_order, legal_moves, and convoy reachability."""
from __future__ import annotations

from dataclasses import dataclass

from dipcomm.game.board import ARMY, COASTAL, FLEET, SEA, province_of
from dipcomm.game.orders import Order, OrderKind, Unit, convoy, hold, move, support_hold, support_move
from dipcomm.game.powers import Power
from dipcomm.game.state import ADJUSTMENT, MOVEMENT, RETREAT, GameState, supply_center_count

_PHASE_KINDS = {
    MOVEMENT: {OrderKind.HOLD, OrderKind.MOVE, OrderKind.SUPPORT_HOLD, OrderKind.SUPPORT_MOVE, OrderKind.CONVOY},
    RETREAT: {OrderKind.RETREAT, OrderKind.DISBAND},
    ADJUSTMENT: {OrderKind.BUILD, OrderKind.DISBAND},
}


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


def convoy_components(state: GameState) -> list[frozenset[str]]:
    """Connected groups of fleet-occupied sea provinces."""
    cached = state.__dict__.get("_convoy_components")
    if cached is not None:
        return cached
    gmap = state.game_map
    occupied = {u.province for u in state.units if u.kind == FLEET and gmap.province(u.province).kind == SEA}
    comps: list[frozenset[str]] = []
    seen: set[str] = set()
    for sea in sorted(occupied):
        if sea in seen:
            continue
        stack, comp = [sea], set()
        while stack:
            cur = stack.pop()
            if cur in comp:
                continue
            comp.add(cur)
            for n in gmap.fleet_adj.get(cur, ()):
                if n in occupied and n not in comp:
                    stack.append(n)
        seen |= comp
        comps.append(frozenset(comp))
    object.__setattr__(state, "_convoy_components", comps)
    return comps


def _component_touches(state: GameState, comp: frozenset[str], code: str) -> bool:
    return any(state.game_map.sea_touches(s, code) for s in comp)


def convoy_destinations(state: GameState, origin: str, via_sea: str | None = None) -> set[str]:
    """Coastal provinces an army at ``origin`` could reach through fleet chains."""
    gmap = state.game_map
    if gmap.province(origin).kind != COASTAL:
        return set()
    out: set[str] = set()
    for comp in convoy_components(state):
        if via_sea is not None and via_sea not in comp:
            continue
        if not _component_touches(state, comp, origin):
            continue
        for sea in comp:
            for loc in gmap.fleet_adj.get(sea, ()):
                code = province_of(loc)
                if code != origin and gmap.province(code).kind == COASTAL:
                    out.add(code)
    return out


def could_move(state: GameState, unit: Unit, code: str) -> bool:
    """Geographic possibility of ``unit`` moving into province ``code``."""
    gmap = state.game_map
    if code == unit.province or code not in gmap.provinces:
        return False
    if gmap.can_reach(unit.kind, unit.location, code):
        return True
    return unit.kind == ARMY and code in convoy_destinations(state, unit.province)


def _find(units, unit: Unit) -> Unit | None:
    for u in units:
        if u.province == unit.province:
            return u if u.kind == unit.kind else None
    return None


def validate_order(state: GameState, order: Order) -> Diagnostic | None:
    """Return None for a legal order, else a :class:`Diagnostic` naming the rule broken."""
    gmap = state.game_map
    kind = order.kind
    if kind not in _PHASE_KINDS[state.phase]:
        return Diagnostic("phase", f"{kind.value} orders are not allowed in the {state.phase} phase")
    u = order.unit

    if kind is OrderKind.BUILD:
        return _validate_build(state, order)

    pool = state.dislodged_units() if state.phase == RETREAT else state.units
    actual = _find(pool, u)
    if actual is None:
        return Diagnostic("no-unit", f"no {u.kind} at {u.location}")
    if u.owner is not None and actual.owner != u.owner:
        return Diagnostic("ownership", f"{u} belongs to {actual.owner}, not {u.owner}")
    u = actual

    if kind in (OrderKind.HOLD, OrderKind.DISBAND):
        return None

    if kind is OrderKind.MOVE:
        return _validate_move(state, u, order.dest, order.via_convoy)

    if kind is OrderKind.RETREAT:
        d = _validate_move(state, u, order.dest, False, allow_convoy=False)
        if d is not None:
            return Diagnostic("retreat", d.detail)
        dest = province_of(order.dest)
        if state.unit_at(dest) is not None:
            return Diagnostic("retreat", f"{dest} is occupied")
        origin = next((x.attacker_origin for x in state.dislodged if x.unit.province == u.province), None)
        if dest == origin:
            return Diagnostic("retreat", f"cannot retreat to the attacker's origin {dest}")
        if dest in state.contested:
            return Diagnostic("retreat", f"{dest} was left vacant by a standoff")
        return None

    target = state.unit_at(order.target.province) if order.target else None
    if target is None or target.kind != order.target.kind:
        return Diagnostic("support" if kind is not OrderKind.CONVOY else "convoy",
                          f"no {order.target} to {kind.value.replace('_', ' ')}")
    if target.province == u.province:
        return Diagnostic("support", "a unit cannot support itself")

    if kind is OrderKind.SUPPORT_HOLD:
        if not gmap.can_reach(u.kind, u.location, target.province):
            return Diagnostic("adjacency", f"{u} cannot reach {target.province}")
        return None

    dest = province_of(order.dest)
    if kind is OrderKind.SUPPORT_MOVE:
        if dest == u.province:
            return Diagnostic("support", "cannot support a move into one's own province")
        if not gmap.can_reach(u.kind, u.location, dest):
            return Diagnostic("adjacency", f"{u} cannot reach {dest}")
        if not could_move(state, target, dest):
            return Diagnostic("support", f"{target} cannot move to {dest}")
        return None

    # convoy
    if u.kind != FLEET or gmap.province(u.province).kind != SEA:
        return Diagnostic("convoy", "only fleets at sea can convoy")
    if target.kind != ARMY:
        return Diagnostic("convoy", "only armies can be convoyed")
    if dest == target.province or gmap.province(dest).kind != COASTAL:
        return Diagnostic("convoy", f"{dest} is not a convoy destination")
    if dest not in convoy_destinations(state, target.province, via_sea=u.province):
        return Diagnostic("convoy", f"no fleet chain through {u.province} links {target.province} and {dest}")
    return None


def _validate_move(state: GameState, u: Unit, dest: str | None, via: bool, allow_convoy: bool = True):
    gmap = state.game_map
    if dest is None:
        return Diagnostic("adjacency", "missing destination")
    code = province_of(dest)
    if code not in gmap.provinces:
        return Diagnostic("adjacency", f"unknown province {dest}")
    if code == u.province:
        return Diagnostic("adjacency", "cannot move to the province it occupies")
    target_kind = gmap.province(code).kind
    if u.kind == ARMY and target_kind == SEA:
        return Diagnostic("unit-kind", f"armies cannot enter the sea province {code}")
    if u.kind == FLEET and target_kind != SEA and target_kind != COASTAL:
        return Diagnostic("unit-kind", f"fleets cannot enter the inland province {code}")
    if u.kind == FLEET:
        prov = gmap.province(code)
        if prov.coasts and "/" not in dest:
            options = gmap.fleet_coasts_toward(u.location, code)
            if len(options) != 1:
                return Diagnostic("coast", f"{code} needs a coast for {u}")
            dest = options[0]
        if dest not in gmap.fleet_adj.get(u.location, ()):
            return Diagnostic("adjacency", f"{u} is not adjacent to {dest}")
        return None
    if not via and code in gmap.army_adj.get(u.province, ()):
        return None
    if allow_convoy and code in convoy_destinations(state, u.province):
        return None
    return Diagnostic("adjacency", f"{u} cannot reach {code}")


def build_allowance(state: GameState, power: Power) -> int:
    """Positive: builds owed; negative: disbands owed."""
    return supply_center_count(state, power) - len(state.units_of(power))


def _validate_build(state: GameState, order: Order) -> Diagnostic | None:
    gmap = state.game_map
    u = order.unit
    code = u.province
    prov = gmap.provinces.get(code)
    power = u.owner or (prov.home if prov else None)
    if prov is None or prov.home is None or prov.home != power:
        return Diagnostic("build", f"{code} is not a home center of {power}")
    if state.sc_ownership.get(code) != power:
        return Diagnostic("build", f"{power} does not own {code}")
    if state.unit_at(code) is not None:
        return Diagnostic("build", f"{code} is occupied")
    if not gmap.can_occupy(u.kind, u.location):
        if u.kind == FLEET and prov.coasts:
            return Diagnostic("coast", f"a fleet built in {code} needs a coast")
        return Diagnostic("unit-kind", f"cannot build {u.kind} in {code}")
    if build_allowance(state, power) <= 0:
        return Diagnostic("build", f"{power} has no builds available")
    return None


def legal_moves(state: GameState, unit: Unit) -> set[Order]:
    """Every order for ``unit`` that passes :func:`validate_order`."""
    gmap = state.game_map
    cands: list[Order] = []
    if state.phase == MOVEMENT:
        unit = _find(state.units, unit) or unit
        cands.append(hold(unit))
        for loc in gmap.destinations(unit.kind, unit.location):
            cands.append(move(unit, loc))
        if unit.kind == ARMY:
            for code in convoy_destinations(state, unit.province):
                cands.append(move(unit, code))
        reach = {c for c in gmap.neighbours(unit.province) if gmap.can_reach(unit.kind, unit.location, c)}
        others = [o for o in state.units if o.province != unit.province]
        for other in others:
            if other.province in reach:
                cands.append(support_hold(unit, other))
            for code in reach:
                if could_move(state, other, code):
                    cands.append(support_move(unit, other, code))
        if unit.kind == FLEET and gmap.province(unit.province).kind == SEA:
            for other in others:
                if other.kind != ARMY:
                    continue
                for code in convoy_destinations(state, other.province, via_sea=unit.province):
                    cands.append(convoy(unit, other, code))
    elif state.phase == RETREAT:
        unit = _find(state.dislodged_units(), unit) or unit
        cands.append(Order(OrderKind.DISBAND, unit))
        for loc in gmap.destinations(unit.kind, unit.location):
            cands.append(Order(OrderKind.RETREAT, unit, dest=loc))
    else:
        unit = _find(state.units, unit) or unit
        cands.append(Order(OrderKind.DISBAND, unit))
    return {o for o in cands if validate_order(state, o) is None}


def legal_builds(state: GameState, power: Power) -> set[Order]:
    gmap = state.game_map
    if state.phase != ADJUSTMENT:
        return set()
    out = set()
    for code in gmap.home_centers(power):
        for kind, locs in ((ARMY, [code]), (FLEET, list(gmap.fleet_locations(code)))):
            for loc in locs:
                o = Order(OrderKind.BUILD, Unit(kind, loc, power))
                if validate_order(state, o) is None:
                    out.add(o)
    return out
