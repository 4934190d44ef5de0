"""Simultaneous order resolution.

Movement uses the dependency-driven guess-and-check scheme: each order's
resolution is computed recursively from strength comparisons; when a
dependency cycle admits two consistent answers (or none) a backup rule
decides. Circular movement succeeds. In a convoy paradox every convoyed
army in the cycle holds. A convoyed army never cuts a support aimed at one
of its own convoying fleets.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from dipcomm.errors import PhaseMismatch
from dipcomm.game.board import ARMY, FLEET, province_of
from dipcomm.game.orders import Order, OrderKind, Unit, hold
from dipcomm.game.powers import POWERS, Power
from dipcomm.game.rules import build_allowance, validate_order
from dipcomm.game.state import ADJUSTMENT, FALL, MOVEMENT, RETREAT, SPRING, Dislodged, GameState, Turn

SUCCEEDS = "succeeds"
BOUNCES = "bounces"
CUT = "cut"
DISLODGED = "dislodged"
VOID = "void"
FAILS = "fails"
DISBANDED = "disbanded"


@dataclass(frozen=True)
class ResolutionReport:
    turn: Turn
    outcomes: tuple[tuple[Order, str], ...]
    dislodged: tuple[Dislodged, ...] = ()
    standoffs: frozenset[str] = frozenset()
    notes: tuple[str, ...] = ()

    def outcome(self, order: Order) -> str:
        for o, r in self.outcomes:
            if o == order:
                return r
        raise KeyError(order)

    def as_dict(self) -> dict[str, str]:
        return {o.render(): r for o, r in self.outcomes}


def adjudicate(state: GameState, orders: Mapping[Power, Iterable[Order]]) -> tuple[GameState, ResolutionReport]:
    """Resolve one phase. The phase is taken from ``state``.

    When a unit receives several orders, or a power submits more builds than
    it is owed, the earliest submitted order wins.
    """
    flat = [o for p in POWERS for o in orders.get(p, ())]
    for extra in orders:
        if extra not in POWERS:
            raise ValueError(f"unknown power {extra!r}")
    if state.phase == MOVEMENT:
        return _adjudicate_movement(state, flat)
    if state.phase == RETREAT:
        return _adjudicate_retreats(state, flat)
    return _adjudicate_adjustments(state, flat)


def _check_phase(state: GameState, flat: list[Order], allowed: set[OrderKind]) -> None:
    for o in flat:
        if o.kind not in allowed:
            raise PhaseMismatch(f"{o.render()} ({o.kind.value}) submitted in {state.turn.key}")


# -- movement -----------------------------------------------------------------

_UNRESOLVED, _GUESSING, _RESOLVED = 0, 1, 2


class _Movement:
    def __init__(self, state: GameState, flat: list[Order]):
        self.state = state
        self.gmap = state.game_map
        by_prov: dict[str, Order] = {}
        self.submitted: dict[str, Order] = {}
        self.void: set[str] = set()
        for o in flat:
            unit = state.unit_at(o.unit.province)
            if unit is None or unit.kind != o.unit.kind:
                continue
            if unit.province in by_prov:
                continue  # first order for a unit wins
            if o.unit.owner is not None and o.unit.owner != unit.owner:
                continue
            self.submitted[unit.province] = replace(o, unit=unit)
            if validate_order(state, o) is not None:
                self.void.add(unit.province)
                by_prov[unit.province] = hold(unit)
            else:
                by_prov[unit.province] = replace(o, unit=unit)
        for u in state.units:
            by_prov.setdefault(u.province, hold(u))
        self.orders = by_prov
        self.moves_into: dict[str, list[str]] = {}
        for prov, o in by_prov.items():
            if o.kind is OrderKind.MOVE:
                self.moves_into.setdefault(province_of(o.dest), []).append(prov)
        self.unmatched: set[str] = set()
        for prov, o in by_prov.items():
            if o.kind in (OrderKind.SUPPORT_HOLD, OrderKind.SUPPORT_MOVE, OrderKind.CONVOY):
                if not self._matched(o):
                    self.unmatched.add(prov)
        self.res: dict[str, bool] = {}
        self.status: dict[str, int] = {p: _UNRESOLVED for p in by_prov}
        self.deps: list[str] = []
        self.paradox_blocked: set[str] = set()

    def _matched(self, o: Order) -> bool:
        t = self.orders.get(o.target.province)
        if t is None:
            return False
        if o.kind is OrderKind.SUPPORT_HOLD:
            return t.kind is not OrderKind.MOVE
        if t.kind is not OrderKind.MOVE or province_of(t.dest) != province_of(o.dest):
            return False
        return o.kind is OrderKind.SUPPORT_MOVE or t.unit.kind == ARMY

    # helpers
    def is_convoyed(self, prov: str) -> bool:
        o = self.orders[prov]
        if o.kind is not OrderKind.MOVE or o.unit.kind != ARMY:
            return False
        return o.via_convoy or province_of(o.dest) not in self.gmap.army_adj.get(prov, ())

    def convoy_fleets(self, prov: str) -> list[str]:
        o = self.orders[prov]
        dest = province_of(o.dest)
        return sorted(
            p for p, c in self.orders.items()
            if c.kind is OrderKind.CONVOY and c.target.province == prov and province_of(c.dest) == dest
            and p not in self.unmatched
        )

    def path(self, prov: str) -> bool:
        if not self.is_convoyed(prov):
            return True
        if prov in self.paradox_blocked:
            return False
        o = self.orders[prov]
        dest = province_of(o.dest)
        fleets = [f for f in self.convoy_fleets(prov) if self.resolve(f)]
        frontier = [f for f in fleets if self.gmap.sea_touches(f, prov)]
        seen = set(frontier)
        while frontier:
            cur = frontier.pop()
            if self.gmap.sea_touches(cur, dest):
                return True
            for f in fleets:
                if f not in seen and f in self.gmap.fleet_adj.get(cur, ()):
                    seen.add(f)
                    frontier.append(f)
        return False

    def head_to_head(self, prov: str) -> str | None:
        o = self.orders[prov]
        if o.kind is not OrderKind.MOVE or self.is_convoyed(prov):
            return None
        dest = province_of(o.dest)
        other = self.orders.get(dest)
        if other is not None and other.kind is OrderKind.MOVE and province_of(other.dest) == prov \
                and not self.is_convoyed(dest):
            return dest
        return None

    def supports_for(self, prov: str, moving: bool) -> list[str]:
        out = []
        for p, o in self.orders.items():
            if p in self.unmatched or o.target is None or o.target.province != prov:
                continue
            if moving and o.kind is OrderKind.SUPPORT_MOVE:
                out.append(p)
            elif not moving and o.kind is OrderKind.SUPPORT_HOLD:
                out.append(p)
        return out

    def hold_strength(self, prov: str) -> int:
        o = self.orders.get(prov)
        if o is None:
            return 0
        if o.kind is OrderKind.MOVE:
            return 0 if self.resolve(prov) else 1
        return 1 + sum(1 for s in self.supports_for(prov, False) if self.resolve(s))

    def attack_strength(self, prov: str) -> int:
        if not self.path(prov):
            return 0
        o = self.orders[prov]
        dest = province_of(o.dest)
        defender = self.orders.get(dest)
        h2h = self.head_to_head(prov)
        if defender is None or (defender.kind is OrderKind.MOVE and h2h is None and self.resolve(dest)):
            return 1 + sum(1 for s in self.supports_for(prov, True) if self.resolve(s))
        if defender.unit.owner == o.unit.owner:
            return 0
        return 1 + sum(
            1 for s in self.supports_for(prov, True)
            if self.orders[s].unit.owner != defender.unit.owner and self.resolve(s)
        )

    def defend_strength(self, prov: str) -> int:
        return 1 + sum(1 for s in self.supports_for(prov, True) if self.resolve(s))

    def prevent_strength(self, prov: str) -> int:
        if not self.path(prov):
            return 0
        h2h = self.head_to_head(prov)
        if h2h is not None and self.resolve(h2h):
            return 0
        return 1 + sum(1 for s in self.supports_for(prov, True) if self.resolve(s))

    # core decision
    def adjudicate(self, prov: str) -> bool:
        o = self.orders[prov]
        if o.kind is OrderKind.MOVE:
            dest = province_of(o.dest)
            atk = self.attack_strength(prov)
            if atk == 0:
                return False
            h2h = self.head_to_head(prov)
            if h2h is not None:
                if atk <= self.defend_strength(h2h):
                    return False
            elif atk <= self.hold_strength(dest):
                return False
            for other in self.moves_into.get(dest, ()):
                if other != prov and atk <= self.prevent_strength(other):
                    return False
            return True
        if o.kind in (OrderKind.SUPPORT_HOLD, OrderKind.SUPPORT_MOVE):
            support_dest = province_of(o.dest) if o.kind is OrderKind.SUPPORT_MOVE else None
            for attacker in self.moves_into.get(prov, ()):
                a = self.orders[attacker]
                if a.unit.owner == o.unit.owner:
                    continue
                if attacker == support_dest:
                    continue  # may still dislodge, handled below
                if self.is_convoyed(attacker):
                    if support_dest is not None and support_dest in self.convoy_fleets(attacker):
                        continue
                    if not self.path(attacker):
                        continue
                return False
            if support_dest is not None:
                a = self.orders.get(support_dest)
                if a is not None and a.kind is OrderKind.MOVE and province_of(a.dest) == prov \
                        and a.unit.owner != o.unit.owner and self.resolve(support_dest):
                    return False
            return True
        # hold / convoy: survives unless dislodged
        for attacker in self.moves_into.get(prov, ()):
            if self.resolve(attacker):
                return False
        return True

    def resolve(self, prov: str) -> bool:
        st = self.status[prov]
        if st == _RESOLVED:
            return self.res[prov]
        if st == _GUESSING:
            if prov not in self.deps:
                self.deps.append(prov)
            return self.res[prov]
        old = len(self.deps)
        self.res[prov] = False
        self.status[prov] = _GUESSING
        first = self.adjudicate(prov)
        if len(self.deps) == old:
            if self.status[prov] != _RESOLVED:
                self.res[prov] = first
                self.status[prov] = _RESOLVED
            return first
        if self.deps[old] != prov:
            self.deps.append(prov)
            self.res[prov] = first
            return first
        for p in self.deps[old:]:
            self.status[p] = _UNRESOLVED
        del self.deps[old:]
        self.res[prov] = True
        self.status[prov] = _GUESSING
        second = self.adjudicate(prov)
        if first == second:
            for p in self.deps[old:]:
                self.status[p] = _UNRESOLVED
            del self.deps[old:]
            self.res[prov] = first
            self.status[prov] = _RESOLVED
            return first
        cycle = list(self.deps[old:])
        if prov not in cycle:
            cycle.append(prov)
        del self.deps[old:]
        self._backup(cycle)
        return self.resolve(prov)

    def _backup(self, cycle: list[str]) -> None:
        convoyed = [p for p in cycle if self.orders[p].kind is OrderKind.MOVE and self.is_convoyed(p)]
        involves_convoy = convoyed or any(self.orders[p].kind is OrderKind.CONVOY for p in cycle)
        if involves_convoy:
            blocked = convoyed or [
                a for p in cycle if self.orders[p].kind is OrderKind.CONVOY
                for a in [self.orders[p].target.province]
            ]
            for a in blocked:
                self.paradox_blocked.add(a)
                self.res[a] = False
                self.status[a] = _RESOLVED
            for p in cycle:
                if self.status[p] != _RESOLVED:
                    self.status[p] = _UNRESOLVED
            self.notes.append("convoy paradox: convoyed armies hold (" + ", ".join(sorted(blocked)) + ")")
        else:
            for p in cycle:
                self.res[p] = self.orders[p].kind is OrderKind.MOVE
                self.status[p] = _RESOLVED
            self.notes.append("circular movement: " + ", ".join(sorted(cycle)))

    notes: list[str]

    def run(self) -> dict[str, bool]:
        self.notes = []
        for prov in sorted(self.orders):
            self.resolve(prov)
        return dict(self.res)


def _adjudicate_movement(state: GameState, flat: list[Order]):
    _check_phase(state, flat, {OrderKind.HOLD, OrderKind.MOVE, OrderKind.SUPPORT_HOLD,
                               OrderKind.SUPPORT_MOVE, OrderKind.CONVOY})
    m = _Movement(state, flat)
    res = m.run()
    gmap = state.game_map

    moved: dict[str, Unit] = {}
    for prov, o in m.orders.items():
        if o.kind is OrderKind.MOVE and res[prov]:
            dest = o.dest
            if o.unit.kind == FLEET and gmap.province(province_of(dest)).coasts and "/" not in dest:
                dest = gmap.fleet_coasts_toward(o.unit.location, province_of(dest))[0]
            moved[prov] = replace(o.unit, location=dest)
    dislodged: list[Dislodged] = []
    for prov, o in m.orders.items():
        if prov in moved:
            continue
        winner = next((a for a in m.moves_into.get(prov, ()) if res[a]), None)
        if winner is not None:
            dislodged.append(Dislodged(o.unit, winner))
    dislodged_provs = {d.unit.province for d in dislodged}
    new_units = [u for u in state.units if u.province not in moved and u.province not in dislodged_provs]
    new_units.extend(moved.values())

    standoffs = set()
    for dest, movers in m.moves_into.items():
        if not any(res[a] for a in movers) and state.unit_at(dest) is None and len(movers) >= 2:
            standoffs.add(dest)
        elif not any(res[a] for a in movers) and len(movers) >= 2:
            occupant = m.orders.get(dest)
            if occupant is not None and occupant.kind is OrderKind.MOVE and res[dest]:
                standoffs.add(dest)

    outcomes = []
    for prov in sorted(m.orders):
        o = m.submitted.get(prov, m.orders[prov])
        if prov in dislodged_provs:
            r = DISLODGED
        elif prov in m.void or prov in m.unmatched:
            r = VOID
        elif o.kind is OrderKind.MOVE:
            r = SUCCEEDS if res[prov] else BOUNCES
        elif o.kind in (OrderKind.SUPPORT_HOLD, OrderKind.SUPPORT_MOVE):
            r = SUCCEEDS if res[prov] else CUT
        else:
            r = SUCCEEDS
        outcomes.append((o, r))

    dislodged_t = tuple(sorted(dislodged, key=lambda d: d.unit.province))
    if dislodged_t:
        nxt = replace(state.turn, phase=RETREAT)
        new_state = GameState(gmap, nxt, frozenset(new_units), state.sc_ownership, dislodged_t,
                              frozenset(standoffs))
    else:
        new_state = _after_movement(state, frozenset(new_units))
    report = ResolutionReport(state.turn, tuple(outcomes), dislodged_t, frozenset(standoffs), tuple(m.notes))
    return new_state, report


def _update_centers(state: GameState, units) -> dict[str, Power]:
    owners = dict(state.sc_ownership)
    for u in units:
        if u.province in state.game_map.supply_centers:
            owners[u.province] = u.owner
    return owners


def _after_movement(state: GameState, units: frozenset[Unit]) -> GameState:
    gmap = state.game_map
    if state.season == SPRING:
        return GameState(gmap, Turn(state.year, FALL, MOVEMENT), units, state.sc_ownership)
    owners = _update_centers(state, units)
    return GameState(gmap, Turn(state.year, FALL, ADJUSTMENT), units, owners)


# -- retreats -----------------------------------------------------------------

def _adjudicate_retreats(state: GameState, flat: list[Order]):
    _check_phase(state, flat, {OrderKind.RETREAT, OrderKind.DISBAND})
    chosen: dict[str, Order] = {}
    for o in flat:
        d = next((x for x in state.dislodged if x.unit.province == o.unit.province), None)
        if d is None or o.unit.province in chosen:
            continue
        if validate_order(state, o) is None:
            chosen[o.unit.province] = replace(o, unit=d.unit)
    targets: dict[str, list[str]] = {}
    for prov, o in chosen.items():
        if o.kind is OrderKind.RETREAT:
            targets.setdefault(province_of(o.dest), []).append(prov)
    survivors = []
    outcomes = []
    for d in state.dislodged:
        o = chosen.get(d.unit.province)
        if o is None:
            outcomes.append((Order(OrderKind.DISBAND, d.unit), DISBANDED))
            continue
        if o.kind is OrderKind.RETREAT and len(targets[province_of(o.dest)]) == 1:
            dest = o.dest
            gmap = state.game_map
            if d.unit.kind == FLEET and gmap.province(province_of(dest)).coasts and "/" not in dest:
                dest = gmap.fleet_coasts_toward(d.unit.location, province_of(dest))[0]
            survivors.append(replace(d.unit, location=dest))
            outcomes.append((o, SUCCEEDS))
        else:
            outcomes.append((o, DISBANDED if o.kind is OrderKind.DISBAND else BOUNCES))
    units = frozenset(state.units) | frozenset(survivors)
    report = ResolutionReport(state.turn, tuple(outcomes))
    base = GameState(state.game_map, replace(state.turn, phase=MOVEMENT), units, state.sc_ownership)
    return _after_movement(base, units), report


# -- adjustments ----------------------------------------------------------------

def _adjudicate_adjustments(state: GameState, flat: list[Order]):
    _check_phase(state, flat, {OrderKind.BUILD, OrderKind.DISBAND})
    gmap = state.game_map
    units = set(state.units)
    outcomes = []
    for power in POWERS:
        allowance = build_allowance(state, power)
        mine = [o for o in flat if (o.unit.owner or _owner_at(state, o)) == power]
        if allowance > 0:
            built = 0
            used: set[str] = set()
            for o in mine:
                if o.kind is not OrderKind.BUILD:
                    outcomes.append((o, VOID))
                    continue
                if built < allowance and o.unit.province not in used and validate_order(state, o) is None:
                    units.add(replace(o.unit, owner=power))
                    used.add(o.unit.province)
                    built += 1
                    outcomes.append((o, SUCCEEDS))
                else:
                    outcomes.append((o, VOID))
        elif allowance < 0:
            need = -allowance
            done: set[str] = set()
            for o in mine:
                u = state.unit_at(o.unit.province)
                if o.kind is OrderKind.DISBAND and u is not None and u.owner == power and len(done) < need \
                        and u.province not in done:
                    units.discard(u)
                    done.add(u.province)
                    outcomes.append((o, DISBANDED))
                else:
                    outcomes.append((o, VOID))
            if len(done) < need:
                for u in civil_disorder_disbands(state, power, need - len(done), exclude=done):
                    units.discard(u)
                    outcomes.append((Order(OrderKind.DISBAND, u), DISBANDED))
        else:
            outcomes.extend((o, VOID) for o in mine)
    new_state = GameState(gmap, Turn(state.year + 1, SPRING, MOVEMENT), frozenset(units), state.sc_ownership)
    return new_state, ResolutionReport(state.turn, tuple(outcomes))


def _owner_at(state: GameState, o: Order) -> Power | None:
    u = state.unit_at(o.unit.province)
    if u is not None:
        return u.owner
    return state.game_map.province(o.unit.province).home


def civil_disorder_disbands(state: GameState, power: Power, count: int, exclude=()) -> list[Unit]:
    """Units removed when a power owes disbands it did not order:
    farthest from its home centers first, ties broken by location."""
    gmap = state.game_map
    homes = [c for c in gmap.home_centers(power) if state.sc_ownership.get(c) == power] \
        or list(gmap.home_centers(power))
    dist = gmap.distances_from(homes)
    pool = [u for u in state.units_of(power) if u.province not in exclude]
    pool.sort(key=lambda u: (-dist.get(u.province, 10**6), u.location))
    return pool[:count]


def auto_retreats(state: GameState) -> dict[Power, list[Order]]:
    """Disband orders for every dislodged unit with no legal retreat."""
    from dipcomm.game.rules import legal_moves

    out: dict[Power, list[Order]] = {}
    for d in state.dislodged:
        opts = [o for o in legal_moves(state, d.unit) if o.kind is OrderKind.RETREAT]
        if not opts:
            out.setdefault(d.unit.owner, []).append(Order(OrderKind.DISBAND, d.unit))
    return out
