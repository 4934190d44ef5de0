"""Scripted agents: configuration and one-ply order policies.

The policies are deliberately simple. They score each unit's hold or move
by the supply centers it reaches, assign destinations greedily without
self-collisions, then turn idle units into supports for their own attacks.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Mapping

from dipcomm.errors import ConfigInvalid
from dipcomm.game.adjudicator import civil_disorder_disbands
from dipcomm.game.board import ARMY, FLEET, province_of
from dipcomm.game.orders import Order, OrderKind, hold, move, support_move
from dipcomm.game.powers import Power
from dipcomm.game.rules import build_allowance, legal_builds, legal_moves, validate_order
from dipcomm.game.state import FALL, GameState
from dipcomm.parser.templates import AMR_ONLY, NATURAL_LANGUAGE, RANDOM_CORPUS

GREEDY, DEFENSIVE, NEGOTIATOR = "greedy", "defensive", "negotiator"
POLICIES = (GREEDY, DEFENSIVE, NEGOTIATOR)

GUNBOAT = "gunboat"
COMM_LEVELS = (NATURAL_LANGUAGE, AMR_ONLY, RANDOM_CORPUS, GUNBOAT)


@dataclass(frozen=True)
class AgentConfig:
    policy: str = NEGOTIATOR
    honesty: float = 1.0  # probability of keeping each commitment it sends
    persuadability: float = 0.5  # probability of adopting a legal proposal
    seed: int = 0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigInvalid(f"unknown policy {self.policy!r}")
        for name in ("honesty", "persuadability"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                raise ConfigInvalid(f"{name} must be a probability, got {v!r}")
        if not isinstance(self.seed, int):
            raise ConfigInvalid(f"seed must be an integer, got {self.seed!r}")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "AgentConfig":
        unknown = set(d) - {"policy", "honesty", "persuadability", "seed"}
        if unknown:
            raise ConfigInvalid(f"unknown agent fields {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Assignment:
    agent: AgentConfig
    level: str

    def __post_init__(self):
        if self.level not in COMM_LEVELS:
            raise ConfigInvalid(f"unknown communication level {self.level!r}")
        if self.level != GUNBOAT and self.agent.policy != NEGOTIATOR:
            raise ConfigInvalid(f"level {self.level} needs a negotiator, got {self.agent.policy}")

    @property
    def communicates(self) -> bool:
        return self.level != GUNBOAT


# -- movement -------------------------------------------------------------------------


def _foreign_reach(state: GameState, power: Power) -> set[str]:
    gmap = state.game_map
    out: set[str] = set()
    for u in state.units:
        if u.owner != power:
            out.update(gmap.neighbours(u.province))
    return out


def plan_orders(state: GameState, power: Power, policy: str, rng: random.Random) -> dict[str, Order]:
    """One order per unit of ``power``, keyed by province."""
    gmap = state.game_map
    units = state.units_of(power)
    if not units:
        return {}
    targets = [c for c in sorted(gmap.supply_centers) if state.sc_ownership.get(c) != power]
    dist = gmap.distances_from(targets) if targets else {}
    threatened = _foreign_reach(state, power)
    fall = state.season == FALL

    def score(code: str, staying: bool) -> float:
        s = -0.5 * dist.get(code, 8)
        owner = state.sc_ownership.get(code)
        if code in gmap.supply_centers:
            if owner != power:
                s += 3.0 + (1.0 if fall else 0.0)
            elif code in threatened:
                s += 1.5 if staying else 0.5
        other = state.unit_at(code)
        if other is not None and other.owner != power and not staying:
            s -= 1.0
        if policy == DEFENSIVE:
            if staying and owner == power:
                s += 2.0
            if not staying:
                s -= 0.5
        return s + 0.6 * rng.random()

    options = []
    for u in units:
        options.append((score(u.province, True), u.location, hold(u)))
        for loc in sorted(gmap.destinations(u.kind, u.location)):
            options.append((score(province_of(loc), False), u.location, move(u, loc)))
    options.sort(key=lambda t: (-t[0], t[1], t[2].render()))

    own = {u.province for u in units}
    claimed: set[str] = set()
    plan: dict[str, Order] = {}
    for _, _, o in options:
        src = o.unit.province
        if src in plan:
            continue
        dest = src if o.kind is OrderKind.HOLD else province_of(o.dest)
        if dest in claimed or (dest != src and dest in own):
            continue
        plan[src] = o
        claimed.add(dest)
    return coordinate_supports(state, plan)


def coordinate_supports(state: GameState, plan: dict[str, Order]) -> dict[str, Order]:
    """Turn holding units that are not guarding a threatened center into
    supports for their own side's contested moves."""
    gmap = state.game_map
    moves = [o for o in plan.values() if o.kind is OrderKind.MOVE]
    out = dict(plan)
    for src, o in sorted(plan.items()):
        if o.kind is not OrderKind.HOLD or src in gmap.supply_centers:
            continue
        for m in moves:
            dest = province_of(m.dest)
            if not gmap.can_reach(o.unit.kind, o.unit.location, dest):
                continue
            s = support_move(o.unit, m.unit, dest)
            if validate_order(state, s) is None:
                out[src] = s
                break
    return out


def alternative_order(state: GameState, order: Order, rng: random.Random) -> Order:
    """A legal order for the same unit that differs from ``order``."""
    if order.kind is not OrderKind.HOLD:
        return hold(order.unit)
    gmap = state.game_map
    locs = sorted(gmap.destinations(order.unit.kind, order.unit.location))
    rng.shuffle(locs)
    for loc in locs:
        o = move(order.unit, loc)
        if validate_order(state, o) is None:
            return o
    return order


# -- retreats and adjustments -----------------------------------------------------------


def plan_retreats(state: GameState, power: Power, rng: random.Random) -> list[Order]:
    gmap = state.game_map
    out: list[Order] = []
    used: set[str] = set()
    for u in sorted(d.unit for d in state.dislodged if d.unit.owner == power):
        opts = sorted((o for o in legal_moves(state, u) if o.kind is OrderKind.RETREAT), key=Order.render)
        opts = [o for o in opts if province_of(o.dest) not in used]
        if not opts:
            out.append(Order(OrderKind.DISBAND, u))
            continue
        opts.sort(key=lambda o: (-(province_of(o.dest) in gmap.supply_centers) - rng.random()))
        used.add(province_of(opts[0].dest))
        out.append(opts[0])
    return out


def plan_adjustments(state: GameState, power: Power, rng: random.Random) -> list[Order]:
    n = build_allowance(state, power)
    if n < 0:
        return [Order(OrderKind.DISBAND, u) for u in civil_disorder_disbands(state, power, -n)]
    if n == 0:
        return []
    by_code: dict[str, list[Order]] = {}
    for o in sorted(legal_builds(state, power), key=Order.render):
        by_code.setdefault(o.unit.province, []).append(o)
    codes = sorted(by_code)
    rng.shuffle(codes)
    out = []
    for code in codes[:n]:
        opts = by_code[code]
        armies = [o for o in opts if o.unit.kind == ARMY]
        fleets = [o for o in opts if o.unit.kind == FLEET]
        if armies and (not fleets or rng.random() < 0.6):
            out.append(armies[0])
        else:
            out.append(fleets[rng.randrange(len(fleets))])
    return out
