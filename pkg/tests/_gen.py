"""Seeded random generators shared by property and acceptance tests."""
from __future__ import annotations

import random

from dipcomm.errors import GraphSyntaxError
from dipcomm.game import ARMY, FLEET, POWERS, make_state, standard_map
from dipcomm.intent.graph import Edge, IntentGraph, Literal

CONCEPTS = ["move-01", "unit", "province", "country", "name", "support-01", "army", "fleet"]
ROLES = ["ARG0", "ARG1", "ARG2", "location", "mod", "name", "purpose"]
NAMES = ["Brest", "Austria", "Sweden", "Norway", "Romania"]


def random_graph(rng: random.Random, n_vars: int, concepts=CONCEPTS, extra_edges: int = 2) -> IntentGraph:
    vars_ = [f"v{i}" for i in range(n_vars)]
    rng.shuffle(vars_)
    nodes = {v: rng.choice(concepts) for v in vars_}
    edges = []
    for i in range(1, n_vars):
        edges.append(Edge(vars_[rng.randrange(i)], rng.choice(ROLES), vars_[i]))
    for _ in range(rng.randint(0, extra_edges)):
        a, b = rng.choice(vars_), rng.choice(vars_)
        if a != b:
            edges.append(Edge(a, rng.choice(ROLES), b))
    for _ in range(rng.randint(0, 2)):
        v = rng.choice(vars_)
        if rng.random() < 0.5:
            edges.append(Edge(v, "op1", Literal(rng.choice(NAMES))))
        else:
            edges.append(Edge(v, "polarity", Literal("-", quoted=False)))
    return IntentGraph(nodes, tuple(edges), vars_[0])


def perturb(rng: random.Random, g: IntentGraph) -> IntentGraph:
    """A nearby graph: renamed variables, one concept swapped, one edge dropped."""
    names = list(g.nodes)
    fresh = [f"w{i}" for i in range(len(names))]
    rng.shuffle(fresh)
    h = g.rename(dict(zip(names, fresh)))
    nodes = dict(h.nodes)
    v = rng.choice(sorted(nodes))
    if rng.random() < 0.6:
        nodes[v] = rng.choice(CONCEPTS)
    edges = list(h.edges)
    rel = [e for e in edges if not isinstance(e.target, Literal)]
    if rel and rng.random() < 0.5:
        drop = rng.choice(rel)
        try:
            IntentGraph(nodes, tuple(e for e in edges if e != drop), h.root)
            edges.remove(drop)
        except GraphSyntaxError:
            pass
    lits = [e for e in edges if isinstance(e.target, Literal)]
    if lits and rng.random() < 0.5:
        edges.remove(rng.choice(lits))
    return IntentGraph(nodes, tuple(edges), h.root)


def random_state(rng, n_units=14, turn="S1901M"):
    gmap = standard_map()
    provinces = sorted(gmap.provinces)
    rng.shuffle(provinces)
    units = []
    for code in provinces:
        if len(units) >= n_units:
            break
        p = gmap.province(code)
        if p.kind == "land":
            kind = ARMY
        elif p.kind == "sea":
            kind = FLEET
        else:
            kind = rng.choice([ARMY, FLEET])
        loc = code if kind == ARMY else rng.choice(gmap.fleet_locations(code))
        units.append((rng.choice(POWERS), kind, loc))
    owners = {}
    for c in sorted(gmap.supply_centers):
        owners[c] = rng.choice(POWERS)
    return make_state(units, turn=turn, sc_ownership=owners)


def synthetic_outcomes(rng, games: int, power_effects=None, level_effects=None, noise: float = 1.0,
                       levels=("natural_language", "amr_only", "random_corpus"), base: float = 4.0):
    """End-of-game rows with known effects: three communicators per game at
    the game's level, four gunboat powers, Gaussian noise."""
    from dipcomm.analytics import PowerOutcome

    power_effects = power_effects or {}
    level_effects = level_effects or {}
    rows = []
    for g in range(games):
        level = levels[g % len(levels)]
        comm = set(rng.sample(POWERS, 3))
        for p in POWERS:
            lv = level if p in comm else "gunboat"
            mean = base + power_effects.get(p.value, 0.0) + level_effects.get(lv, 0.0)
            rows.append(PowerOutcome(f"g{g:03d}", p, lv, mean + rng.gauss(0.0, noise) if noise else mean))
    return rows


def random_grounded_act(rng):
    """A commitment or proposal about one legal order on a random board."""
    from dipcomm.game import legal_moves
    from dipcomm.parser import ActKind

    state = random_state(rng, rng.randint(4, 16), rng.choice(["S1902M", "F1903M"]))
    u = rng.choice(sorted(state.units))
    order = rng.choice(sorted(legal_moves(state, u)))
    kind = rng.choice([ActKind.COMMITMENT, ActKind.PROPOSAL])
    other = rng.choice([p for p in POWERS if p != u.owner])
    sender, recipient = (u.owner, other) if kind is ActKind.COMMITMENT else (other, u.owner)
    return state, kind, order, sender, recipient
