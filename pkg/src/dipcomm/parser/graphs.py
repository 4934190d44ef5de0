"""Building action graphs for orders and reading their slots back."""
from __future__ import annotations

from dataclasses import dataclass

from dipcomm.errors import UnknownProvince
from dipcomm.game.board import GameMap, province_of, split_location, standard_map
from dipcomm.game.orders import Order, OrderKind, Unit
from dipcomm.game.powers import Power
from dipcomm.intent.graph import Edge, IntentGraph, Literal
from dipcomm.parser.preprocess import COAST_WORDS

KIND_CONCEPT = {"A": "army", "F": "fleet", None: "unit"}
CONCEPT_KIND = {"army": "A", "fleet": "F", "unit": None}
_WORD_COAST = {v: k for k, v in COAST_WORDS.items()}


class GraphBuilder:
    """Accumulates nodes and edges, naming variables after their concept."""

    def __init__(self):
        self.nodes: dict[str, str] = {}
        self.edges: list[Edge] = []
        self._used: dict[str, int] = {}

    def node(self, concept: str) -> str:
        letter = concept[0].lower() if concept[0].isalpha() else "x"
        n = self._used.get(letter, 0) + 1
        self._used[letter] = n
        var = letter if n == 1 else f"{letter}{n}"
        while var in self.nodes:
            n += 1
            self._used[letter] = n
            var = f"{letter}{n}"
        self.nodes[var] = concept
        return var

    def edge(self, source: str, role: str, target) -> None:
        self.edges.append(Edge(source, role, target))

    def named(self, concept: str, name: str) -> str:
        v = self.node(concept)
        n = self.node("name")
        self.edge(v, "name", n)
        self.edge(n, "op1", Literal(name))
        return v

    def country(self, power: Power) -> str:
        return self.named("country", power.full_name)

    def province(self, name: str, coast: str | None = None) -> str:
        v = self.named("province", name)
        if coast:
            self.edge(v, "mod", Literal(COAST_WORDS.get(coast, coast)))
        return v

    def unit(self, kind: str | None = None, location: str | None = None, coast: str | None = None,
             nationality: Power | None = None) -> str:
        v = self.node(KIND_CONCEPT[kind])
        if nationality is not None:
            self.edge(v, "mod", self.country(nationality))
        if location is not None:
            self.edge(v, "location", self.province(location, coast))
        return v

    def graft(self, g: IntentGraph) -> str | None:
        """Copy ``g`` in with fresh variables; returns the new root."""
        if g.is_empty:
            return None
        order = [g.root] + sorted(v for v in g.nodes if v != g.root)
        mapping = {v: self.node(g.nodes[v]) for v in order}
        for e in g.edges:
            t = e.target if isinstance(e.target, Literal) else mapping[e.target]
            self.edge(mapping[e.source], e.role, t)
        return mapping[g.root]

    def build(self, root: str) -> IntentGraph:
        return IntentGraph(self.nodes, tuple(self.edges), root)


# -- order -> graph ---------------------------------------------------------------


def _unit_node(b: GraphBuilder, u: Unit, gmap: GameMap) -> str:
    code, coast = split_location(u.location)
    return b.unit(u.kind, gmap.province(code).name, coast, u.owner)


def _dest_node(b: GraphBuilder, dest: str, gmap: GameMap) -> str:
    code, coast = split_location(dest)
    return b.province(gmap.province(code).name, coast)


def order_graph(order: Order, game_map: GameMap | None = None, builder: GraphBuilder | None = None):
    """Fully specified action graph for one order.

    With ``builder`` given, adds the nodes there and returns the root variable.
    """
    gmap = game_map or standard_map()
    b = builder or GraphBuilder()
    k = order.kind
    if k in (OrderKind.MOVE, OrderKind.RETREAT):
        root = b.node("move-01" if k is OrderKind.MOVE else "retreat-01")
        b.edge(root, "ARG1", _unit_node(b, order.unit, gmap))
        b.edge(root, "ARG2", _dest_node(b, order.dest, gmap))
    elif k in (OrderKind.HOLD, OrderKind.DISBAND):
        root = b.node("hold-01" if k is OrderKind.HOLD else "disband-01")
        b.edge(root, "ARG1", _unit_node(b, order.unit, gmap))
    elif k is OrderKind.SUPPORT_HOLD:
        root = b.node("support-01")
        b.edge(root, "ARG0", _unit_node(b, order.unit, gmap))
        b.edge(root, "ARG1", _unit_node(b, order.target, gmap))
    elif k is OrderKind.SUPPORT_MOVE:
        root = b.node("support-01")
        b.edge(root, "ARG0", _unit_node(b, order.unit, gmap))
        m = b.node("move-01")
        b.edge(root, "ARG1", m)
        b.edge(m, "ARG1", _unit_node(b, order.target, gmap))
        b.edge(m, "ARG2", _dest_node(b, order.dest, gmap))
    elif k is OrderKind.CONVOY:
        root = b.node("transport-01")
        b.edge(root, "ARG0", _unit_node(b, order.unit, gmap))
        b.edge(root, "ARG1", _unit_node(b, order.target, gmap))
        b.edge(root, "ARG2", _dest_node(b, order.dest, gmap))
    elif k is OrderKind.BUILD:
        root = b.node("build-01")
        b.edge(root, "ARG0", b.country(order.unit.owner))
        b.edge(root, "ARG1", b.node(KIND_CONCEPT[order.unit.kind]))
        b.edge(root, "location", _dest_node(b, order.unit.location, gmap))
    else:
        raise ValueError(f"no graph for {order.kind}")
    return root if builder is not None else b.build(root)


# -- graph -> slots ---------------------------------------------------------------


@dataclass(frozen=True)
class UnitSpec:
    """What a graph says about a unit; ``None`` fields are left open."""

    kind: str | None = None
    province: str | None = None
    coast: str | None = None
    nationality: Power | None = None

    def matches(self, u: Unit) -> bool:
        if self.kind is not None and u.kind != self.kind:
            return False
        if self.province is not None and u.province != self.province:
            return False
        if self.coast is not None and split_location(u.location)[1] not in (None, self.coast):
            return False
        return self.nationality is None or u.owner == self.nationality


def _var(g: IntentGraph, var, role: str):
    t = g.target(var, role)
    return None if t is None or isinstance(t, Literal) else t


def read_power(g: IntentGraph, var: str | None) -> Power | None:
    if var is None or g.nodes[var] != "country":
        return None
    name = g.name_of(var)
    if not name:
        return None
    try:
        return Power.parse(name)
    except ValueError:
        return None


def read_place(g: IntentGraph, var: str | None, gmap: GameMap) -> tuple[str, str | None] | None:
    """(province code, coast) named by a province node."""
    if var is None:
        return None
    name = g.name_of(var)
    if not name:
        return None
    try:
        code = gmap.resolve_code(name)
    except UnknownProvince:
        return None
    coast = None
    t = g.target(var, "mod")
    if isinstance(t, Literal):
        coast = _WORD_COAST.get(t.value, t.value.upper())
        if coast not in gmap.province(code).coasts:
            coast = None
    return code, coast


def read_unit(g: IntentGraph, var: str | None, gmap: GameMap) -> UnitSpec:
    if var is None:
        return UnitSpec()
    kind = CONCEPT_KIND.get(g.nodes[var])
    nationality = None
    for role in ("mod", "poss"):
        nationality = nationality or read_power(g, _var(g, var, role))
    place = read_place(g, _var(g, var, "location"), gmap)
    code, coast = place if place else (None, None)
    return UnitSpec(kind, code, coast, nationality)


def location_of(code: str, coast: str | None) -> str:
    return f"{code}/{coast}" if coast else code


def dest_province(dest: str) -> str:
    return province_of(dest)
