"""Rendering orders as messages at each communication level."""
from __future__ import annotations

from dipcomm.game.board import GameMap, split_location, standard_map
from dipcomm.game.orders import Order, OrderKind, Unit
from dipcomm.game.powers import Power
from dipcomm.intent.graph import serialize_graph
from dipcomm.parser.acts import ActKind
from dipcomm.parser.graphs import GraphBuilder, order_graph
from dipcomm.parser.preprocess import COAST_WORDS

NATURAL_LANGUAGE = "natural_language"
AMR_ONLY = "amr_only"
RANDOM_CORPUS = "random_corpus"
LEVELS = (NATURAL_LANGUAGE, AMR_ONLY, RANDOM_CORPUS)

AGREEMENT_TEXT = "Sure, I agree."
_KIND_WORD = {"A": "army", "F": "fleet"}


def place_name(loc: str, gmap: GameMap) -> str:
    code, coast = split_location(loc)
    name = gmap.province(code).name
    return f"{name} ({COAST_WORDS[coast]})" if coast else name


def unit_phrase(u: Unit, sender: Power, recipient: Power, gmap: GameMap) -> str:
    if u.owner == sender:
        owner = "my"
    elif u.owner == recipient:
        owner = "your"
    elif u.owner is not None:
        owner = f"the {u.owner.adjective}"
    else:
        owner = "the"
    return f"{owner} {_KIND_WORD[u.kind]} in {place_name(u.location, gmap)}"


def order_phrase(order: Order, sender: Power, recipient: Power, game_map: GameMap | None = None) -> str:
    """Verb phrase for an order, e.g. "move my fleet in Skagerrak to Sweden"."""
    gmap = game_map or standard_map()
    u = unit_phrase(order.unit, sender, recipient, gmap)
    k = order.kind
    if k is OrderKind.MOVE:
        return f"move {u} to {place_name(order.dest, gmap)}"
    if k is OrderKind.RETREAT:
        return f"retreat {u} to {place_name(order.dest, gmap)}"
    if k is OrderKind.HOLD:
        return f"hold {u}"
    if k is OrderKind.DISBAND:
        return f"disband {u}"
    t = unit_phrase(order.target, sender, recipient, gmap) if order.target else ""
    if k is OrderKind.SUPPORT_HOLD:
        return f"support {t} to hold with {u}"
    if k is OrderKind.SUPPORT_MOVE:
        return f"support {t} into {place_name(order.dest, gmap)} with {u}"
    if k is OrderKind.CONVOY:
        return f"convoy {t} to {place_name(order.dest, gmap)} with {u}"
    kind = _KIND_WORD[order.unit.kind]
    return f"build an {kind} in {place_name(order.unit.location, gmap)}" if kind == "army" else \
        f"build a {kind} in {place_name(order.unit.location, gmap)}"


def render_natural(kind: ActKind, order: Order, sender: Power, recipient: Power,
                   game_map: GameMap | None = None) -> str:
    vp = order_phrase(order, sender, recipient, game_map)
    if kind is ActKind.COMMITMENT:
        return f"I will {vp}."
    if kind is ActKind.PROPOSAL:
        return f"You should {vp}."
    raise ValueError(f"no template for {kind.value}")


def render_graph(kind: ActKind, order: Order, sender: Power, recipient: Power, agreement: bool = False,
                 game_map: GameMap | None = None) -> str:
    """PENMAN text for the act; the acting unit's nationality tells the reader who acts."""
    if not agreement:
        return serialize_graph(order_graph(order, game_map))
    b = GraphBuilder()
    root = b.node("agree-01")
    b.edge(root, "ARG0", b.country(sender))
    b.edge(root, "ARG1", order_graph(order, game_map, b))
    return serialize_graph(b.build(root))


def render_message(kind: ActKind, order: Order, sender: Power, recipient: Power, level: str,
                   game_map: GameMap | None = None) -> str:
    if level == NATURAL_LANGUAGE:
        if kind is ActKind.AGREEMENT:
            return AGREEMENT_TEXT
        return render_natural(kind, order, sender, recipient, game_map)
    if level == AMR_ONLY:
        return render_graph(kind, order, sender, recipient, kind is ActKind.AGREEMENT, game_map)
    raise ValueError(f"level {level!r} does not render orders")
