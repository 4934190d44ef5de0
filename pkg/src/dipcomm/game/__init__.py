"""Diplomacy domain model: map, orders, states, legality and adjudication."""
from dipcomm.game.adjudicator import ResolutionReport, adjudicate, auto_retreats, civil_disorder_disbands
from dipcomm.game.board import ARMY, FLEET, GameMap, Province, load_map, parse_map, standard_map
from dipcomm.game.orders import Order, OrderKind, Unit, parse_order, render_order
from dipcomm.game.powers import POWERS, Power
from dipcomm.game.rules import Diagnostic, legal_builds, legal_moves, validate_order
from dipcomm.game.state import GameState, Turn, initial_state, make_state, supply_center_count

__all__ = [
    "ARMY", "FLEET", "Diagnostic", "GameMap", "GameState", "Order", "OrderKind", "POWERS", "Power",
    "Province", "ResolutionReport", "Turn", "Unit", "adjudicate", "auto_retreats", "civil_disorder_disbands",
    "initial_state", "legal_builds", "legal_moves", "load_map", "make_state", "parse_map", "parse_order",
    "render_order", "standard_map", "supply_center_count", "validate_order",
]
