from dipcomm.parser.acts import ActKind, CommunicativeAct, MessageContext
from dipcomm.parser.grammar import extract_acts
from dipcomm.parser.graphs import GraphBuilder, UnitSpec, order_graph, read_unit
from dipcomm.parser.grounding import classify_attempt, ground, ground_all, ground_graph
from dipcomm.parser.preprocess import NormalizedText, preprocess

__all__ = [
    "ActKind", "CommunicativeAct", "GraphBuilder", "MessageContext", "NormalizedText", "UnitSpec",
    "classify_attempt", "extract_acts", "ground", "ground_all", "ground_graph", "order_graph", "preprocess",
    "read_unit",
]
