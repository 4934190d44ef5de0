"""Intent graphs: representation, PENMAN text, triples and domain checks."""
from dipcomm.intent.checker import GraphDiagnostic, Underspecification, check_diplomacy_graph, underspecification
from dipcomm.intent.graph import (
    Edge,
    IntentGraph,
    Literal,
    Triple,
    graphs_to_text,
    is_isomorphic,
    parse_graph_blocks,
    parse_graph_text,
    serialize_graph,
    to_triples,
)
from dipcomm.intent.vocab import DEFAULT_VOCABULARY, DiplomacyVocabulary

__all__ = [
    "DEFAULT_VOCABULARY", "DiplomacyVocabulary", "Edge", "GraphDiagnostic", "IntentGraph", "Literal", "Triple",
    "Underspecification", "check_diplomacy_graph", "graphs_to_text", "is_isomorphic", "parse_graph_blocks",
    "parse_graph_text", "serialize_graph", "to_triples", "underspecification",
]
