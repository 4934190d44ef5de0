"""Grounding Diplomacy negotiation messages into orders and scoring
broken commitments and persuasion against submitted moves."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1.0"
