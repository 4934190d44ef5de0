"""Concept and role inventory for Diplomacy intent graphs."""
from __future__ import annotations

from dataclasses import dataclass, field

# Action and relation concepts that carry game meaning.
ACTION_CONCEPTS = frozenset({
    "ally-01", "build-01", "move-01", "transport-01", "attack-01", "betray-01", "defend-01", "expect-01",
    "fear-01", "have-03", "lie-08", "possible-01", "prevent-01", "tell-01", "threaten-01", "warn-01",
    "demilitarize-01", "gain-02", "hold-01", "lose-02", "support-01", "agree-01", "retreat-01", "disband-01",
})

# Entity and glue concepts that appear inside action graphs.
STRUCTURAL_CONCEPTS = frozenset({
    "unit", "army", "fleet", "country", "province", "sea", "supply-center", "name", "person", "thing",
    "and", "or", "i", "you", "we", "they", "turn", "date-entity", "season", "amr-unknown",
    "want-01", "plan-01", "think-01", "hope-01", "know-01", "say-01", "propose-01", "go-02", "take-01",
    "need-01", "recommend-01", "ask-01", "request-01", "promise-01", "cause-01", "contrast-01",
    "have-condition-91", "steal-01", "next", "after", "before",
})

ROLES = frozenset(
    {f"ARG{i}" for i in range(6)} | {f"op{i}" for i in range(1, 10)} | {
        "mod", "location", "purpose", "condition", "name", "polarity", "mode", "time", "quant", "domain",
        "poss", "manner", "topic", "source", "destination", "direction", "instrument", "beneficiary",
        "accompanier", "duration", "frequency", "part", "value", "degree", "example", "li",
    })

# Partial map to the structured agent negotiation syntax.
DAIDE_EQUIVALENTS = {
    "ally-01": "ALY",
    "build-01": "BLD",
    "move-01": "MTO",
    "transport-01": "CTO",
    "support-01": "SUP",
    "hold-01": "HLD",
    "demilitarize-01": "DMZ",
    "retreat-01": "RTO",
    "disband-01": "DSB",
}

UNIT_CONCEPTS = frozenset({"unit", "army", "fleet"})

# Which role of each order-like concept names the unit that acts.
UNIT_ROLE = {
    "move-01": "ARG1",
    "hold-01": "ARG1",
    "retreat-01": "ARG1",
    "disband-01": "ARG1",
    "build-01": "ARG1",
    "support-01": "ARG0",
    "transport-01": "ARG0",
    "attack-01": "ARG0",
}

ORDER_CONCEPTS = frozenset({"move-01", "hold-01", "support-01", "transport-01", "retreat-01", "disband-01",
                            "build-01"})


@dataclass(frozen=True)
class DiplomacyVocabulary:
    concepts: frozenset[str] = ACTION_CONCEPTS
    structural: frozenset[str] = STRUCTURAL_CONCEPTS
    roles: frozenset[str] = ROLES
    daide_equivalents: dict[str, str] = field(default_factory=lambda: dict(DAIDE_EQUIVALENTS))

    def knows_concept(self, concept: str) -> bool:
        return concept in self.concepts or concept in self.structural

    def knows_role(self, role: str) -> bool:
        return role in self.roles or role == "TOP"


DEFAULT_VOCABULARY = DiplomacyVocabulary()
