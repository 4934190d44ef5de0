"""Domain checks on intent graphs: vocabulary, attachment rules, and
detection of slots left for the game state to fill."""
from __future__ import annotations

from dataclasses import dataclass

from dipcomm.intent.graph import IntentGraph, Literal
from dipcomm.intent.vocab import DEFAULT_VOCABULARY, UNIT_CONCEPTS, UNIT_ROLE, DiplomacyVocabulary

ERROR = "error"
UNDERSPECIFIED = "underspecified"

UNIT_KIND = "unit-kind"
UNIT_LOCATION = "unit-location"
UNIT_NATIONALITY = "unit-nationality"
AGREEMENT_OBJECT = "agreement-object"
SLOTS = (UNIT_KIND, UNIT_LOCATION, UNIT_NATIONALITY, AGREEMENT_OBJECT)


@dataclass(frozen=True)
class GraphDiagnostic:
    code: str
    severity: str
    variable: str | None
    message: str

    def __str__(self) -> str:
        where = f" at {self.variable}" if self.variable else ""
        return f"{self.severity} {self.code}{where}: {self.message}"


@dataclass(frozen=True)
class Underspecification:
    missing: frozenset[str] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.missing)


def unit_node(g: IntentGraph, action: str) -> str | None:
    """The unit variable an order-like action is about, if annotated."""
    role = UNIT_ROLE.get(g.nodes[action])
    if role is None:
        return None
    t = g.target(action, role)
    if t is None or isinstance(t, Literal) or g.nodes[t] not in UNIT_CONCEPTS:
        return None
    return t


def _has_country(g: IntentGraph, var: str) -> bool:
    for role in ("mod", "poss"):
        t = g.target(var, role)
        if t is not None and not isinstance(t, Literal) and g.nodes[t] in ("country", "person", "i", "you", "we"):
            return True
    return False


def _action_missing(g: IntentGraph, action: str) -> set[str]:
    concept = g.nodes[action]
    missing: set[str] = set()
    if concept == "agree-01":
        if g.target(action, "ARG1") is None:
            missing.add(AGREEMENT_OBJECT)
        return missing
    if concept not in UNIT_ROLE or concept == "attack-01":
        return missing
    u = unit_node(g, action)
    if u is None:
        missing.add(UNIT_KIND)
        if concept != "build-01":
            missing.add(UNIT_LOCATION)
        if not _actor_country(g, action):
            missing.add(UNIT_NATIONALITY)
        return missing
    if concept == "build-01":
        if g.target(action, "location") is None:
            missing.add(UNIT_LOCATION)
    elif g.target(u, "location") is None:
        missing.add(UNIT_LOCATION)
    if not _has_country(g, u) and not _actor_country(g, action):
        missing.add(UNIT_NATIONALITY)
    return missing


def _actor_country(g: IntentGraph, action: str) -> bool:
    role = UNIT_ROLE.get(g.nodes[action])
    t = g.target(action, "ARG0") if role != "ARG0" else None
    return t is not None and not isinstance(t, Literal) and g.nodes[t] in ("country", "i", "you", "we")


def underspecification(g: IntentGraph) -> Underspecification:
    missing: set[str] = set()
    for v in g.nodes:
        missing |= _action_missing(g, v)
    return Underspecification(frozenset(missing))


def check_diplomacy_graph(g: IntentGraph, vocab: DiplomacyVocabulary = DEFAULT_VOCABULARY) -> list[GraphDiagnostic]:
    """Errors for vocabulary and attachment violations; ``underspecified``
    notes for slots the game state must resolve."""
    out: list[GraphDiagnostic] = []
    for v in sorted(g.nodes):
        concept = g.nodes[v]
        if not vocab.knows_concept(concept):
            out.append(GraphDiagnostic("unknown-concept", ERROR, v, f"{concept} is not in the Diplomacy vocabulary"))
    for e in g.edges:
        if not vocab.knows_role(e.role):
            out.append(GraphDiagnostic("unknown-role", ERROR, e.source, f":{e.role} is not a sanctioned role"))
    for b in g.variables_with("build-01"):
        u = g.target(b, "ARG1")
        if u is not None and not isinstance(u, Literal) and g.target(u, "location") is not None:
            out.append(GraphDiagnostic("build-location", ERROR, b, "location must attach to build-01"))
    for v in sorted(g.nodes):
        if g.nodes[v] == "move-01" and g.target(v, "ARG2") is None:
            out.append(GraphDiagnostic("missing-destination", UNDERSPECIFIED, v, "move-01 has no :ARG2 destination"))
        for slot in sorted(_action_missing(g, v)):
            out.append(GraphDiagnostic(slot, UNDERSPECIFIED, v, f"{g.nodes[v]} leaves {slot} to the game state"))
    return out
