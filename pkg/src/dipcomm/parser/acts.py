from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from dipcomm.game.orders import Order
from dipcomm.game.powers import Power
from dipcomm.game.state import GameState, Turn
from dipcomm.intent.graph import IntentGraph


class ActKind(str, Enum):
    COMMITMENT = "commitment"
    PROPOSAL = "proposal"
    AGREEMENT = "agreement"
    THIRD_PARTY_REPORT = "third_party_report"
    NONE = "none"


@dataclass(frozen=True)
class MessageContext:
    sender: Power
    recipient: Power
    state: GameState
    turn: Turn | None = None
    message_id: str = ""

    def __post_init__(self):
        if self.sender == self.recipient:
            raise ValueError("sender and recipient must differ")
        if self.turn is None:
            object.__setattr__(self, "turn", self.state.turn)
        elif self.turn != self.state.turn:
            raise ValueError(f"context turn {self.turn} does not match state turn {self.state.turn}")


@dataclass(frozen=True)
class CommunicativeAct:
    """One move-relevant act found in a message.

    ``actor`` is the power whose units would carry the action out: the
    sender for commitments and agreements, the recipient for proposals.
    """

    kind: ActKind
    action_graph: IntentGraph
    actor: Power | None
    grounded: frozenset[Order] = frozenset()
    conditional: bool = False
    message_id: str = ""
    sender: Power | None = None
    recipient: Power | None = None
    span: str = ""
    accepts: str | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.sender is not None:
            if self.kind in (ActKind.COMMITMENT, ActKind.AGREEMENT) and self.actor != self.sender:
                raise ValueError(f"{self.kind.value} must be acted by its sender")
            if self.kind is ActKind.PROPOSAL and self.actor != self.recipient:
                raise ValueError("a proposal must be acted by its recipient")

    def with_grounding(self, orders) -> "CommunicativeAct":
        return replace(self, grounded=frozenset(orders))

    __hash__ = None  # type: ignore[assignment]
