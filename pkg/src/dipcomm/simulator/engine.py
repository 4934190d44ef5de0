"""Self-play games: scripted agents, negotiation rounds, adjudication, logging.

Each movement turn runs as follows:

1. every power plans its orders; communicating powers log these as intents;
2. each pair of communicating powers holds ``rounds`` exchanges. The
   initiator sends a proposal or a commitment, and the other side reads
   it with the message parser and may adopt a proposal, answering with an
   agreement;
3. committed and agreed orders are kept or broken per the agent's honesty;
4. the orders are adjudicated, followed by any retreat and adjustment phase.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from dipcomm.detectors import TurnMessage, analyze_message
from dipcomm.errors import ConfigInvalid
from dipcomm.game.adjudicator import adjudicate
from dipcomm.game.board import province_of
from dipcomm.game.orders import Order, OrderKind, move, support_hold, support_move
from dipcomm.game.powers import POWERS, Power
from dipcomm.game.rules import validate_order
from dipcomm.game.state import MOVEMENT, RETREAT, GameState, initial_state, supply_center_count
from dipcomm.parser.acts import ActKind, CommunicativeAct
from dipcomm.parser.templates import NATURAL_LANGUAGE, RANDOM_CORPUS, render_message
from dipcomm.simulator.agents import (
    GUNBOAT,
    NEGOTIATOR,
    AgentConfig,
    Assignment,
    alternative_order,
    plan_adjustments,
    plan_orders,
    plan_retreats,
)
from dipcomm.simulator.corpus import CorpusRecord, load_corpus, sample_random_message
from dipcomm.simulator.log import GameLog, MessageRecord, TurnLog

DEFAULT_TURNS = 14
DEFAULT_ROUNDS = 3
COMMUNICATORS_PER_GAME = 3


@dataclass(frozen=True)
class GameConfig:
    assignments: Mapping[Power, Assignment]
    turns: int = DEFAULT_TURNS
    rounds: int = DEFAULT_ROUNDS
    game_id: str = "game-0"

    def __post_init__(self):
        missing = [p.value for p in POWERS if p not in self.assignments]
        if missing:
            raise ConfigInvalid(f"no assignment for {', '.join(missing)}")
        if self.turns < 1:
            raise ConfigInvalid("a game needs at least one movement turn")
        if self.rounds < 0:
            raise ConfigInvalid("negotiation rounds cannot be negative")


def _rng(*parts) -> random.Random:
    return random.Random(":".join(str(p) for p in parts))


def render_act(act: CommunicativeAct, level: str, corpus: Sequence[CorpusRecord] | None = None,
               year: int = 1901, rng: random.Random | None = None) -> str | None:
    """Message text for a grounded act at a communication level; None for gunboat."""
    if level == GUNBOAT:
        return None
    if level == RANDOM_CORPUS:
        corpus = load_corpus() if corpus is None else corpus
        return sample_random_message(corpus, act.sender, act.recipient, year, rng or random.Random(0)).text
    if len(act.grounded) != 1:
        raise ValueError("only acts grounded to a single order can be rendered")
    (order,) = act.grounded
    return render_message(act.kind, order, act.sender, act.recipient, level)


class _Game:
    def __init__(self, config: GameConfig, root_seed: int, corpus: Sequence[CorpusRecord] | None):
        self.cfg = config
        self.seed = root_seed
        self.corpus = corpus
        self.log = GameLog(config.game_id, root_seed, dict(config.assignments), config.rounds)
        self.rngs = {p: _rng(root_seed, config.game_id, p.value, a.agent.seed) for p, a in config.assignments.items()}

    def agent(self, p: Power) -> AgentConfig:
        return self.cfg.assignments[p].agent

    def level(self, p: Power) -> str:
        return self.cfg.assignments[p].level

    def run(self) -> GameLog:
        state = initial_state()
        played = 0
        while True:
            if state.phase == MOVEMENT:
                if played == self.cfg.turns:
                    break
                state = self.movement(state)
                played += 1
            elif state.phase == RETREAT:
                state = self.retreats(state)
            elif played == self.cfg.turns:
                break
            else:
                state = self.adjustments(state)
        self.log.final_centers = {p: supply_center_count(state, p) for p in POWERS}
        return self.log

    # -- phases -------------------------------------------------------------------------

    def movement(self, state: GameState) -> GameState:
        key = state.turn.key
        tl = TurnLog(key, sorted(f"{u.owner.value} {u.render()}" for u in state.units),
                     {c: p.value for c, p in sorted(state.sc_ownership.items())})
        plans = {p: plan_orders(state, p, self.agent(p).policy, self.rngs[p]) for p in POWERS}
        for p in POWERS:
            if plans[p]:
                tl.intents[p.value] = sorted(o.render() for o in plans[p].values())
        committed = self.negotiate(state, plans, tl)
        for p, orders in committed.items():
            rng = self.rngs[p]
            for o in orders:
                if rng.random() >= self.agent(p).honesty:
                    plans[p][o.unit.province] = alternative_order(state, o, rng)
        finals = {p: [plans[p][k] for k in sorted(plans[p])] for p in POWERS}
        for p in POWERS:
            if finals[p]:
                tl.finals[p.value] = sorted(o.render() for o in finals[p])
        state, report = adjudicate(state, finals)
        tl.outcomes = {o.render(): r for o, r in sorted(report.outcomes, key=lambda t: t[0].render())}
        if state.phase == RETREAT:
            orders = {p: plan_retreats(state, p, self.rngs[p]) for p in POWERS}
            tl.retreats = {p.value: [o.render() for o in v] for p, v in orders.items() if v}
            state, _ = adjudicate(state, orders)
        tl.sc_counts = {p.value: supply_center_count(state, p) for p in POWERS}
        self.log.turns.append(tl)
        return state

    def retreats(self, state: GameState) -> GameState:
        orders = {p: plan_retreats(state, p, self.rngs[p]) for p in POWERS}
        state, _ = adjudicate(state, orders)
        return state

    def adjustments(self, state: GameState) -> GameState:
        orders = {p: plan_adjustments(state, p, self.rngs[p]) for p in POWERS}
        if self.log.turns:
            self.log.turns[-1].adjustments = {p.value: [o.render() for o in v] for p, v in orders.items() if v}
        state, _ = adjudicate(state, orders)
        return state

    # -- negotiation --------------------------------------------------------------------

    def negotiate(self, state: GameState, plans: dict[Power, dict[str, Order]], tl: TurnLog):
        """Run the exchanges; return the orders each power committed to."""
        active = [p for p in POWERS if self.cfg.assignments[p].communicates and plans[p]]
        locked: dict[Power, set[str]] = {p: set() for p in POWERS}
        committed: dict[Power, list[Order]] = {p: [] for p in POWERS}
        acts: list[CommunicativeAct] = []
        counter = itertools.count()

        def send(s: Power, r: Power, rnd: int, kind: ActKind | None, order: Order | None):
            level = self.level(s)
            widened = None
            if level == RANDOM_CORPUS:
                corpus = self.corpus if self.corpus is not None else _bundled()
                sample = sample_random_message(corpus, s, r, state.year, self.rngs[s])
                text, widened = sample.text, sample.widened
            else:
                text = render_message(kind, order, s, r, level)
                if kind in (ActKind.COMMITMENT, ActKind.AGREEMENT):
                    locked[s].add(order.unit.province)
                    committed[s].append(order)
            mid = f"{self.cfg.game_id}:{state.turn.key}:{next(counter):03d}"
            rec = MessageRecord(mid, s, r, rnd, level, text, kind.value if kind else None,
                                order.render() if order else None, widened)
            tl.messages.append(rec)
            new = analyze_message(TurnMessage(mid, s, r, text), state, acts)
            acts.extend(new)
            return new

        for rnd in range(self.cfg.rounds):
            for a, b in itertools.combinations(active, 2):
                s, r = (a, b) if rnd % 2 == 0 else (b, a)
                kind, order = self.compose(state, s, r, plans, locked)
                if kind is None:
                    continue
                received = send(s, r, rnd, kind, order)
                adopted = self.consider(state, r, received, plans, locked)
                if adopted is not None:
                    send(r, s, rnd, ActKind.AGREEMENT, adopted)
                    continue
                kind, order = self.compose(state, r, s, plans, locked, propose=False)
                if kind is not None:
                    send(r, s, rnd, kind, order)
        return committed

    def compose(self, state, s: Power, r: Power, plans, locked, propose: bool = True):
        rng = self.rngs[s]
        proposals = self._proposals(state, s, r, plans, locked) if propose else []
        commitments = [o for k, o in sorted(plans[s].items()) if k not in locked[s]]
        near = state.game_map.neighbours
        theirs = {u.province for u in state.units_of(r)}
        relevant = [o for o in commitments if near(o.unit.province) & theirs] or commitments
        if proposals and (not relevant or rng.random() < 0.5):
            return ActKind.PROPOSAL, proposals[rng.randrange(len(proposals))]
        if relevant:
            return ActKind.COMMITMENT, relevant[rng.randrange(len(relevant))]
        return None, None

    def _proposals(self, state: GameState, s: Power, r: Power, plans, locked) -> list[Order]:
        """Orders ``s`` would like ``r`` to play: supports for its own moves
        and holds, or moves that vacate a province ``s`` is heading for."""
        gmap = state.game_map
        out: list[Order] = []
        mine = sorted(plans[s].values(), key=Order.render)
        for v in state.units_of(r):
            if v.province in locked[r]:
                continue
            for o in mine:
                if o.kind is OrderKind.MOVE:
                    dest = province_of(o.dest)
                    if dest == v.province:
                        for loc in sorted(gmap.destinations(v.kind, v.location)):
                            if province_of(loc) != o.unit.province and validate_order(state, move(v, loc)) is None:
                                out.append(move(v, loc))
                                break
                    elif gmap.can_reach(v.kind, v.location, dest):
                        out.append(support_move(v, o.unit, dest))
                elif o.kind is OrderKind.HOLD and gmap.can_reach(v.kind, v.location, o.unit.province):
                    out.append(support_hold(v, o.unit))
        return [o for o in out if validate_order(state, o) is None and o != plans[r].get(o.unit.province)]

    def consider(self, state: GameState, r: Power, received: list[CommunicativeAct], plans, locked) -> Order | None:
        """Adopt the first legal proposal addressed to ``r``, per its persuadability."""
        rng = self.rngs[r]
        for act in received:
            if act.kind is not ActKind.PROPOSAL or act.actor != r or act.conditional or not act.grounded:
                continue
            for o in sorted(act.grounded):
                src = o.unit.province
                if src in locked[r] or src not in plans[r] or o.kind is OrderKind.BUILD:
                    continue
                if rng.random() < self.agent(r).persuadability:
                    plans[r][src] = o
                    return o
                return None
        return None


_CORPUS: list[CorpusRecord] | None = None


def _bundled() -> list[CorpusRecord]:
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = load_corpus()
    return _CORPUS


def run_game(config: GameConfig, root_seed: int, corpus: Sequence[CorpusRecord] | None = None) -> GameLog:
    """Play one game. The log is a pure function of ``config`` and ``root_seed``."""
    return _Game(config, root_seed, corpus).run()


# -- batches ------------------------------------------------------------------------------


@dataclass(frozen=True)
class BatchConfig:
    levels: tuple[str, ...] = (NATURAL_LANGUAGE,)
    games_per_level: int = 1
    communicator: AgentConfig = field(default_factory=AgentConfig)
    gunboat: AgentConfig = field(default_factory=lambda: AgentConfig(policy="greedy"))
    turns: int = DEFAULT_TURNS
    rounds: int = DEFAULT_ROUNDS

    def __post_init__(self):
        if self.games_per_level < 1:
            raise ConfigInvalid("games_per_level must be at least 1")
        if not self.levels:
            raise ConfigInvalid("no communication levels given")
        for lv in self.levels:
            if lv == GUNBOAT:
                continue
            Assignment(self.communicator, lv)
        if self.communicator.policy != NEGOTIATOR:
            raise ConfigInvalid("communicating agents must use the negotiator policy")


def balanced_assignments(n_games: int, rng: random.Random) -> list[tuple[Power, ...]]:
    """Communicating powers per game: consecutive blocks of three over a
    seeded cycle of the seven powers, so counts differ by at most one."""
    cycle = list(POWERS)
    rng.shuffle(cycle)
    out = []
    for g in range(n_games):
        start = COMMUNICATORS_PER_GAME * g
        out.append(tuple(sorted((cycle[(start + k) % 7] for k in range(COMMUNICATORS_PER_GAME)),
                                key=POWERS.index)))
    return out


def run_batch(batch: BatchConfig, root_seed: int, corpus: Sequence[CorpusRecord] | None = None) -> list[GameLog]:
    logs = []
    for li, level in enumerate(batch.levels):
        chosen = balanced_assignments(batch.games_per_level, _rng(root_seed, "assign", level))
        for g, comm in enumerate(chosen):
            assignments = {}
            for p in POWERS:
                if p in comm:
                    assignments[p] = Assignment(batch.communicator, level)
                else:
                    assignments[p] = Assignment(batch.gunboat, GUNBOAT)
            cfg = GameConfig(assignments, batch.turns, batch.rounds, f"{level}-{g:03d}")
            logs.append(run_game(cfg, _derive_seed(root_seed, li, g), corpus))
    return logs


def _derive_seed(root_seed: int, level_index: int, game: int) -> int:
    return _rng(root_seed, level_index, game).getrandbits(32)
