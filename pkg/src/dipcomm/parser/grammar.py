"""Rule-based extraction of communicative acts from message text.

Each sentence is split into clauses. A clause yields an act when it has a
recognizable subject and modal (or is an imperative) and a verb phrase that
names a Diplomacy action. Hedged and negated clauses yield nothing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from dipcomm.errors import GraphSyntaxError
from dipcomm.game.board import GameMap
from dipcomm.game.powers import Power
from dipcomm.intent.graph import IntentGraph, Literal, parse_graph_text
from dipcomm.parser.acts import ActKind, CommunicativeAct, MessageContext
from dipcomm.parser.graphs import GraphBuilder, read_power, read_unit
from dipcomm.parser.lexicon import Mention, tokenize
from dipcomm.parser.preprocess import preprocess

C = r"«c:(\w{3})»"
P = r"«p(\d+)»"

# -- clause-level vocabulary ---------------------------------------------------

_FILLER = re.compile(
    r"^(?:(?:also|so|and|but|then|ok|okay|well|alright|just|now|hey|hi|great|nice|actually|honestly|anyway|"
    r"cool|good|first|btw|oh|ah)\b[,!]?\s*)+"
)
_TIME = re.compile(
    r"\b(?:(?:next|this|the next|coming) (?:turn|season|year|phase|move)|in (?:the )?(?:spring|fall|autumn)"
    r"|right now|for now|as well|too|again)\b"
)
_HEDGE = re.compile(r"\b(?:might|maybe|perhaps|possibly|may|could|would|think|thinking|guess|hope|unsure|"
                    r"probably not|not sure|lemme|let me think)\b")
_NEGATION = re.compile(r"\b(?:not|never|no|don't|doesn't|won't|can't|cannot|isn't|aren't|shouldn't|wouldn't|"
                       r"didn't|nor|neither)\b|n't\b")
_SHORT_YES = re.compile(
    r"^(?:yes|yeah|yea|yep|yup|sure|ok|okay|agreed|deal|absolutely|of course|sounds good|sounds great|perfect|"
    r"will do|definitely|certainly|for sure|alright|fine|done|it's a deal|you got it)"
    r"(?:\s*(?:thing|then|!|,|\.)*)?(?:\s*" + C + r" agrees?(?: to that| with that| with «c:\w{3}»)?)?$"
)
_YES_LEAD = re.compile(r"^(?:yes|yeah|yea|yep|yup|sure|ok|okay|agreed|absolutely|of course|definitely|alright)\b[,!.]?\s*")
_AGREE = re.compile(r"^" + C + r" agrees?(?: to that| with that| with «c:\w{3}»)?$")
_ANAPHOR = re.compile(r"^(?:do|doing) (?:that|it|so|this)\b")
_RESTING = re.compile(r"^(?:that|this|it) (?:works|sounds good|sounds great|is fine|is a deal|is a plan)$")

_COMMIT_MODALS = (r"will|shall|can|is going to|are going to|is gonna|are gonna|plans? to|is planning to|"
                  r"intends? to|is about to|is trying to|tries to|wants? to|needs? to|should|must|has to|have to|"
                  r"is|are|'ll")
_PROPOSE_MODALS = r"should|can|must|needs? to|has to|have to|will|'ll|ought to"
_SUBJECT = rf"(?:{C}|we|let's|let us|lets)"
_STATEMENT = re.compile(rf"^(?P<subj>{_SUBJECT})\s+(?:(?P<modal>{_COMMIT_MODALS})\s+)?(?P<vp>.+)$")
_QUESTION = re.compile(rf"^(?:please\s+)?(?P<modal>would|will|can|could)\s+(?P<subj>{C}|we)\s+(?P<vp>.+)$")
_SUGGEST = re.compile(rf"^(?:why don't|why not have|how about|what about|what if)\s+(?P<subj>{C}|we)?\s*(?P<vp>.+)$")
_CONDITION = re.compile(r"\b(?:if|as long as|provided that|provided|assuming|so long as)\b")

# -- verb-phrase vocabulary ---------------------------------------------------

_ADVERBS = re.compile(r"^(?:(?:try to|trying to|attempt to|going to|gonna|also|just|then|definitely|certainly|"
                      r"probably|first|actually|really|still|be able to|happily|gladly|go ahead and|"
                      r"plan to|planning to|want to)\s+)+")
_V_MOVE = r"(?:move|moves|moving|moved|go|goes|going|head|heads|heading|bounce|bounces|bouncing|bump|bumps|" \
          r"bumping|enter|enters|entering|push|pushes|pushing|advance|advancing|march|marching|sail|sailing)"
_V_TAKE = r"(?:take|takes|taking|steal|steals|stealing|grab|grabs|grabbing|attack|attacks|attacking|hit|hitting|" \
          r"get|gets|getting|capture|capturing)"
_V_HOLD = r"(?:hold|holds|holding|stay|stays|staying|remain|remains|remaining|sit|sitting|keep)"
_V_SUPPORT = r"(?:support|supports|supporting|back|backing)"
_V_CONVOY = r"(?:convoy|convoys|convoying|ferry|ferrying)"
_V_BUILD = r"(?:build|builds|building)"
_V_RETREAT = r"(?:retreat|retreats|retreating)"
_V_DISBAND = r"(?:disband|disbands|disbanding)"
_VERB_START = re.compile(rf"^(?:please\s+)?(?:{_V_MOVE}|{_V_TAKE}|{_V_HOLD}|{_V_SUPPORT}|{_V_CONVOY}|{_V_BUILD}|"
                         rf"{_V_RETREAT}|{_V_DISBAND}|dmz|demilitarize|team up|work together|ally)\b")
_TO = r"(?:to|into|in to|towards|toward|->|-|→|=>)"
_KIND = {"army": "A", "armies": "A", "fleet": "F", "fleets": "F", "unit": None, "units": None}


@dataclass(frozen=True)
class UnitPhrase:
    kind: str | None = None
    place: int | None = None  # mention index
    nationality: Power | None = None

    def empty(self) -> bool:
        return self.kind is None and self.place is None and self.nationality is None


@dataclass(frozen=True)
class Action:
    verb: str  # move, hold, support, convoy, build, retreat, disband, dmz, ally, attack, anaphor
    unit: UnitPhrase = UnitPhrase()
    dest: int | None = None
    target: UnitPhrase | None = None
    target_dest: int | None = None
    country: Power | None = None
    gain: int | None = None  # province the move is meant to win
    in_place: bool = False  # "be in P" reading of a move


@dataclass
class _Clause:
    kind: ActKind
    actor: Power | None
    actions: list[Action]
    nationality: Power | None  # default owner of the acting unit
    text: str
    conditional: bool = False
    condition: list[Action] = field(default_factory=list)
    condition_actor: Power | None = None


def _eat(pattern: str, s: str):
    m = re.match(pattern + r"(?:\s+|$)", s)
    if not m:
        return None, s
    return m, s[m.end():]


def _power(code: str) -> Power:
    return Power(code.upper())


def parse_unit(s: str) -> tuple[UnitPhrase | None, str]:
    """Unit phrase at the start of ``s``: "«c:eng»'s fleet in «p0»", "«p0»", "army", "«c:ger»"."""
    owner = None
    kind_word = None
    m, rest = _eat(rf"(?:the |one of |a |an |one )?{C}(?:'s|s')?", s)
    if m:
        owner = _power(m.group(1))
        s2 = rest
    else:
        s2 = s
    m2, rest2 = _eat(r"(?:the |a |an |one |that |this )?(?:own )?(army|armies|fleet|fleets|unit|units)\b", s2)
    if m2:
        kind_word = m2.group(1)
        place = None
        m3, rest3 = _eat(rf"(?:in|at|on|from|stationed in|currently in)\s+{P}", rest2)
        if m3:
            place, rest2 = int(m3.group(1)), rest3
        else:
            m4, rest4 = _eat(P, rest2)  # "fleet «p0»" shorthand
            if m4:
                place, rest2 = int(m4.group(1)), rest4
        return UnitPhrase(_KIND[kind_word], place, owner), rest2
    if owner is not None:
        m5, rest5 = _eat(P, s2)  # "«c:eng»'s «p0»"
        if m5:
            return UnitPhrase(None, int(m5.group(1)), owner), rest5
        return UnitPhrase(None, None, owner), s2
    m6, rest6 = _eat(rf"(?:the unit in |the one in )?{P}", s)
    if m6:
        return UnitPhrase(None, int(m6.group(1)), None), rest6
    return None, s


def _dest(s: str) -> tuple[int | None, str]:
    m, rest = _eat(rf"{_TO}\s*{P}", s)
    if m:
        return int(m.group(1)), rest
    return None, s


def _strip_tail(s: str) -> str:
    s = re.sub(r"\s*(?:by|via|with a|using a) convoy\b", "", s)
    return s.strip(" ,.!")


def parse_vp(vp: str, mentions: Sequence[Mention]) -> list[Action]:
    """Actions named by a verb phrase; coordinated phrases give several."""
    vp = _strip_tail(_ADVERBS.sub("", vp.strip()))
    parts = re.split(rf"\s*,?\s+(?:and|and then|then|plus)\s+(?=(?:{_VERB_START.pattern[1:]}))", vp)
    out: list[Action] = []
    for part in parts:
        a = _parse_single_vp(_ADVERBS.sub("", part.strip()))
        if a is not None:
            out.append(a)
    return out


def _parse_single_vp(vp: str) -> Action | None:
    s = re.sub(r"^please\s+", "", vp)
    if _ANAPHOR.match(s):
        return Action("anaphor")

    # "be in P" in conditions
    m = re.match(rf"^(?:be |is |are |get |gets |end up )?in {P}", s)
    if m:
        return Action("move", dest=int(m.group(1)), in_place=True)

    # bump/bounce P from P
    m = re.match(rf"^(?:bump|bumps|bumping|bounce|bounces|bouncing|kick|kicking) (?:the \w+ (?:in|out of) )?{P} "
                 rf"(?:from|out of|with) {P}", s)
    if m:
        return Action("move", unit=UnitPhrase(place=int(m.group(2))), dest=int(m.group(1)))

    m, rest = _eat(_V_MOVE, s)
    if m:
        rest = re.sub(r"^(?:out )?(?:from|out of) (?=«p)", "", rest)
        unit, after = parse_unit(rest)
        dest, after2 = _dest(after)
        if unit is not None and dest is not None:
            return Action("move", unit=unit, dest=dest)
        dest, _ = _dest(rest)
        if dest is not None:
            return Action("move", dest=dest)
        m2 = re.match(rf"^against {C}", rest)
        if m2:
            return Action("attack", country=_power(m2.group(1)))
        if unit is not None and unit.place is not None and unit.kind is None and unit.nationality is None:
            # "moving Sweden" without a destination is too vague
            return None
        if unit is not None and not unit.empty():
            return Action("move", unit=unit)
        return None

    m, rest = _eat(_V_TAKE, s)
    if m:
        m2 = re.match(rf"^{P}(?: from {C})?", rest)
        if m2:
            return Action("move", dest=int(m2.group(1)), gain=int(m2.group(1)))
        m3 = re.match(rf"^{C}\b", rest)
        if m3 and m.group(0).strip().startswith(("attack", "hit")):
            return Action("attack", country=_power(m3.group(1)))
        return None

    m, rest = _eat(_V_RETREAT, s)
    if m:
        rest = re.sub(r"^(?:from|out of) (?=«p)", "", rest)
        unit, after = parse_unit(rest)
        dest, _ = _dest(after if unit else rest)
        if dest is not None:
            return Action("retreat", unit=unit or UnitPhrase(), dest=dest)
        return None

    m, rest = _eat(_V_DISBAND, s)
    if m:
        unit, _ = parse_unit(rest)
        if unit is not None:
            return Action("disband", unit=unit)
        return None

    m, rest = _eat(_V_HOLD, s)
    if m:
        if m.group(0).strip() == "keep":
            m2 = re.match(rf"^{P} (?:clear|empty|open|free|demilitarized|unoccupied|neutral)", rest)
            if m2:
                return Action("dmz", dest=int(m2.group(1)))
            m2 = re.match(rf"^(?:the )?(?:army|fleet|unit) (?:in|at) {P} (?:there|in place|where it is)", rest)
            if not m2:
                return None
        rest = re.sub(r"^(?:position |still |put |in place |firm )", "", rest)
        rest = re.sub(r"^(?:in|at|on) (?=«p)", "", rest)
        unit, _ = parse_unit(rest)
        if unit is not None and not unit.empty():
            return Action("hold", unit=unit)
        return None

    m, rest = _eat(_V_SUPPORT, s)
    if m:
        return _parse_support(rest)

    m, rest = _eat(_V_CONVOY, s)
    if m:
        target, after = parse_unit(rest)
        dest, after = _dest(after)
        if target is None or dest is None:
            return None
        m2 = re.match(r"^(?:with|using|via|through) ", after)
        carrier = UnitPhrase()
        if m2:
            carrier, _ = parse_unit(after[m2.end():])
            carrier = carrier or UnitPhrase()
        target = target if target.kind is not None else replace(target, kind="A")
        return Action("convoy", unit=carrier, target=target, target_dest=dest)

    m, rest = _eat(_V_BUILD, s)
    if m:
        m2 = re.match(rf"^(?:a |an |one |new )?(army|fleet|unit)?\s*(?:in|at) {P}", rest)
        if m2:
            return Action("build", unit=UnitPhrase(_KIND[m2.group(1)] if m2.group(1) else None), dest=int(m2.group(2)))
        return None

    m = re.match(rf"^(?:dmz|dmzing|demilitarize|demilitarizing|demilitarise)\b(?: (?:in |of )?(?:{P}))?", s)
    if m:
        return Action("dmz", dest=int(m.group(1)) if m.group(1) else None)
    m = re.match(rf"^(?:team up|teaming up|work together|working together|be allies|ally|allying|form an alliance|"
                 rf"be interested in working together|work with|working with|ally with|partner with)"
                 rf"(?: (?:with )?{C})?", s)
    if m:
        return Action("ally", country=_power(m.group(1)) if m.group(1) else None)
    return None


def _parse_support(rest: str) -> Action | None:
    supporter = UnitPhrase()
    m = re.match(r"^(?:(?:the )?move (?:of |by )?)", rest)
    if m:
        rest = rest[m.end():]
    target, after = parse_unit(rest)
    if target is None:
        return None
    after = re.sub(r"^(?:'s )?(?:move|attack|push)\s*", "", after)
    dest, after2 = _dest(after)
    hold_target = False
    if dest is None:
        m2 = re.match(r"^(?:to hold|holding|in place|hold|where it is)\b\s*", after)
        if m2:
            hold_target, after2 = True, after[m2.end():]
        else:
            after2 = after
    m3 = re.match(r"^(?:with|from|using|by) ", after2)
    if m3:
        sup, _ = parse_unit(after2[m3.end():])
        supporter = sup or UnitPhrase()
    if dest is not None:
        return Action("support", unit=supporter, target=target, target_dest=dest)
    if hold_target or target.place is not None:
        return Action("support", unit=supporter, target=target)
    return None


# -- clause handling ----------------------------------------------------------


def _split_sentences(tok: str) -> list[str]:
    parts = re.split(r"(?<=[.!?;])\s+|\n+|(?<=[!?])(?=\S)", tok)
    return [p.strip() for p in parts if p and p.strip()]


def _split_clauses(sentence: str) -> list[str]:
    """Split on commas and conjunctions that introduce a new subject."""
    pieces = re.split(rf"\s*(?:,|\band\b|\bbut\b|\bso\b|\bwhile\b|\bthen\b|:|\u2014|\u2013)\s*(?=(?:{C}|we\b|let's\b|lets\b)\s)",
                      sentence)
    return [p.strip(" ,") for p in pieces if p and p.strip(" ,")]


def _resolve_there(tok: str) -> str:
    """Replace "there" with the last province mentioned before it."""
    out, last = [], None
    for piece in re.split(r"(«p\d+»|\bthere\b)", tok):
        if piece.startswith("«p"):
            last = piece
            out.append(piece)
        elif piece == "there" and last is not None:
            before = "".join(out).rstrip()
            if re.search(r"\b(?:in|at|to|into|from|towards)$", before):
                out.append(last)
            elif re.search(r"\b(?:be|is|are|am|stay|stays|staying|remain|hold|holds|holding)$", before):
                out.append("in " + last)
            else:
                out.append("to " + last)
        else:
            out.append(piece)
    return "".join(out)


def _classify(ctx: MessageContext, subj: str | None, modal: str | None, vp: str,
              question: bool, in_condition: bool) -> tuple[ActKind, Power | None, Power | None] | None:
    """(kind, actor, default unit nationality) for a subject/modal pair."""
    if subj is None:
        return None
    if subj in ("we", "let's", "let us", "lets"):
        return ActKind.PROPOSAL, ctx.recipient, None
    power = _power(subj)
    if question:
        if power == ctx.recipient:
            return ActKind.PROPOSAL, ctx.recipient, ctx.recipient
        return None
    if power == ctx.sender:
        if modal is None and not in_condition:
            return None
        if modal in ("is", "are") and not re.match(r"^\w+ing\b|^in «p", vp) and not in_condition:
            return None
        return ActKind.COMMITMENT, ctx.sender, ctx.sender
    if power == ctx.recipient:
        if in_condition:
            return ActKind.PROPOSAL, ctx.recipient, ctx.recipient
        if modal is None or not re.fullmatch(_PROPOSE_MODALS, modal):
            return None
        return ActKind.PROPOSAL, ctx.recipient, ctx.recipient
    if modal is None and not in_condition:
        return None
    return ActKind.THIRD_PARTY_REPORT, power, power


def _parse_clause(ctx: MessageContext, clause: str, mentions, question: bool,
                  in_condition: bool = False) -> _Clause | None:
    c = _TIME.sub("", clause.strip(" ,.!?"))
    c = re.sub(r"\s+", " ", c).strip(" ,")
    if _SHORT_YES.match(_FILLER.sub("", c)) or _AGREE.match(c) or _RESTING.match(c):
        return _Clause(ActKind.AGREEMENT, ctx.sender, [Action("anaphor")], None, clause)
    c = _YES_LEAD.sub("", _FILLER.sub("", c)).strip(" ,")
    if not c:
        return None

    m = _QUESTION.match(c) if question else None
    if m:
        subj, modal, vp, q = m.group("subj"), m.group("modal"), m.group("vp"), True
    else:
        m = _SUGGEST.match(c)
        if m:
            subj, modal, vp, q = m.group("subj") or f"«c:{ctx.recipient.value.lower()}»", None, m.group("vp"), True
        else:
            if question:
                return None
            q = False
            m = _STATEMENT.match(c)
            if m:
                subj, modal, vp = m.group("subj"), m.group("modal"), m.group("vp")
            elif _VERB_START.match(c):
                subj, modal, vp = None, None, c
            else:
                return None

    if _NEGATION.search(c) and not c.startswith("why don't"):
        return None
    if _HEDGE.search(c) and not q:
        return None
    if q and _HEDGE.search(vp):
        return None

    if subj is not None and subj.startswith("«c:"):
        subj = re.match(C, subj).group(1)
    actions = parse_vp(vp, mentions)
    if not actions:
        return None
    if subj is None:
        # imperatives address the recipient; bare gerunds report the sender's own plan
        if re.match(r"^(?:please\s+)?\w+ing\b", vp):
            return _Clause(ActKind.COMMITMENT, ctx.sender, actions, None, clause)
        return _Clause(ActKind.PROPOSAL, ctx.recipient, actions, ctx.recipient, clause)
    if any(a.verb == "anaphor" for a in actions):
        if subj in ("we",) or subj == ctx.sender.value.lower():
            return _Clause(ActKind.AGREEMENT, ctx.sender, [Action("anaphor")], None, clause)
        return None
    kind = _classify(ctx, subj, modal, vp, q, in_condition)
    if kind is None:
        return None
    k, actor, nat = kind
    if subj in ("we", "let's", "let us", "lets") and any(a.verb in ("move", "hold", "support", "convoy") for a in actions):
        nat = None
    return _Clause(k, actor, actions, nat, clause)


def _parse_sentence(ctx: MessageContext, sentence: str, mentions) -> list[_Clause]:
    question = sentence.rstrip().endswith("?")
    body = sentence.rstrip(" ?.!")
    body = _FILLER.sub("", body)
    m = _CONDITION.search(body)
    if m is None:
        out = []
        for cl in _split_clauses(body):
            parsed = _parse_clause(ctx, cl, mentions, question)
            if parsed is not None:
                out.append(parsed)
        return out
    before, after = body[:m.start()].strip(" ,"), body[m.end():].strip(" ,")
    if not before:
        # "if X, (then) Y"
        sp = re.split(r",\s*(?:then\s+)?|\s+then\s+", after, maxsplit=1)
        cond_text, main_text = (sp[0], sp[1]) if len(sp) == 2 else (after, "")
    else:
        cond_text, main_text = after, before
    cond = _parse_clause(ctx, cond_text, mentions, False, in_condition=True)
    mains = [x for x in (_parse_clause(ctx, cl, mentions, question) for cl in _split_clauses(main_text)) if x]
    if not mains:
        if cond is not None and cond.kind is ActKind.PROPOSAL and main_text:
            cond.conditional = True
            return [cond]
        return []
    out = []
    for main in mains:
        if (cond is not None and main.kind is ActKind.PROPOSAL and cond.actor == main.actor
                and len(main.actions) == 1 and main.actions[0].gain is not None
                and len(cond.actions) == 1 and cond.actions[0].in_place):
            # "you can take X if you are in Y": the proposal is the move to Y, aimed at X
            move = replace(cond.actions[0], gain=main.actions[0].gain, in_place=False)
            main.actions = [move]
            out.append(main)
            continue
        main.conditional = True
        if cond is not None:
            main.condition = cond.actions
            main.condition_actor = cond.actor
        out.append(main)
    return out


# -- graphs ---------------------------------------------------------------------


def _unit_node(b: GraphBuilder, u: UnitPhrase, default_owner: Power | None, mentions, gmap: GameMap) -> str:
    owner = u.nationality or default_owner
    if u.place is not None:
        mt = mentions[u.place]
        return b.unit(u.kind, mt.graph_name(gmap), mt.coast, owner)
    return b.unit(u.kind, None, None, owner)


def _place_node(b: GraphBuilder, idx: int, mentions, gmap: GameMap) -> str:
    mt = mentions[idx]
    return b.province(mt.graph_name(gmap), mt.coast)


def _action_node(b: GraphBuilder, a: Action, owner: Power | None, actor: Power | None, ctx: MessageContext,
                 mentions, gmap: GameMap) -> str | None:
    if a.verb in ("move", "retreat"):
        v = b.node("move-01" if a.verb == "move" else "retreat-01")
        b.edge(v, "ARG1", _unit_node(b, a.unit, owner, mentions, gmap))
        if a.dest is not None:
            b.edge(v, "ARG2", _place_node(b, a.dest, mentions, gmap))
        if a.gain is not None and a.gain != a.dest:
            g = b.node("gain-02")
            if actor is not None:
                b.edge(g, "ARG0", b.country(actor))
            b.edge(g, "ARG1", _place_node(b, a.gain, mentions, gmap))
            b.edge(v, "purpose", g)
        return v
    if a.verb in ("hold", "disband"):
        v = b.node("hold-01" if a.verb == "hold" else "disband-01")
        b.edge(v, "ARG1", _unit_node(b, a.unit, owner, mentions, gmap))
        return v
    if a.verb == "support":
        v = b.node("support-01")
        b.edge(v, "ARG0", _unit_node(b, a.unit, owner, mentions, gmap))
        if a.target_dest is not None:
            m = b.node("move-01")
            b.edge(v, "ARG1", m)
            b.edge(m, "ARG1", _unit_node(b, a.target, None, mentions, gmap))
            b.edge(m, "ARG2", _place_node(b, a.target_dest, mentions, gmap))
        else:
            b.edge(v, "ARG1", _unit_node(b, a.target, None, mentions, gmap))
        return v
    if a.verb == "convoy":
        v = b.node("transport-01")
        b.edge(v, "ARG0", _unit_node(b, replace(a.unit, kind=a.unit.kind or "F"), owner, mentions, gmap))
        b.edge(v, "ARG1", _unit_node(b, a.target, None, mentions, gmap))
        b.edge(v, "ARG2", _place_node(b, a.target_dest, mentions, gmap))
        return v
    if a.verb == "build":
        v = b.node("build-01")
        if owner is not None:
            b.edge(v, "ARG0", b.country(owner))
        b.edge(v, "ARG1", b.node({"A": "army", "F": "fleet", None: "unit"}[a.unit.kind]))
        b.edge(v, "location", _place_node(b, a.dest, mentions, gmap))
        return v
    if a.verb == "dmz":
        v = b.node("demilitarize-01")
        if a.dest is not None:
            b.edge(v, "ARG1", _place_node(b, a.dest, mentions, gmap))
        return v
    if a.verb == "ally":
        v = b.node("ally-01")
        b.edge(v, "ARG0", b.country(ctx.sender))
        b.edge(v, "ARG1", b.country(a.country or ctx.recipient))
        return v
    if a.verb == "attack":
        v = b.node("attack-01")
        if actor is not None:
            b.edge(v, "ARG0", b.country(actor))
        b.edge(v, "ARG1", b.country(a.country))
        return v
    return None


def _clause_graph(cl: _Clause, a: Action, ctx: MessageContext, mentions, gmap: GameMap) -> IntentGraph | None:
    b = GraphBuilder()
    root = _action_node(b, a, cl.nationality, cl.actor, ctx, mentions, gmap)
    if root is None:
        return None
    if cl.condition:
        cond_owner = cl.condition_actor
        c = _action_node(b, cl.condition[0], cond_owner, cond_owner, ctx, mentions, gmap)
        if c is not None:
            b.edge(root, "condition", c)
    return b.build(root)


# -- entry points -----------------------------------------------------------------


def _latest_proposal(ctx: MessageContext, prior: Sequence[CommunicativeAct]) -> CommunicativeAct | None:
    for act in reversed(prior):
        if act.kind is ActKind.PROPOSAL and act.sender == ctx.recipient and act.recipient == ctx.sender:
            return act
    return None


def _agreement(ctx: MessageContext, proposal: CommunicativeAct, conditional: bool, span: str) -> CommunicativeAct:
    b = GraphBuilder()
    root = b.node("agree-01")
    b.edge(root, "ARG0", b.country(ctx.sender))
    inner = b.graft(proposal.action_graph)
    if inner is not None:
        b.edge(root, "ARG1", inner)
    return CommunicativeAct(ActKind.AGREEMENT, b.build(root), ctx.sender, conditional=conditional or proposal.conditional,
                            message_id=ctx.message_id, sender=ctx.sender, recipient=ctx.recipient, span=span,
                            accepts=proposal.message_id or None)


def _looks_like_graph(text: str) -> bool:
    return bool(re.match(r"^\s*\(\s*(?:\)|[a-z][\w-]*\s*/)", text))


def _acts_from_graph(text: str, ctx: MessageContext, prior: Sequence[CommunicativeAct]) -> list[CommunicativeAct]:
    g = parse_graph_text(text)
    if g.is_empty:
        return []
    gmap = ctx.state.game_map
    concept = g.nodes[g.root]
    if concept == "agree-01":
        inner_root = g.target(g.root, "ARG1")
        if inner_root is None:
            proposal = _latest_proposal(ctx, prior)
            return [_agreement(ctx, proposal, False, text)] if proposal else []
        return [CommunicativeAct(ActKind.AGREEMENT, g, ctx.sender, message_id=ctx.message_id, sender=ctx.sender,
                                 recipient=ctx.recipient, span=text)]
    from dipcomm.intent.checker import unit_node

    u = unit_node(g, g.root)
    owner = read_unit(g, u, gmap).nationality if u else None
    if owner is None:
        owner = read_power(g, g.target(g.root, "ARG0") if not isinstance(g.target(g.root, "ARG0"), Literal) else None)
    conditional = g.target(g.root, "condition") is not None
    if owner == ctx.sender:
        kind, actor = ActKind.COMMITMENT, ctx.sender
    elif owner == ctx.recipient or owner is None:
        kind, actor = ActKind.PROPOSAL, ctx.recipient
    else:
        kind, actor = ActKind.THIRD_PARTY_REPORT, owner
    return [CommunicativeAct(kind, g, actor, conditional=conditional, message_id=ctx.message_id, sender=ctx.sender,
                             recipient=ctx.recipient, span=text)]


def extract_acts(text: str, ctx: MessageContext, prior: Sequence[CommunicativeAct] = ()) -> list[CommunicativeAct]:
    """Communicative acts in one message, in textual order.

    ``prior`` holds acts from earlier messages of the same negotiation turn;
    short answers such as "Sure" bind to the latest proposal the recipient
    made to the sender there. A message with no move-relevant content gives
    an empty list. Text that is itself a PENMAN graph is read directly.
    """
    if _looks_like_graph(text):
        try:
            return _acts_from_graph(text, ctx, prior)
        except GraphSyntaxError:
            return []
    gmap = ctx.state.game_map
    norm = preprocess(text, ctx.sender, ctx.recipient, gmap)
    tok, mentions = tokenize(norm.text, gmap)
    tok = _resolve_there(tok)
    acts: list[CommunicativeAct] = []
    bound: list[CommunicativeAct] = []  # proposals already agreed to in this message
    for sentence in _split_sentences(tok):
        for cl in _parse_sentence(ctx, sentence, mentions):
            if cl.kind is ActKind.AGREEMENT:
                proposal = _latest_proposal(ctx, list(prior) + acts)
                if proposal is not None and not any(p is proposal for p in bound):
                    bound.append(proposal)
                    acts.append(_agreement(ctx, proposal, cl.conditional, cl.text))
                continue
            for a in cl.actions:
                if a.verb == "anaphor":
                    continue
                g = _clause_graph(cl, a, ctx, mentions, gmap)
                if g is None:
                    continue
                acts.append(CommunicativeAct(cl.kind, g, cl.actor, conditional=cl.conditional,
                                             message_id=ctx.message_id, sender=ctx.sender, recipient=ctx.recipient,
                                             span=cl.text))
    return acts
