"""Command-line entry point: ``dipcomm <command> ...``.

Every command exits 0 on success. On failure it prints one JSON line
``{"error": ..., "message": ...}`` to stderr and exits 2.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from dipcomm import SCHEMA_VERSION
from dipcomm.errors import ConfigInvalid, DipcommError, SchemaError

OUT_ENV = "DIPCOMM_OUT"


# -- configuration ---------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    levels: tuple[str, ...] = ("natural_language", "amr_only", "random_corpus")
    games: int = 1
    turns: int = 14
    rounds: int = 3
    corpus: str | None = None  # random-message corpus; the bundled one when None
    out: str | None = None
    communicator: dict = field(default_factory=dict)
    gunboat: dict = field(default_factory=lambda: {"policy": "greedy"})

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigInvalid(f"{path}: not JSON ({e.msg})") from None
        if not isinstance(d, dict):
            raise ConfigInvalid(f"{path}: expected an object")
        if "seed" not in d:
            raise ConfigInvalid(f"{path}: seed must be given explicitly")
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigInvalid(f"{path}: unknown keys {sorted(unknown)}")
        if "levels" in d:
            d["levels"] = tuple(d["levels"])
        cfg = cls(**d)
        if cfg.corpus is not None and not Path(cfg.corpus).exists():
            raise ConfigInvalid(f"corpus file {cfg.corpus} does not exist")
        return cfg


def _out_dir(arg: str | None, command: str) -> Path:
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUT_ENV, "dipcomm-out")) / command


# -- helpers ----------------------------------------------------------------------------


def load_batch(path: str | Path):
    """Game logs from a directory of ``*.jsonl`` files or from one file."""
    from dipcomm.simulator.log import GameLog

    p = Path(path)
    files = sorted(p.glob("*.jsonl")) if p.is_dir() else [p]
    logs = []
    for f in files:
        text = f.read_text(encoding="utf-8")
        first = text.split("\n", 1)[0]
        if '"record": "header"' not in first:
            continue
        logs.append(GameLog.from_jsonl(text))
    return logs


def _state_from_args(args):
    from dipcomm.game.state import initial_state, make_state

    if args.units:
        return make_state(args.units, args.turn)
    st = initial_state()
    if args.turn != "S1901M":
        raise ConfigInvalid("--turn other than S1901M needs --units")
    return st


def _acts_for_text(args, ground: bool) -> list[dict]:
    from dipcomm.detectors import TurnMessage, analyze_message
    from dipcomm.game.powers import Power
    from dipcomm.intent.graph import serialize_graph
    from dipcomm.parser import MessageContext, extract_acts

    state = _state_from_args(args)
    s, r = Power.parse(args.sender), Power.parse(args.recipient)
    if ground:
        acts = analyze_message(TurnMessage("cli", s, r, args.text), state)
    else:
        acts = extract_acts(args.text, MessageContext(s, r, state, message_id="cli"))
    out = []
    for a in acts:
        d = {"kind": a.kind.value, "actor": a.actor.value, "conditional": a.conditional,
             "graph": serialize_graph(a.action_graph)}
        if ground:
            d["orders"] = sorted(o.render() for o in a.grounded)
        out.append(d)
    return out


def _acts_for_corpus(path: str, ground: bool) -> list[dict]:
    from dipcomm.detectors import TurnMessage, analyze_turn
    from dipcomm.ingest import ingest_corpus
    from dipcomm.intent.graph import serialize_graph

    corpus = ingest_corpus(path)
    out = []
    for game, turn, msgs in corpus.turns():
        state = corpus.states.get((game, turn))
        if state is None:
            continue
        for a in analyze_turn([TurnMessage(m.message_id, m.sender, m.recipient, m.text) for m in msgs], state):
            d = {"message_id": a.message_id, "kind": a.kind.value, "actor": a.actor.value,
                 "conditional": a.conditional, "graph": serialize_graph(a.action_graph)}
            if ground:
                d["orders"] = sorted(o.render() for o in a.grounded)
            out.append(d)
    return out


def _write_jsonl(records: Sequence[dict], dest: str | None) -> None:
    lines = [json.dumps({"record": "header", "schema_version": SCHEMA_VERSION})]
    lines += [json.dumps(r, sort_keys=True) for r in records]
    text = "\n".join(lines) + "\n"
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
        Path(dest).write_text(text, encoding="utf-8")


# -- commands ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    from dipcomm.simulator import AgentConfig, BatchConfig, load_corpus, run_batch

    if args.config:
        cfg = PipelineConfig.load(args.config)
    else:
        cfg = PipelineConfig(seed=args.seed if args.seed is not None else 0)
    levels = tuple(args.levels.split(",")) if args.levels else cfg.levels
    communicator = dict(cfg.communicator)
    if args.honesty is not None:
        communicator["honesty"] = args.honesty
    if args.persuadability is not None:
        communicator["persuadability"] = args.persuadability
    batch = BatchConfig(
        levels=levels,
        games_per_level=args.games if args.games is not None else cfg.games,
        communicator=AgentConfig.from_dict(communicator),
        gunboat=AgentConfig.from_dict(cfg.gunboat),
        turns=args.turns if args.turns is not None else cfg.turns,
        rounds=args.rounds if args.rounds is not None else cfg.rounds,
    )
    seed = args.seed if args.seed is not None else cfg.seed
    corpus = load_corpus(cfg.corpus) if cfg.corpus else None
    out = _out_dir(args.out or cfg.out, "simulate")
    out.mkdir(parents=True, exist_ok=True)
    logs = run_batch(batch, seed, corpus)
    lines = []
    for lg in logs:
        lg.write(out / f"{lg.game_id}.jsonl")
        level = next(lg.level_of(p) for p in lg.communicators) if lg.communicators else "gunboat"
        lines.append(f"{lg.game_id}\t{level}\t{lg.summary}")
    (out / "summaries.tsv").write_text(f"# schema_version: {SCHEMA_VERSION}\n" + "".join(x + "\n" for x in lines),
                                       encoding="utf-8")
    for x in lines:
        print(x)
    return 0


def cmd_parse(args) -> int:
    records = _acts_for_corpus(args.input, False) if args.input else _acts_for_text(args, False)
    _write_jsonl(records, args.out)
    return 0


def cmd_ground(args) -> int:
    records = _acts_for_corpus(args.input, True) if args.input else _acts_for_text(args, True)
    _write_jsonl(records, args.out)
    return 0


def cmd_detect(args) -> int:
    from dipcomm.detectors import EVENT_KINDS, confusion
    from dipcomm.ingest import detect_corpus, ingest_corpus

    p = Path(args.input)
    gold = {}
    if p.is_dir() or _is_game_log(p):
        events = [e for lg in load_batch(p) for e in lg.detect()]
    else:
        corpus = ingest_corpus(p)
        for d in corpus.diagnostics:
            print(f"warning: {d}", file=sys.stderr)
        events = detect_corpus(corpus)
        gold = {k: corpus.gold(k) for k in EVENT_KINDS if corpus.gold(k)}
    _write_jsonl([e.as_dict() for e in events], args.out)
    for kind, labels in gold.items():
        c = confusion(events, labels, kind)
        print(f"{kind}: tp={c.tp} fp={c.fp} fn={c.fn} tn={c.tn} precision={c.precision:.3f} recall={c.recall:.3f}",
              file=sys.stderr)
    return 0


def _is_game_log(p: Path) -> bool:
    with p.open(encoding="utf-8") as fh:
        first = fh.readline()
    return '"record": "header"' in first and '"game_id"' in first


def cmd_smatch(args) -> int:
    from dipcomm.smatch import main as smatch_main

    return smatch_main(args.rest)


def cmd_stats(args) -> int:
    from dipcomm.analytics import RegressionSpec, csv_table, outcomes_from_logs

    logs = load_batch(args.input)
    if not logs:
        raise SchemaError(f"no game logs in {args.input}")
    rows = outcomes_from_logs(logs)
    out = _out_dir(args.out, "stats")
    out.mkdir(parents=True, exist_ok=True)
    if args.regression:
        fit = RegressionSpec(robust=args.robust).fit(rows)
        (out / "regression.csv").write_text(
            csv_table("regression.csv", ((r["term"], r["coef"], r["se"], r["ci_low"], r["ci_high"]) for r in fit.rows())),
            encoding="utf-8")
        print(f"{'term':<17} {'coef':>8} {'ci_low':>8} {'ci_high':>8}")
        for r in fit.rows():
            print(f"{r['term']:<17} {r['coef']:>8.3f} {r['ci_low']:>8.3f} {r['ci_high']:>8.3f}")
    (out / "outcomes.csv").write_text(
        csv_table("outcomes.csv", ((r.game_id, r.power.value, r.level, r.centers) for r in rows)), encoding="utf-8")
    return 0


def cmd_report(args) -> int:
    from dipcomm.analytics import RegressionSpec, outcomes_from_logs, report

    logs = load_batch(args.input)
    events = [e for lg in logs for e in lg.detect()]
    fit = None
    if logs:
        try:
            fit = RegressionSpec().fit(outcomes_from_logs(logs))
        except (DipcommError, ValueError) as e:
            print(f"warning: no regression ({e})", file=sys.stderr)
    rep = report(logs, events, fit)
    paths = rep.write(_out_dir(args.out, "report"))
    sys.stdout.write(rep.text)
    for p in paths:
        print(p, file=sys.stderr)
    return 0


# -- argument parsing ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dipcomm", description="Negotiation grounding and deception detection for Diplomacy.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="play a batch of self-play games")
    sp.add_argument("--config", help="JSON pipeline config")
    sp.add_argument("--levels", help="comma-separated: natural_language,amr_only,random_corpus,gunboat")
    sp.add_argument("--games", type=int, help="games per level")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--turns", type=int, help="movement turns per game (default 14)")
    sp.add_argument("--rounds", type=int, help="negotiation exchanges per pair of powers per turn (default 3)")
    sp.add_argument("--honesty", type=float)
    sp.add_argument("--persuadability", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    for name, func, help_ in (("parse", cmd_parse, "extract communicative acts"),
                              ("ground", cmd_ground, "extract acts and ground them to orders")):
        sp = sub.add_parser(name, help=help_)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--text")
        src.add_argument("--in", dest="input", help="annotated corpus (JSON Lines)")
        sp.add_argument("--sender", default="ENG")
        sp.add_argument("--recipient", default="GER")
        sp.add_argument("--units", nargs="*", help='units such as "GER F SKA"; default: the opening position')
        sp.add_argument("--turn", default="S1901M")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("detect", help="broken commitments and persuasion over a corpus or a batch")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", help="events file (default stdout)")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("smatch", help="smatch between two graph files (options as for the smatch command)")
    sp.add_argument("rest", nargs=argparse.REMAINDER)
    sp.set_defaults(func=cmd_smatch)

    sp = sub.add_parser("stats", help="end-of-game outcome tables and regression")
    sp.add_argument("--in", dest="input", required=True, help="directory of game logs")
    sp.add_argument("--regression", action="store_true")
    sp.add_argument("--robust", action="store_true", help="HC1 standard errors")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("report", help="CSV tables and a text summary for a batch")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["smatch"]:
        # options belong to the smatch command; argparse.REMAINDER would not pass them through
        from dipcomm.smatch import main as smatch_main

        try:
            return smatch_main(argv[1:])
        except (DipcommError, OSError, ValueError) as e:
            print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
            return 2
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DipcommError, OSError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
