import json

import pytest

from dipcomm.cli import PipelineConfig, main
from dipcomm.detectors import BROKEN_COMMITMENT, PERSUASION_ATTEMPT, PERSUASION_SUCCESS
from dipcomm.errors import ConfigInvalid, SchemaError, SchemaMismatch
from dipcomm.ingest import detect_corpus, event_counts, fixture_path, ingest_corpus, parse_corpus_lines

# -- ingest -----------------------------------------------------------------------------


def test_fixtures_load_cleanly():
    sk = ingest_corpus(fixture_path("skagerrak"))
    assert sk.diagnostics == []
    assert sk.counts()["messages"] == 3 and sk.counts()["games"] == 2
    assert sk.gold(BROKEN_COMMITMENT) == {"broken-1": True, "persuade-1": False, "persuade-2": False}
    lim = ingest_corpus(fixture_path("limitations"))
    assert lim.diagnostics == []
    assert len(lim.annotations) > 0


def test_empty_corpus():
    c = parse_corpus_lines([])
    assert c.messages == [] and detect_corpus(c) == []
    assert c.counts()["messages"] == 0


MSG = ('{"type": "message", "game_id": "g", "turn": "S1901M", "message_id": "m1", "sender": "ENG", '
       '"recipient": "GER", "text": "I will hold in London."}')
STATE = '{"type": "state", "game_id": "g", "turn": "S1901M", "units": ["ENG A LON", "GER A BER"]}'


def test_invariant_breaks_become_diagnostics():
    lines = [
        STATE, MSG,
        '{"type": "annotation", "message_id": "m1", "annotator": "GER", "outgoing_label": "lie"}',
        '{"type": "annotation", "message_id": "m1", "annotator": "GER", "incoming_label": "lie"}',
        '{"type": "annotation", "message_id": "zz", "annotator": "GER", "incoming_label": "truth"}',
        MSG,
        '{"type": "guess", "game_id": "g", "annotator": "ENG", "turn": 1, "power": "ENG", "guess": "agent"}',
        '{"type": "guess", "game_id": "g", "annotator": "ENG", "turn": 1, "power": "GER", "guess": "agent"}',
        '{"type": "guess", "game_id": "g", "annotator": "ENG", "turn": 1, "power": "GER", "guess": "human"}',
    ]
    c = parse_corpus_lines(lines)
    assert [d.line for d in c.diagnostics] == [3, 5, 6, 7, 9]
    assert "outgoing label" in str(c.diagnostics[0])
    assert len(c.annotations) == 1 and c.annotations[0].incoming_label == "lie"
    assert len(c.messages) == 1 and len(c.guesses) == 1


@pytest.mark.parametrize("bad", [
    "{not json",
    "[1, 2]",
    '{"type": "gossip"}',
    '{"type": "message", "game_id": "g"}',
    '{"type": "annotation", "message_id": "m1", "annotator": "GER"}',
    '{"type": "annotation", "message_id": "m1", "annotator": "GER", "outgoing_label": "maybe"}',
    '{"type": "guess", "game_id": "g", "annotator": "ENG", "turn": 1, "power": "GER", "guess": "robot"}',
    '{"type": "state", "game_id": "g", "turn": "S1901M", "units": ["ENG A NOWHERE"]}',
])
def test_malformed_lines_raise_with_line_number(bad):
    with pytest.raises(SchemaError) as e:
        parse_corpus_lines([STATE, bad])
    assert e.value.line == 2


def test_unknown_major_version_rejected():
    with pytest.raises(SchemaMismatch):
        parse_corpus_lines(['{"type": "header", "schema_version": "3.1"}'])
    parse_corpus_lines(['{"type": "header", "schema_version": "1.7"}'])


def test_skagerrak_events():
    events = detect_corpus(ingest_corpus(fixture_path("skagerrak")))
    counts = event_counts(events)
    assert counts[(BROKEN_COMMITMENT, 1)] == 1
    assert counts[(PERSUASION_ATTEMPT, 1)] == 1 and counts[(PERSUASION_SUCCESS, 1)] == 1


# -- configuration ---------------------------------------------------------------------------


def test_pipeline_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"seed": 3, "levels": ["amr_only"], "games": 2}')
    cfg = PipelineConfig.load(p)
    assert cfg.seed == 3 and cfg.levels == ("amr_only",) and cfg.turns == 14
    for text in ('{"games": 2}', '{"seed": 1, "colour": "red"}', "[]", "{oops",
                 '{"seed": 1, "corpus": "/no/such/file.jsonl"}'):
        p.write_text(text)
        with pytest.raises(ConfigInvalid):
            PipelineConfig.load(p)


# -- command line ------------------------------------------------------------------------------


def test_simulate_stats_report(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DIPCOMM_OUT", str(tmp_path / "out"))
    assert main(["simulate", "--levels", "natural_language,random_corpus", "--games", "4", "--turns", "2",
                 "--seed", "5"]) == 0
    sim = tmp_path / "out" / "simulate"
    logs = sorted(p.name for p in sim.glob("*.jsonl"))
    assert len(logs) == 8 and (sim / "summaries.tsv").exists()
    capsys.readouterr()

    assert main(["stats", "--in", str(sim), "--regression"]) == 0
    out = capsys.readouterr().out
    terms = [line.split()[0] for line in out.splitlines()[1:]]
    assert terms[:7] == ["const", "AUS", "ENG", "FRA", "GER", "ITA", "TUR"]
    assert "RUS" not in terms and "random_corpus" not in terms
    assert {"natural_language", "gunboat"} <= set(terms)
    reg = (tmp_path / "out" / "stats" / "regression.csv").read_text().splitlines()
    assert reg[0] == "# schema_version: 1.0" and reg[1] == "term,coef,se,ci_low,ci_high"

    assert main(["report", "--in", str(sim), "--out", str(tmp_path / "rep")]) == 0
    first = {p.name: p.read_bytes() for p in (tmp_path / "rep").iterdir()}
    assert main(["report", "--in", str(sim), "--out", str(tmp_path / "rep")]) == 0
    assert first == {p.name: p.read_bytes() for p in (tmp_path / "rep").iterdir()}
    assert set(first) == {"outcomes.csv", "events.csv", "regression.csv", "rates.csv", "report.txt"}

    assert main(["detect", "--in", str(sim), "--out", str(tmp_path / "ev.jsonl")]) == 0
    lines = (tmp_path / "ev.jsonl").read_text().splitlines()
    assert json.loads(lines[0]) == {"record": "header", "schema_version": "1.0"}


def test_simulate_is_reproducible(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--levels", "amr_only", "--games", "1", "--turns", "2", "--seed", "9",
                     "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "amr_only-000.jsonl").read_bytes() == (tmp_path / "b" / "amr_only-000.jsonl").read_bytes()


def test_detect_corpus_prints_confusion(tmp_path, capsys):
    assert main(["detect", "--in", str(fixture_path("skagerrak")), "--out", str(tmp_path / "e.jsonl")]) == 0
    err = capsys.readouterr().err
    assert "broken_commitment: tp=1 fp=0 fn=0 tn=2" in err
    events = [json.loads(x) for x in (tmp_path / "e.jsonl").read_text().splitlines()[1:]]
    assert sum(e["kind"] == BROKEN_COMMITMENT and e["verdict"] == 1 for e in events) == 1


def test_parse_and_ground(capsys):
    assert main(["ground", "--text", "I will move my fleet in London to the North Sea.", "--sender", "ENG",
                 "--recipient", "FRA"]) == 0
    recs = [json.loads(x) for x in capsys.readouterr().out.splitlines()[1:]]
    assert recs == [{"actor": "ENG", "conditional": False, "graph": recs[0]["graph"], "kind": "commitment",
                     "orders": ["F LON - NTH"]}]
    assert main(["parse", "--in", str(fixture_path("skagerrak"))]) == 0
    recs = [json.loads(x) for x in capsys.readouterr().out.splitlines()[1:]]
    assert {r["message_id"] for r in recs} == {"broken-1", "persuade-1", "persuade-2"}
    assert all("orders" not in r for r in recs)


def test_smatch_passthrough(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_text("(m / move-01 :ARG1 (u / unit))\n")
    assert main(["smatch", "--pred", str(a), "--gold", str(a)]) == 0
    assert capsys.readouterr().out.split()[-1] == "1.0000"


def test_errors_exit_2_with_json(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"type": "header", "schema_version": "9.0"}\n')
    assert main(["detect", "--in", str(bad)]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "SchemaMismatch"
    assert main(["stats", "--in", str(tmp_path / "missing")]) == 2
    assert json.loads(capsys.readouterr().err.strip())["error"]
    assert main(["simulate", "--levels", "semaphore", "--out", str(tmp_path / "x")]) == 2
    assert json.loads(capsys.readouterr().err.strip())["error"] == "ConfigInvalid"
