"""Smatch: triple-overlap precision, recall and F1 between intent graphs
under the best variable alignment found by hill climbing."""
from __future__ import annotations

import argparse
import itertools
import random
import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

from dipcomm.errors import LengthMismatch
from dipcomm.intent.graph import IntentGraph, parse_graph_blocks, to_triples

DEFAULT_RESTARTS = 4
EXACT_LIMIT = 8


@dataclass(frozen=True)
class Alignment:
    mapping: Mapping[str, str]
    score: int


@dataclass(frozen=True)
class SmatchResult:
    precision: float
    recall: float
    f1: float
    matched: int
    total_a: int
    total_b: int
    best: Alignment


@dataclass(frozen=True)
class _Triples:
    instances: frozenset[tuple[str, str]]
    attributes: frozenset[tuple[str, str, str]]
    relations: frozenset[tuple[str, str, str]]

    @property
    def size(self) -> int:
        return len(self.instances) + len(self.attributes) + len(self.relations)


def _triple_sets(g: IntentGraph) -> _Triples:
    inst, attr, rel = set(), set(), set()
    for t in to_triples(g):
        if t.kind == "instance":
            inst.add((t.source, t.target))
        elif t.kind == "attribute":
            attr.add((t.source, t.relation, t.target))
        else:
            rel.add((t.source, t.relation, t.target))
    return _Triples(frozenset(inst), frozenset(attr), frozenset(rel))


def match_count(ta: _Triples, tb: _Triples, mapping: Mapping[str, str]) -> int:
    """Triples of ``ta`` that land on triples of ``tb`` under ``mapping``."""
    n = 0
    for v, c in ta.instances:
        w = mapping.get(v)
        if w is not None and (w, c) in tb.instances:
            n += 1
    for v, r, val in ta.attributes:
        w = mapping.get(v)
        if w is not None and (w, r, val) in tb.attributes:
            n += 1
    for v1, r, v2 in ta.relations:
        w1, w2 = mapping.get(v1), mapping.get(v2)
        if w1 is not None and w2 is not None and (w1, r, w2) in tb.relations:
            n += 1
    return n


def _smart_start(a: IntentGraph, b: IntentGraph) -> dict[str, str]:
    mapping: dict[str, str] = {}
    used: set[str] = set()
    order = sorted(a.nodes, key=lambda v: (v != a.root, v))
    for v in order:
        if v == a.root and b.root is not None and b.nodes[b.root] == a.nodes[v]:
            mapping[v] = b.root
            used.add(b.root)
            continue
        for w in sorted(b.nodes):
            if w not in used and b.nodes[w] == a.nodes[v]:
                mapping[v] = w
                used.add(w)
                break
    return mapping


def _random_start(a: IntentGraph, b: IntentGraph, rng: random.Random) -> dict[str, str]:
    va = sorted(a.nodes)
    vb = sorted(b.nodes)
    rng.shuffle(vb)
    mapping = {}
    for v, w in zip(va, vb):
        mapping[v] = w
    return mapping


def _climb(ta: _Triples, tb: _Triples, va: list[str], vb: list[str], mapping: dict[str, str]) -> tuple[dict, int]:
    score = match_count(ta, tb, mapping)
    while True:
        best_gain, best_map = 0, None
        used = set(mapping.values())
        for v in va:
            options = [w for w in vb if w not in used]
            if v in mapping:
                options.append(None)
            for w in options:
                cand = dict(mapping)
                if w is None:
                    del cand[v]
                else:
                    cand[v] = w
                gain = match_count(ta, tb, cand) - score
                if gain > best_gain:
                    best_gain, best_map = gain, cand
        for v1, v2 in itertools.combinations(va, 2):
            w1, w2 = mapping.get(v1), mapping.get(v2)
            if w1 == w2:
                continue
            cand = dict(mapping)
            for v, w in ((v1, w2), (v2, w1)):
                if w is None:
                    cand.pop(v, None)
                else:
                    cand[v] = w
            gain = match_count(ta, tb, cand) - score
            if gain > best_gain:
                best_gain, best_map = gain, cand
        if best_map is None:
            return mapping, score
        mapping, score = best_map, score + best_gain


def exact_alignment(a: IntentGraph, b: IntentGraph) -> Alignment:
    """Best alignment by exhaustive search; graphs must have at most
    ``EXACT_LIMIT`` variables each."""
    if len(a.nodes) > EXACT_LIMIT or len(b.nodes) > EXACT_LIMIT:
        raise ValueError(f"exact alignment is limited to {EXACT_LIMIT} variables per graph")
    ta, tb = _triple_sets(a), _triple_sets(b)
    va, vb = sorted(a.nodes), sorted(b.nodes)
    best = [Alignment({}, 0)]

    def extend(i: int, mapping: dict[str, str], used: set[str]) -> None:
        if i == len(va):
            s = match_count(ta, tb, mapping)
            if s > best[0].score:
                best[0] = Alignment(dict(mapping), s)
            return
        v = va[i]
        extend(i + 1, mapping, used)
        for w in vb:
            if w in used:
                continue
            mapping[v] = w
            used.add(w)
            extend(i + 1, mapping, used)
            used.discard(w)
            del mapping[v]

    extend(0, {}, set())
    return best[0]


def _prf(matched: int, na: int, nb: int) -> tuple[float, float, float]:
    p = matched / na if na else 0.0
    r = matched / nb if nb else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def smatch_score(
    a: IntentGraph,
    b: IntentGraph,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | str = 0,
    exact: bool = False,
) -> SmatchResult:
    """Score predicted graph ``a`` against gold graph ``b``.

    Precision is matched/|triples(a)|, recall matched/|triples(b)|. Two empty
    graphs score 1; an empty graph against a non-empty one scores 0.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    ta, tb = _triple_sets(a), _triple_sets(b)
    if a.is_empty or b.is_empty:
        f = 1.0 if a.is_empty and b.is_empty else 0.0
        return SmatchResult(f, f, f, 0, ta.size, tb.size, Alignment({}, 0))
    if exact:
        best = exact_alignment(a, b)
    else:
        rng = random.Random(f"smatch:{seed}")
        va, vb = sorted(a.nodes), sorted(b.nodes)
        starts = [_smart_start(a, b)] + [_random_start(a, b, rng) for _ in range(restarts)]
        best = Alignment({}, -1)
        for start in starts:
            m, s = _climb(ta, tb, va, vb, start)
            if s > best.score:
                best = Alignment(m, s)
            if s == min(ta.size, tb.size):
                break
    p, r, f = _prf(best.score, ta.size, tb.size)
    return SmatchResult(p, r, f, best.score, ta.size, tb.size, best)


@dataclass(frozen=True)
class CorpusScore:
    precision: float
    recall: float
    f1: float
    pairs: tuple[SmatchResult, ...]


def corpus_smatch(
    predicted: Sequence[IntentGraph],
    gold: Sequence[IntentGraph],
    restarts: int = DEFAULT_RESTARTS,
    seed: int | str = 0,
) -> CorpusScore:
    """Micro-averaged scores: matched and total triple counts are summed over
    pairs before dividing. Each pair gets its own seed derived from ``seed``."""
    if len(predicted) != len(gold):
        raise LengthMismatch(f"{len(predicted)} predicted graphs but {len(gold)} gold graphs")
    results = tuple(smatch_score(p, g, restarts, seed=f"{seed}:{i}") for i, (p, g) in enumerate(zip(predicted, gold)))
    matched = sum(r.matched for r in results)
    na = sum(r.total_a for r in results)
    nb = sum(r.total_b for r in results)
    # Empty-vs-empty pairs contribute no triples; count them as one matched triple each
    # so an all-empty corpus scores 1 rather than 0/0.
    both_empty = sum(1 for p, g in zip(predicted, gold) if p.is_empty and g.is_empty)
    p, r, f = _prf(matched + both_empty, na + both_empty, nb + both_empty)
    return CorpusScore(p, r, f, results)


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="smatch", description="Smatch between two graph files.")
    ap.add_argument("--pred", required=True, help="predicted graphs, blank-line separated")
    ap.add_argument("--gold", required=True, help="gold graphs, blank-line separated")
    ap.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    ap.add_argument("--seed", default="0")
    ap.add_argument("--tsv", help="write per-pair scores to this file ('-' for stdout)")
    args = ap.parse_args(argv)
    with open(args.pred, encoding="utf-8") as fh:
        pred = parse_graph_blocks(fh.read())
    with open(args.gold, encoding="utf-8") as fh:
        gold = parse_graph_blocks(fh.read())
    pred_g, gold_g, ids = _pair_up(pred, gold)
    score = corpus_smatch(pred_g, gold_g, args.restarts, args.seed)
    print(f"{score.precision:.4f} {score.recall:.4f} {score.f1:.4f}")
    if args.tsv:
        rows = ["id\tprecision\trecall\tf1"] + [
            f"{i}\t{r.precision:.4f}\t{r.recall:.4f}\t{r.f1:.4f}" for i, r in zip(ids, score.pairs)]
        text = "\n".join(rows) + "\n"
        if args.tsv == "-":
            sys.stdout.write(text)
        else:
            with open(args.tsv, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0


def _pair_up(pred, gold):
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predicted graphs but {len(gold)} gold graphs")
    pred_ids = [i for i, _ in pred]
    if all(pred_ids) and all(i for i, _ in gold):
        by_id = dict(gold)
        if set(pred_ids) != set(by_id):
            raise LengthMismatch("predicted and gold ids differ")
        return [g for _, g in pred], [by_id[i] for i in pred_ids], pred_ids
    return [g for _, g in pred], [g for _, g in gold], [i or str(n) for n, (i, _) in enumerate(pred)]


if __name__ == "__main__":
    raise SystemExit(main())
