"""Statistics over game logs and detection events: OLS with dummy coding,
rate tables, persuasion summaries, per-turn identity F-scores and reports."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import linalg
from scipy.special import betainc

from dipcomm import SCHEMA_VERSION
from dipcomm.detectors import BROKEN_COMMITMENT, PERSUASION_ATTEMPT, PERSUASION_SUCCESS, DetectionEvent
from dipcomm.errors import RankDeficient, SchemaMismatch
from dipcomm.game.powers import POWERS, Power
from dipcomm.parser.templates import RANDOM_CORPUS
from dipcomm.simulator.agents import COMM_LEVELS, GUNBOAT

BASELINE_POWER = Power.RUS
BASELINE_LEVEL = RANDOM_CORPUS


# -- t distribution -------------------------------------------------------------------


def t_cdf(t: float, df: float) -> float:
    x = df / (df + t * t)
    tail = 0.5 * betainc(df / 2.0, 0.5, x)
    return 1.0 - tail if t >= 0 else tail


def t_ppf(q: float, df: float, tol: float = 1e-8) -> float:
    """Quantile of Student's t by bisection on the incomplete-beta CDF."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile level must be in (0, 1)")
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if q < 0.5:
        return -t_ppf(1.0 - q, df, tol)
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- least squares --------------------------------------------------------------------


@dataclass(frozen=True)
class OLSResult:
    names: tuple[str, ...]
    coef: np.ndarray
    se: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    df: int
    residuals: np.ndarray
    robust: bool = False

    def row(self, name: str) -> dict:
        i = self.names.index(name)
        return {"term": name, "coef": float(self.coef[i]), "se": float(self.se[i]),
                "ci_low": float(self.ci_low[i]), "ci_high": float(self.ci_high[i])}

    def rows(self) -> list[dict]:
        return [self.row(n) for n in self.names]


def ols_fit(X, y, names: Sequence[str] | None = None, robust: bool = False, level: float = 0.95) -> OLSResult:
    """Least squares through a column-pivoted QR factorization.

    Standard errors are classical unless ``robust`` is set, which switches
    to HC1 sandwich errors. Intervals use the t quantile with n - p degrees
    of freedom.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError(f"response has shape {y.shape}, expected ({n},)")
    if n < p + 2:
        raise ValueError(f"need at least {p + 2} rows for {p} columns, got {n}")
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(p))
    Q, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(n, p) * np.finfo(float).eps * (diag[0] if p else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < p:
        dropped = [names[piv[i]] for i in range(rank, p)]
        raise RankDeficient(f"design has rank {rank} < {p}; collinear: {', '.join(dropped)}")
    z = linalg.solve_triangular(R, Q.T @ y)
    coef = np.empty(p)
    coef[piv] = z
    resid = y - X @ coef
    df = n - p
    Rinv = linalg.solve_triangular(R, np.eye(p))
    xtx_inv_p = Rinv @ Rinv.T  # inverse of X'X in pivoted order
    xtx_inv = np.empty_like(xtx_inv_p)
    xtx_inv[np.ix_(piv, piv)] = xtx_inv_p
    if robust:
        meat = (X * resid[:, None] ** 2).T @ X
        cov = xtx_inv @ meat @ xtx_inv * (n / df)
    else:
        cov = xtx_inv * float(resid @ resid) / df
    se = np.sqrt(np.diag(cov))
    half = t_ppf(0.5 + level / 2.0, df) * se
    return OLSResult(names, coef, se, coef - half, coef + half, df, resid, robust)


# -- regression on end-of-game centers ------------------------------------------------


@dataclass(frozen=True)
class PowerOutcome:
    game_id: str
    power: Power
    level: str
    centers: int


def outcomes_from_logs(logs) -> list[PowerOutcome]:
    out = []
    for lg in logs:
        for p in POWERS:
            if p not in lg.assignments:
                raise SchemaMismatch(f"{lg.game_id} has no assignment for {p.value}")
            out.append(PowerOutcome(lg.game_id, p, lg.level_of(p), lg.final_centers.get(p, 0)))
    return out


def outcomes_from_summary(game_id: str, line: str, level: str) -> list[PowerOutcome]:
    """Rows for one summary line; the parenthesized powers played at ``level``."""
    from dipcomm.simulator.log import parse_summary

    centers, comm = parse_summary(line)
    return [PowerOutcome(game_id, p, level if p in comm else GUNBOAT, centers[p]) for p in POWERS]


@dataclass(frozen=True)
class RegressionSpec:
    """End-of-game centers on power dummies (baseline Russia) and
    communication-level dummies (baseline random messages)."""

    power_baseline: Power = BASELINE_POWER
    level_baseline: str = BASELINE_LEVEL
    robust: bool = False

    def columns(self, rows: Sequence[PowerOutcome]) -> list[str]:
        """Intercept, six power dummies, one dummy per non-baseline level.

        When no row has the baseline level, gunboat serves as the baseline.
        """
        levels = {r.level for r in rows}
        base = self.level_baseline if self.level_baseline in levels else GUNBOAT
        cols = ["const"] + [p.value for p in POWERS if p != self.power_baseline]
        cols += [lv for lv in COMM_LEVELS if lv in levels and lv != base]
        return cols

    def design(self, rows: Sequence[PowerOutcome]) -> tuple[np.ndarray, np.ndarray, list[str]]:
        cols = self.columns(rows)
        X = np.zeros((len(rows), len(cols)))
        for i, r in enumerate(rows):
            X[i, 0] = 1.0
            for j, c in enumerate(cols[1:], 1):
                if c == r.power.value or c == r.level:
                    X[i, j] = 1.0
        y = np.array([r.centers for r in rows], dtype=float)
        return X, y, cols

    def fit(self, rows: Sequence[PowerOutcome]) -> OLSResult:
        X, y, cols = self.design(rows)
        return ols_fit(X, y, cols, robust=self.robust)


# -- rates ----------------------------------------------------------------------------


def rate(numerator: int, denominator: int) -> float:
    """Percentage, 0 when the denominator is 0."""
    if numerator < 0 or denominator < 0:
        raise ValueError("counts cannot be negative")
    if numerator > denominator:
        raise ValueError(f"numerator {numerator} exceeds denominator {denominator}")
    return 100.0 * numerator / denominator if denominator else 0.0


@dataclass(frozen=True)
class RateRecord:
    game_id: str
    sender_class: str
    receiver_class: str
    flagged: bool


@dataclass(frozen=True)
class RateCell:
    numerator: int
    denominator: int
    rate: float  # percent
    std: float  # over per-game rates, percent


def _std(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def rate_table(records: Iterable[RateRecord]) -> dict[tuple[str, str], RateCell]:
    """Flagged share of messages per (sender class, receiver class)."""
    per_game: dict[tuple[str, str], dict[str, list[int]]] = {}
    for r in records:
        cell = per_game.setdefault((r.sender_class, r.receiver_class), {})
        c = cell.setdefault(r.game_id, [0, 0])
        c[0] += int(r.flagged)
        c[1] += 1
    out = {}
    for key in sorted(per_game):
        games = per_game[key]
        num = sum(v[0] for v in games.values())
        den = sum(v[1] for v in games.values())
        out[key] = RateCell(num, den, rate(num, den), _std([rate(*games[g]) for g in sorted(games)]))
    return out


def rate_records(logs, events: Iterable[DetectionEvent], kind: str = BROKEN_COMMITMENT,
                 class_of: Callable[[object, Power], str] | None = None) -> list[RateRecord]:
    """One record per logged message, flagged when an event of ``kind`` fired on it.

    ``class_of(log, power)`` names the class of a power in a game; by default
    its communication level.
    """
    class_of = class_of or (lambda lg, p: lg.level_of(p))
    flagged = {e.message_id for e in events if e.kind == kind and e.verdict}
    out = []
    for lg in logs:
        for m in lg.messages():
            out.append(RateRecord(lg.game_id, class_of(lg, m.sender), class_of(lg, m.recipient),
                                  m.message_id in flagged))
    return out


@dataclass(frozen=True)
class PersuasionCell:
    messages: int
    attempts: int
    successes: int

    @property
    def attempt_rate(self) -> float:
        return rate(self.attempts, self.messages)

    @property
    def success_rate(self) -> float:
        return rate(self.successes, self.attempts)


def persuasion_summary(events: Iterable[DetectionEvent], message_counts: Mapping[tuple[str, str], int],
                       class_of: Callable[[Power], str] = lambda p: p.value) -> dict[tuple[str, str], PersuasionCell]:
    """Attempts per message and successes per attempt, by (sender, receiver) class.

    Counts are over distinct messages: a message with several attempted
    actions counts once.
    """
    attempts: dict[tuple[str, str], set[str]] = {}
    successes: dict[tuple[str, str], set[str]] = {}
    for e in events:
        key = (class_of(e.sender), class_of(e.recipient))
        if e.kind == PERSUASION_ATTEMPT:
            attempts.setdefault(key, set()).add(e.message_id)
        elif e.kind == PERSUASION_SUCCESS:
            successes.setdefault(key, set()).add(e.message_id)
    out = {}
    for key in sorted(set(message_counts) | set(attempts) | set(successes)):
        a = attempts.get(key, set())
        s = successes.get(key, set()) & a
        out[key] = PersuasionCell(message_counts.get(key, len(a)), len(a), len(s))
    return out


# -- identity guesses ---------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityGuess:
    game_id: str
    turn: int
    annotator: str
    power: Power
    guess: str  # "human" or "agent"


def f_score(tp: int, fp: int, fn: int) -> float:
    d = 2 * tp + fp + fn
    return 2 * tp / d if d else 0.0


def f_by_turn(guesses: Iterable[IdentityGuess], truth: Mapping[tuple[str, Power], str],
              smooth: bool = False, span: float = 0.75) -> list[tuple[int, float]]:
    """F-score of spotting agents, pooled over games and annotators per turn."""
    counts: dict[int, list[int]] = {}
    for g in guesses:
        actual = truth[(g.game_id, g.power)]
        c = counts.setdefault(g.turn, [0, 0, 0])
        if g.guess == "agent" and actual == "agent":
            c[0] += 1
        elif g.guess == "agent":
            c[1] += 1
        elif actual == "agent":
            c[2] += 1
    turns = sorted(counts)
    scores = [f_score(*counts[t]) for t in turns]
    if smooth and len(turns) > 2:
        scores = list(loess(turns, scores, span))
    return list(zip(turns, scores))


def loess(x, y, span: float = 0.75) -> np.ndarray:
    """Local linear regression with tricube weights over the nearest
    ``ceil(span * n)`` points, evaluated at each x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if not 0 < span <= 1:
        raise ValueError("span must be in (0, 1]")
    k = max(3, int(math.ceil(span * n)))
    k = min(k, n)
    out = np.empty(n)
    for i, x0 in enumerate(x):
        d = np.abs(x - x0)
        h = np.sort(d)[k - 1]
        if h == 0:
            h = 1.0
        u = np.clip(d / (h * 1.0000001), 0.0, 1.0)
        w = (1 - u ** 3) ** 3
        A = np.column_stack([np.ones(n), x - x0])
        sw = np.sqrt(w)
        beta, *_ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)
        out[i] = beta[0]
    return out


# -- reports --------------------------------------------------------------------------------

CSV_HEADERS = {
    "outcomes.csv": ["game_id", "power", "level", "centers"],
    "events.csv": ["message_id", "turn", "kind", "sender", "recipient", "action", "verdict"],
    "regression.csv": ["term", "coef", "se", "ci_low", "ci_high"],
    "rates.csv": ["kind", "sender_class", "receiver_class", "numerator", "denominator", "rate", "std"],
}


def csv_table(name: str, rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADERS[name])
    for r in rows:
        w.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


@dataclass
class Report:
    files: dict[str, str] = field(default_factory=dict)
    text: str = ""

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, content in sorted(self.files.items()):
            (out / name).write_text(content, encoding="utf-8")
            paths.append(out / name)
        (out / "report.txt").write_text(self.text, encoding="utf-8")
        paths.append(out / "report.txt")
        return paths


def report(logs, events: Sequence[DetectionEvent], fit: OLSResult | None = None) -> Report:
    """CSV tables plus a short plain-text summary; deterministic in its inputs."""
    known = {m.message_id: m for lg in logs for m in lg.messages()}
    for e in events:
        if e.message_id not in known:
            raise SchemaMismatch(f"event refers to unknown message {e.message_id!r}")
    outcomes = outcomes_from_logs(logs)
    files = {
        "outcomes.csv": csv_table("outcomes.csv", ((r.game_id, r.power.value, r.level, r.centers) for r in outcomes)),
        "events.csv": csv_table("events.csv", ((e.message_id, e.turn, e.kind, e.sender.value, e.recipient.value,
                                           e.action.render(), e.verdict) for e in events)),
        "regression.csv": csv_table("regression.csv", ((r["term"], r["coef"], r["se"], r["ci_low"], r["ci_high"])
                                                  for r in (fit.rows() if fit else []))),
    }
    rate_rows = []
    for kind in (BROKEN_COMMITMENT, PERSUASION_ATTEMPT, PERSUASION_SUCCESS):
        for (sc, rc), cell in rate_table(rate_records(logs, events, kind)).items():
            rate_rows.append((kind, sc, rc, cell.numerator, cell.denominator, cell.rate, cell.std))
    files["rates.csv"] = csv_table("rates.csv", rate_rows)
    lines = [f"games: {len(logs)}", f"messages: {len(known)}", f"events: {len(events)}"]
    for kind in (BROKEN_COMMITMENT, PERSUASION_ATTEMPT, PERSUASION_SUCCESS):
        n = sum(1 for e in events if e.kind == kind and e.verdict)
        lines.append(f"{kind}: {n}")
    for lg in logs:
        lines.append(f"{lg.game_id}: {lg.summary}")
    if fit is not None:
        lines.append("regression (95% CI):")
        for r in fit.rows():
            lines.append(f"  {r['term']:<17} {r['coef']:+.3f}  [{r['ci_low']:+.3f}, {r['ci_high']:+.3f}]")
    return Report(files, "\n".join(lines) + "\n")
