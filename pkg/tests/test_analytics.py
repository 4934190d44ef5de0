import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from _gen import synthetic_outcomes
from dipcomm.analytics import (
    CSV_HEADERS,
    IdentityGuess,
    PersuasionCell,
    RateRecord,
    RegressionSpec,
    f_by_turn,
    f_score,
    loess,
    ols_fit,
    outcomes_from_logs,
    outcomes_from_summary,
    persuasion_summary,
    rate,
    rate_table,
    report,
    t_cdf,
    t_ppf,
)
from dipcomm.detectors import PERSUASION_ATTEMPT, PERSUASION_SUCCESS, DetectionEvent
from dipcomm.errors import RankDeficient, SchemaMismatch
from dipcomm.game import POWERS, Power, parse_order
from dipcomm.simulator import BatchConfig, run_batch

# -- t distribution --------------------------------------------------------------------


@pytest.mark.parametrize("df", [1, 2, 3, 5, 10, 30, 200, 10_000])
def test_t_ppf_agrees_with_scipy(df):
    for q in (0.5, 0.6, 0.9, 0.975, 0.995, 0.025):
        assert abs(t_ppf(q, df) - stats.t.ppf(q, df)) < 1e-8


def test_t_known_values():
    # two-sided 95% quantiles from printed tables
    assert t_ppf(0.975, 1) == pytest.approx(12.706, abs=5e-4)
    assert t_ppf(0.975, 10) == pytest.approx(2.228, abs=5e-4)
    assert t_ppf(0.975, 1e7) == pytest.approx(1.95996, abs=1e-4)
    assert t_cdf(0.0, 7) == 0.5
    with pytest.raises(ValueError):
        t_ppf(1.0, 5)
    with pytest.raises(ValueError):
        t_ppf(0.5, 0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.001, 0.999), st.floats(0.5, 500))
def test_t_ppf_inverts_cdf(q, df):
    assert abs(t_cdf(t_ppf(q, df), df) - q) < 1e-6


# -- OLS ----------------------------------------------------------------------------------------


def test_noiseless_recovery():
    rng = np.random.default_rng(1)
    X = np.column_stack([np.ones(50), rng.normal(size=(50, 4))])
    beta = np.array([1.5, -2.0, 0.25, 3.0, 0.0])
    fit = ols_fit(X, X @ beta)
    assert np.max(np.abs(fit.coef - beta)) < 1e-9
    assert np.max(np.abs(fit.residuals)) < 1e-9


def test_coefficients_match_normal_equations():
    rng = np.random.default_rng(2)
    X = np.column_stack([np.ones(40), rng.normal(size=(40, 3))])
    y = X @ np.array([1.0, 2.0, -1.0, 0.5]) + rng.normal(size=40)
    fit = ols_fit(X, y)
    # second route: explicit inverse of X'X
    inv = np.linalg.inv(X.T @ X)
    coef = inv @ X.T @ y
    resid = y - X @ coef
    se = np.sqrt(np.diag(inv) * (resid @ resid) / (40 - 4))
    assert np.allclose(fit.coef, coef, atol=1e-10)
    assert np.allclose(fit.se, se, atol=1e-10)
    half = stats.t.ppf(0.975, 36) * se
    assert np.allclose(fit.ci_low, coef - half, atol=1e-7)
    # residuals are orthogonal to every column
    assert np.max(np.abs(X.T @ fit.residuals)) < 1e-8


def test_hc1_errors():
    rng = np.random.default_rng(3)
    x = rng.normal(size=60)
    X = np.column_stack([np.ones(60), x])
    y = 1 + 2 * x + rng.normal(size=60) * (1 + np.abs(x))
    fit = ols_fit(X, y, robust=True)
    inv = np.linalg.inv(X.T @ X)
    r = y - X @ inv @ X.T @ y
    cov = inv @ (X.T @ np.diag(r ** 2) @ X) @ inv * 60 / 58
    assert np.allclose(fit.se, np.sqrt(np.diag(cov)), atol=1e-10)
    assert fit.robust


def test_rank_deficient_and_shape_errors():
    X = np.column_stack([np.ones(10), np.arange(10.0), 2 * np.arange(10.0)])
    with pytest.raises(RankDeficient):
        ols_fit(X, np.arange(10.0), ["const", "a", "b"])
    with pytest.raises(ValueError):
        ols_fit(np.ones((3, 2)), np.ones(3))
    with pytest.raises(ValueError):
        ols_fit(np.ones((10, 2)), np.ones(9))


def test_ci_coverage_over_100_replications():
    rng = np.random.default_rng(2026)
    n, covered = 30, 0
    for _ in range(100):
        X = np.column_stack([np.ones(n), rng.normal(size=n)])
        y = X @ np.array([1.0, 0.7]) + rng.normal(size=n)
        fit = ols_fit(X, y)
        covered += fit.ci_low[1] <= 0.7 <= fit.ci_high[1]
    sigma = math.sqrt(100 * 0.95 * 0.05)
    assert abs(covered - 95) <= 3 * sigma


# -- regression on outcomes ---------------------------------------------------------------------


def test_design_shape_and_baselines():
    rows = synthetic_outcomes(random.Random(0), 9)
    spec = RegressionSpec()
    X, y, cols = spec.design(rows)
    assert X.shape == (7 * 9, 6 + 4)  # intercept stands in for the baseline level
    assert cols == ["const", "AUS", "ENG", "FRA", "GER", "ITA", "TUR", "natural_language", "amr_only", "gunboat"]
    assert "RUS" not in cols and "random_corpus" not in cols
    # without random messages, gunboat becomes the baseline
    rows2 = synthetic_outcomes(random.Random(0), 6, levels=("natural_language", "amr_only"))
    assert spec.columns(rows2)[-2:] == ["natural_language", "amr_only"]


def test_injected_fra_effect_recovered():
    rows = synthetic_outcomes(random.Random(28), 60, power_effects={"FRA": 2.8}, noise=1.0)
    fit = RegressionSpec().fit(rows)
    r = fit.row("FRA")
    assert r["ci_low"] <= 2.8 <= r["ci_high"]
    assert abs(r["coef"] - 2.8) < 0.6
    amr = fit.row("amr_only")
    assert amr["ci_low"] <= 0.0 <= amr["ci_high"]


def test_noiseless_level_effects():
    rows = synthetic_outcomes(random.Random(5), 12, power_effects={"GER": 1.0, "AUS": -2.0},
                              level_effects={"amr_only": 0.2, "natural_language": 0.5, "gunboat": -1.0}, noise=0)
    fit = RegressionSpec().fit(rows)
    want = {"const": 4.0, "GER": 1.0, "AUS": -2.0, "ENG": 0.0, "amr_only": 0.2, "natural_language": 0.5,
            "gunboat": -1.0}
    for k, v in want.items():
        assert abs(fit.row(k)["coef"] - v) < 1e-9


def test_outcomes_from_summary():
    rows = outcomes_from_summary("g1", "AUS 0, ENG 0, FRA 4, GER 10, ITA 5, RUS 6, TUR 9. (FRA GER TUR)", "amr_only")
    assert [(r.power.value, r.level, r.centers) for r in rows][2:4] == [("FRA", "amr_only", 4), ("GER", "amr_only", 10)]
    assert sum(r.level == "gunboat" for r in rows) == 4


# -- rates --------------------------------------------------------------------------------------


@pytest.mark.parametrize("num,den,want", [
    (1005, 6960, 14.4), (162, 2276, 7.1), (273, 7395, 3.7), (45, 7395, 0.6),
    (63, 5151, 1.2), (35, 2276, 1.5), (53, 6960, 0.76), (77, 13319, 0.57),
])
def test_rates(num, den, want):
    assert abs(rate(num, den) - want) <= 0.05


def test_rate_edge_cases():
    assert rate(0, 0) == 0.0
    with pytest.raises(ValueError):
        rate(3, 2)
    with pytest.raises(ValueError):
        rate(-1, 2)


def test_rate_table_per_game_std():
    recs = [RateRecord("g1", "human", "agent", f) for f in (True, False, False, False)]
    recs += [RateRecord("g2", "human", "agent", f) for f in (True, True)]
    recs += [RateRecord("g1", "agent", "human", False)] * 3
    t = rate_table(recs)
    cell = t[("human", "agent")]
    assert (cell.numerator, cell.denominator) == (3, 6)
    assert cell.rate == 50.0
    assert cell.std == pytest.approx(float(np.std([25.0, 100.0], ddof=1)))
    zero = t[("agent", "human")]
    assert (zero.numerator, zero.rate, zero.std) == (0, 0.0, 0.0)


def _event(kind, mid, s=Power.ENG, r=Power.GER):
    return DetectionEvent(kind, mid, s, r, "S1901M", parse_order("A BER - KIE"), 1)


def test_persuasion_summary():
    events = [_event(PERSUASION_ATTEMPT, f"m{i}") for i in range(211)]
    events += [_event(PERSUASION_SUCCESS, f"m{i}") for i in range(40)]
    events += [_event(PERSUASION_ATTEMPT, "m0")]  # a second action in the same message
    cell = persuasion_summary(events, {("ENG", "GER"): 1000})[("ENG", "GER")]
    assert cell == PersuasionCell(1000, 211, 40)
    assert cell.attempt_rate == pytest.approx(21.1)
    assert cell.success_rate == pytest.approx(100 * 40 / 211)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans(), st.integers(0, 30)), max_size=60))
def test_successes_never_exceed_attempts(spec):
    events = []
    for att, succ, i in spec:
        if att:
            events.append(_event(PERSUASION_ATTEMPT, f"m{i}"))
        if succ:
            events.append(_event(PERSUASION_SUCCESS, f"m{i}"))
    for cell in persuasion_summary(events, {}).values():
        assert cell.successes <= cell.attempts <= cell.messages


# -- identity guesses --------------------------------------------------------------------------


def _guesses(truth, wrong=False):
    out = []
    for turn in range(1, 8):
        for (game, p), actual in truth.items():
            g = actual if not wrong else "human"
            out.append(IdentityGuess(game, turn, "ENG", p, g))
    return out


TRUTH = {("g", p): ("agent" if i % 2 else "human") for i, p in enumerate(POWERS)}


def test_f_by_turn_extremes():
    assert all(f == 1.0 for _, f in f_by_turn(_guesses(TRUTH), TRUTH))
    assert all(f == 0.0 for _, f in f_by_turn(_guesses(TRUTH, wrong=True), TRUTH))
    assert [t for t, _ in f_by_turn(_guesses(TRUTH), TRUTH, smooth=True)] == list(range(1, 8))
    assert f_score(0, 0, 0) == 0.0
    assert f_score(2, 1, 1) == pytest.approx(2 / 3)


def test_loess_reproduces_lines():
    x = np.arange(12.0)
    y = 0.3 * x - 1.0
    assert np.max(np.abs(loess(x, y) - y)) < 1e-6
    noisy = y + np.random.default_rng(0).normal(scale=0.3, size=12)
    smoothed = loess(x, noisy)
    assert np.sum((smoothed - y) ** 2) < np.sum((noisy - y) ** 2)
    with pytest.raises(ValueError):
        loess(x, y, span=0)


# -- reports ------------------------------------------------------------------------------------


def test_empty_report_has_headers_only():
    rep = report([], [])
    for name, header in CSV_HEADERS.items():
        lines = rep.files[name].splitlines()
        assert lines == ["# schema_version: 1.0", ",".join(header)]
    assert rep.text.startswith("games: 0\n")


def test_report_is_deterministic(tmp_path):
    logs = run_batch(BatchConfig(levels=("natural_language", "random_corpus"), games_per_level=2, turns=3), 4)
    events = [e for lg in logs for e in lg.detect()]
    fit = RegressionSpec().fit(outcomes_from_logs(logs))
    a = report(logs, events, fit)
    b = report(logs, events, fit)
    assert a == b
    paths = a.write(tmp_path / "r1")
    b.write(tmp_path / "r2")
    for p in paths:
        assert p.read_bytes() == (tmp_path / "r2" / p.name).read_bytes()
    assert len(a.files["outcomes.csv"].splitlines()) == 2 + 7 * 4
    bad = DetectionEvent(PERSUASION_ATTEMPT, "nope", Power.ENG, Power.GER, "S1901M", parse_order("A BER H"), 1)
    with pytest.raises(SchemaMismatch):
        report(logs, events + [bad])
