import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heckeqf.asymptotics import (
    BLOCK,
    PartialSumSeries,
    checkpoint_grid,
    count_sign_changes,
    fit_main_term,
    lemma_hypothesis_check,
    partial_sum_arith,
    partial_sum_lattice,
    partial_sum_series,
    remainder_exponent,
    sign_change_locations,
    sign_sequence,
)
from heckeqf.qform import principal_form

FUNDAMENTAL = (-3, -4, -7, -8, -11, -19, -43, -67, -163)


def synthetic(fn, grid):
    return PartialSumSeries(2, [(x, float(fn(x))) for x in grid])


def test_partial_sum_examples(delta_5000, table_5000):
    Q = principal_form(-4)
    assert partial_sum_lattice(delta_5000, Q, 1, 0) == 0
    assert partial_sum_lattice(delta_5000, Q, 1, 1) == pytest.approx(4)
    assert partial_sum_lattice(delta_5000, Q, 2, 2) == pytest.approx(5.125, abs=1e-12)
    assert partial_sum_lattice(delta_5000, Q, 2, 3) == pytest.approx(5.125, abs=1e-12)
    for D, w in ((-3, 6), (-4, 4), (-163, 2)):
        assert partial_sum_arith(delta_5000, D, 1, 1, table_5000) == pytest.approx(w)
    assert partial_sum_arith(delta_5000, -4, 2, 2, table_5000) == pytest.approx(5.125, abs=1e-12)
    with pytest.raises(IndexError):
        partial_sum_arith(delta_5000, -4, 1, 5001, table_5000)


@pytest.mark.parametrize("D", FUNDAMENTAL)
@pytest.mark.parametrize("r", [1, 2, 3])
def test_routes_agree_fundamental(D, r, delta_5000, table_5000):
    x = 5000
    lat = partial_sum_lattice(delta_5000, principal_form(D), r, x)
    ari = partial_sum_arith(delta_5000, D, r, x, table_5000)
    assert lat == pytest.approx(ari, rel=1e-9, abs=1e-9)


def test_even_sums_increase(delta_5000, table_5000):
    grid = checkpoint_grid(5000, start=10, ratio=1.3)
    S = partial_sum_series(delta_5000, -4, 2, grid, table_5000).S
    assert np.all(np.diff(S) >= 0)


def test_checkpoint_grid():
    assert checkpoint_grid(5000) == [1000, 1500, 2250, 3375, 5000]
    assert checkpoint_grid(500) == [500]
    with pytest.raises(ValueError):
        checkpoint_grid(100, ratio=1.0)


def test_series_matches_direct_sums(delta_5000, table_5000):
    grid = [1, 2, BLOCK - 1, BLOCK, BLOCK + 1, 5000]
    series = partial_sum_series(delta_5000, -3, 2, grid, table_5000)
    for x, s in series.checkpoints:
        assert s == pytest.approx(partial_sum_arith(delta_5000, -3, 2, x, table_5000), rel=1e-12)


def test_series_deterministic_across_workers(delta_100k, table_100k):
    grid = checkpoint_grid(100_000, start=1000, ratio=1.5)
    base = partial_sum_series(delta_100k, -4, 2, grid, table_100k, workers=1).checkpoints
    for w in (2, 4, 7):
        assert partial_sum_series(delta_100k, -4, 2, grid, table_100k, workers=w).checkpoints == base


GRID = checkpoint_grid(10**6, start=1000, ratio=1.5)


def test_fit_constant():
    fit = fit_main_term(synthetic(lambda x: 3 * x, GRID))
    assert fit.degree == 0
    assert fit.coefficients[0] == pytest.approx(3, abs=1e-12)


def test_fit_linear_log():
    s = PartialSumSeries(4, [(x, x * (2 + math.log(x))) for x in GRID])
    fit = fit_main_term(s)
    assert fit.coefficients == pytest.approx([2, 1], abs=1e-9)
    assert fit.max_rel_residual < 1e-12


def test_fit_odd_r_raises():
    with pytest.raises(ValueError):
        fit_main_term(PartialSumSeries(3, [(x, float(x)) for x in GRID]))


def test_remainder_synthetic():
    est = remainder_exponent(synthetic(lambda x: x + x**0.7, GRID))
    assert est.slope == pytest.approx(0.7, abs=0.05)


def test_remainder_exact_main_term():
    assert remainder_exponent(synthetic(lambda x: 5 * x, GRID)).slope == -math.inf


@settings(deadline=None, max_examples=30)
@given(st.floats(1.0, 10.0), st.floats(0.3, 0.85), st.floats(0.5, 5.0))
def test_remainder_recovers_power(C, g, A):
    est = remainder_exponent(synthetic(lambda x: C * x + A * x**g, GRID))
    assert est.slope == pytest.approx(g, abs=0.05)


def test_remainder_odd_r():
    s = PartialSumSeries(1, [(x, 2.0 * x**0.6) for x in GRID])
    est = remainder_exponent(s)
    assert est.slope == pytest.approx(0.6, abs=1e-9)
    assert est.gamma == pytest.approx(0.7)


def test_sign_sequence_examples(delta_5000, table_5000):
    seq = dict(sign_sequence(delta_5000, -4, 10, table_5000))
    assert seq[1] == 1 and seq[2] == -1
    assert 3 not in seq
    assert sorted(seq) == [1, 2, 4, 5, 8, 9, 10]


def test_sign_changes_skip_zeros():
    assert sign_change_locations([(1, 1), (2, 0), (3, 1), (4, -1), (5, 0), (6, -1), (7, 1)]) == [4, 7]


def test_constant_sign_fails():
    lam = np.ones(2001)
    rep = count_sign_changes(lam, -4, 1000)
    assert rep.count == 0 and not rep.passed


def test_alternating_sign_counts_every_step():
    X = 2000
    lam = np.ones(X + 1)
    seq = sign_sequence(lam, -4, X)
    for i, (n, _) in enumerate(seq):
        lam[n] = (-1) ** i
    rep = count_sign_changes(lam, -4, 1000)
    assert rep.count == rep.represented - 1
    assert rep.passed


def test_sign_report_fields(delta_5000, table_5000):
    rep = count_sign_changes(delta_5000, -4, 1000, table_5000)
    assert rep.interval == (1000, 2000)
    assert rep.threshold == pytest.approx(1000 ** (8 / 33 - 0.02))
    assert rep.bound == pytest.approx(1000 ** (8 / 33))
    assert all(1000 < n <= 2000 for n in rep.locations)
    d = rep.to_dict()
    assert d["passed"] is True and d["interval"] == [1000, 2000]
    with pytest.raises(IndexError):
        count_sign_changes(delta_5000, -4, 2501, table_5000)


def test_lemma_examples():
    ok = lemma_hypothesis_check(0.01, 0.7, 8 / 11, 25 / 33 + 0.001)
    assert ok.valid and ok.exponent == pytest.approx(1 - 25 / 33 - 0.001)
    assert not lemma_hypothesis_check(0.1, 0.5, 0.7, 1.0).valid
    bad = lemma_hypothesis_check(0.2, 0.7, 0.5, 0.8)
    assert not bad.valid and bad.exponent is None
    assert "max(alpha + beta, gamma) < delta" in bad.violations


@given(st.floats(0.001, 0.5), st.floats(0.001, 0.5), st.floats(0.001, 0.99), st.floats(0.0, 1.2))
def test_lemma_validity_characterization(a, b, g, d):
    v = lemma_hypothesis_check(a, b, g, d)
    assert v.valid == (max(a + b, g) < d < 1)
