import numpy as np
import pytest

from estimators.base import EffectEstimate
from simulation import (
    CellResult, DgpConfig, compute_metrics, generate_dataset, load_scenario_grid, run_scenario_grid,
    true_tau, true_tau_monte_carlo
)
from utils.error_handler import ConfigError, ExcessiveFailureError, SeparationError


def _constant(data, specs, method, seed=0, m=None, opts=None):
    return EffectEstimate.from_means(0.8, 0.6, method)


def test_true_tau_matches_the_study_value():
    assert true_tau(DgpConfig().coef_outcome) == pytest.approx(2.201, abs=5e-4)


def test_true_tau_is_stable_in_quadrature_order():
    coef = DgpConfig().coef_outcome
    assert true_tau(coef, 20) == pytest.approx(true_tau(coef, 100), rel=1e-5)


def test_true_tau_rejects_coarse_quadrature():
    with pytest.raises(ValueError):
        true_tau(DgpConfig().coef_outcome, 10)


def test_monte_carlo_truth_agrees_with_quadrature():
    coef = DgpConfig().coef_outcome
    tau, se = true_tau_monte_carlo(coef, draws=400000, seed=1, chunk=100000)
    assert abs(tau - true_tau(coef)) < 5 * se + 1e-3


def test_generated_data_is_seed_reproducible():
    a = generate_dataset(DgpConfig(n=200, seed=4))
    b = generate_dataset(DgpConfig(n=200, seed=4))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(np.isnan(a.A), np.isnan(b.A))
    assert a.covariate_names == ('X1', 'X2', 'X3')


def test_generated_missing_rate():
    data = generate_dataset(DgpConfig(n=20000, seed=8))
    assert data.missing_rate == pytest.approx(0.475, abs=0.02)


def test_very_negative_missingness_intercept_leaves_nothing_missing():
    data = generate_dataset(DgpConfig(n=2000, seed=3, coef_missing=(-50.0, 0.6, 0.7, 0.8, 0.5)))
    assert data.n_missing == 0
    assert not np.isnan(data.A).any()


def test_dgp_coefficient_lengths_are_checked():
    with pytest.raises(ValueError):
        DgpConfig(coef_ps=(0.1, 0.2))


def test_ipw_grid_layout():
    grid = load_scenario_grid('ipw')
    assert len(grid.scenarios) == 8
    assert grid.methods == ('ipw-ipw', 'ipw-dr', 'ipw-wee')
    first, last = grid.scenarios[0], grid.scenarios[-1]
    assert first.label == 'All True' and first.specs.ps.covariate_indices == (1, 2, 3)
    assert last.specs.ps.covariate_indices == (1, 2)
    assert not last.specs.missingness.include_outcome


def test_tr_grid_turns_on_bayes_fallback_when_both_missingness_models_are_wrong():
    grid = load_scenario_grid('tr')
    assert len(grid.scenarios) == 16
    for scenario in grid.scenarios:
        specs = scenario.specs
        both_wrong = not specs.missingness.include_outcome and not specs.imputation.include_outcome
        assert specs.use_bayes_fallback == both_wrong


def test_grid_subset_rejects_unknown_labels():
    grid = load_scenario_grid('ipw')
    assert len(grid.subset(labels=['All True']).scenarios) == 1
    with pytest.raises(ConfigError):
        grid.subset(labels=['nope'])


def test_metrics_follow_the_table_definitions():
    cell = CellResult(
        scenario='s', method='m',
        estimates=np.array([2.0, 3.0, np.nan]),
        bses=np.array([0.5, 0.7, np.nan]),
        covered=np.array([True, False, False])
    )
    metrics = compute_metrics(cell, truth=2.0)
    assert metrics.bias == pytest.approx(0.5)
    assert metrics.bias_rate == pytest.approx(25.0)
    assert metrics.ese == pytest.approx(np.sqrt(0.5))
    assert metrics.median_bse == pytest.approx(0.6)
    assert metrics.rmse == pytest.approx(1.0)
    assert metrics.ci_coverage == pytest.approx(50.0)
    assert metrics.n_failed_reps == 1


def test_grid_run_produces_one_row_per_cell():
    grid = load_scenario_grid('ipw', reps=3, bootstrap_B=100).subset(labels=['All True', 'All False'])
    report = run_scenario_grid(DgpConfig(n=100, seed=2), grid, estimate_fn=_constant)
    frame = report.to_frame()
    assert len(frame) == 2 * 3
    assert np.allclose(frame['bias'], frame['bias'].iloc[0])
    assert len(report.estimates_frame()) == 2 * 3 * 3


def test_metrics_recompute_from_stored_vectors():
    grid = load_scenario_grid('ipw', reps=2, bootstrap_B=100).subset(labels=['All True'], methods=['ipw-ipw'])
    report = run_scenario_grid(DgpConfig(n=150, seed=6), grid)
    assert compute_metrics(report.cells[0], report.truth) == report.rows[0]


def test_grid_run_fails_when_replications_fail():
    def always_fails(data, specs, method, seed=0, m=None, opts=None):
        raise SeparationError("separated")

    grid = load_scenario_grid('ipw', reps=2, bootstrap_B=100).subset(labels=['All True'], methods=['ipw-ipw'])
    with pytest.raises(ExcessiveFailureError):
        run_scenario_grid(DgpConfig(n=100, seed=2), grid, estimate_fn=always_fails)


@pytest.mark.slow
def test_ipw_grid_at_desk_scale():
    grid = load_scenario_grid('ipw', reps=200, bootstrap_B=500)
    report = run_scenario_grid(DgpConfig(n=1000, seed=2024), grid, jobs=4)
    frame = report.to_frame().set_index(['scenario', 'method'])
    assert len(frame) == 24

    all_true = frame.loc[('All True', 'ipw-wee')]
    assert abs(all_true['bias_rate']) < 10
    assert 91 <= all_true['ci_coverage'] <= 99
    # a wrong PS model breaks IPW-IPW but not IPW-WEE while missingness and outcome models hold
    assert frame.loc[('MS OR correct; PS wrong', 'ipw-ipw'), 'bias_rate'] > 50
    assert abs(frame.loc[('MS OR correct; PS wrong', 'ipw-wee'), 'bias_rate']) < 10


def _groups_correct(specs):
    """Correct groups among (missingness or imputation), PS, outcome"""
    full = (1, 2, 3)
    return sum([
        specs.missingness.include_outcome or specs.imputation.include_outcome,
        specs.ps.covariate_indices == full,
        specs.outcome.covariate_indices == full
    ])


@pytest.mark.slow
def test_tr_grid_at_desk_scale():
    grid = load_scenario_grid('tr', reps=200, bootstrap_B=500)
    cfg = DgpConfig(n=1000, seed=2025)
    robust = [s.label for s in grid.scenarios if _groups_correct(s.specs) >= 2]
    assert len(robust) == 10

    tr = run_scenario_grid(cfg, grid.subset(labels=robust + ['All False'], methods=['tr-wee']), jobs=4)
    rates = tr.to_frame().set_index('scenario')['bias_rate']
    for label in robust:
        threshold = 20 if label == 'PS OR correct; MS Imp wrong' else 10
        assert abs(rates[label]) < threshold, label
    assert rates['All False'] > 40

    imputed = run_scenario_grid(
        cfg, grid.subset(labels=['MS PS OR correct; Imp wrong'], methods=['dr-si', 'dr-mice']), jobs=4, m=5
    )
    for row in imputed.rows:
        assert row.bias_rate < -15, row.method
