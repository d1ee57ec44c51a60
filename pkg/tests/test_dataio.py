import numpy as np
import pytest

from config import RunConfig
from dataio.loader import ColumnMap, load_csv, write_csv
from dataio.report import (
    DATASET_FIELDS, METHOD_FIELDS, AnalysisReport, dataset_summary, format_record, method_fields,
    parse_report, render_metrics
)
from dataio.workflows import estimate_with_bootstrap
from estimators.base import SpecBundle
from simulation import CellMetrics, MetricsReport
from utils.error_handler import ConfigError, ParseError, SchemaError
from utils.validators import build_spec_bundle, validate_run_config


def test_small_file_loads_with_missing_exposure(small_csv):
    data = load_csv(small_csv, ColumnMap('A', 'Y'))
    np.testing.assert_array_equal(data.R, [0, 1, 0])
    assert data.covariate_names == ('x1', 'x2')
    np.testing.assert_array_equal(data.X[:, 2], [0, 1, 0])
    assert data.covariate_coding == {'x2': {'a': 0, 'b': 1}}


def test_absent_column_is_a_schema_error(small_csv):
    with pytest.raises(SchemaError) as info:
        load_csv(small_csv, ColumnMap('A', 'death'))
    assert info.value.column == 'death'


def test_bad_exposure_cell_is_located(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text("A,Y,x\n1,0,0.1\nyes,1,0.2\n")
    with pytest.raises(ParseError) as info:
        load_csv(path, ColumnMap('A', 'Y'))
    assert (info.value.row, info.value.column) == (2, 'A')


def test_outcome_outside_zero_one(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text("A,Y,x\n1,0,0.1\n0,2,0.2\n")
    with pytest.raises(ValueError):
        load_csv(path, ColumnMap('A', 'Y'))


def test_missing_outcome_rejected(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text("A,Y,x\n1,NA,0.1\n0,1,0.2\n")
    with pytest.raises(ParseError):
        load_csv(path, ColumnMap('A', 'Y'))


def test_three_level_text_covariate_rejected(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text("A,Y,g\n1,0,a\n0,1,b\n1,1,c\n")
    with pytest.raises(ParseError):
        load_csv(path, ColumnMap('A', 'Y'))


def test_custom_missing_marker(tmp_path):
    path = tmp_path / 'marked.csv'
    path.write_text("A,Y,x\nMissing,0,0.1\n0,1,0.2\n1,1,0.3\n")
    data = load_csv(path, ColumnMap('A', 'Y', missing_markers=('Missing',)))
    assert data.n_missing == 1


def test_duplicate_column_roles_rejected():
    with pytest.raises(ConfigError):
        ColumnMap('A', 'A')


def test_cohort_shaped_file(covid_csv):
    data = load_csv(covid_csv, ColumnMap('cvd', 'death', ('age', 'sex', 'diabetes')))
    assert data.n == 927
    assert data.n_missing == 162
    assert data.missing_rate == pytest.approx(0.175, abs=5e-4)
    assert set(data.covariate_coding) == {'sex', 'diabetes'}


def test_csv_round_trip_is_value_identical(sim_data, tmp_path):
    colmap = ColumnMap('A', 'Y')
    path = write_csv(sim_data, tmp_path / 'sim.csv', colmap)
    again = load_csv(path, colmap)
    np.testing.assert_array_equal(again.X, sim_data.X)
    np.testing.assert_array_equal(again.Y, sim_data.Y)
    np.testing.assert_array_equal(again.A, sim_data.A)
    assert again.covariate_names == sim_data.covariate_names


def test_format_record_quotes_free_text():
    line = format_record('error', {'error_type': 'ParseError', 'exit_code': 2, 'message': 'bad cell "x"'})
    _, records = parse_report(f"schema_version=1\n{line}\n")
    assert records[0] == {'record': 'error', 'error_type': 'ParseError', 'exit_code': '2',
                          'message': 'bad cell "x"'}


def test_report_schema_is_stable_across_success_and_failure(sim_data):
    cfg = RunConfig(B=100, m=2, seed=1)
    ok = estimate_with_bootstrap(sim_data, SpecBundle.full(3), 'ipw-ipw', cfg)
    failed = {'success': False, 'error': 'Fitted probabilities pinned', 'error_type': 'SeparationError',
              'exit_code': 3, 'function': 'estimate_with_bootstrap'}
    report = AnalysisReport(dataset_summary(sim_data),
                            [method_fields('ipw-ipw', ok), method_fields('ipw-dr', failed)])

    version, records = parse_report(report.render())
    assert version == 1
    assert set(records[0]) == {'record', *DATASET_FIELDS}
    assert set(records[1]) == set(records[2]) == {'record', *METHOD_FIELDS}
    assert records[1]['status'] == 'ok'
    assert float(records[1]['ci_lower']) <= float(records[1]['ci_upper'])
    assert records[2]['status'] == 'failed' and records[2]['tau'] == 'nan'
    assert 0 <= float(records[0]['missing_rate']) <= 1


def test_metrics_table_has_a_schema_header():
    row = CellMetrics('All True', 'ipw-wee', 0.01, 0.5, 0.2, 0.21, 0.2, 95.0, 0)
    text = render_metrics(MetricsReport((row,), (), 2.2))
    lines = text.splitlines()
    assert lines[0] == '# schema_version=1'
    assert lines[1].startswith('scenario,method,bias,bias_rate')
    assert lines[2] == 'All True,ipw-wee,0.010000,0.500000,0.200000,0.210000,0.200000,95.000000,0'


def test_tr_without_imputation_spec_fails_validation():
    cfg = RunConfig(mode='simulate', methods=('tr-wee',), spec_mapping={'imputation': None})
    with pytest.raises(ConfigError):
        validate_run_config(cfg)


def test_estimate_mode_requires_a_dataset():
    with pytest.raises(ConfigError):
        validate_run_config(RunConfig(mode='estimate', exposure_col='A', outcome_col='Y'))


def test_simulate_mode_forbids_a_dataset(tmp_path):
    with pytest.raises(ConfigError):
        validate_run_config(RunConfig(mode='simulate', dataset_path=tmp_path / 'x.csv'))


def test_validation_reports_every_problem():
    with pytest.raises(ConfigError) as info:
        validate_run_config(RunConfig(mode='simulate', B=10, m=1))
    message = str(info.value)
    assert 'B must be' in message and 'm must be' in message


def test_spec_bundle_from_covariate_names():
    mapping = {'ps': {'covariates': ['age', 'sex']}, 'missingness': {'include_outcome': False}}
    specs = build_spec_bundle(mapping, ['age', 'sex', 'diabetes'])
    assert specs.ps.covariate_indices == (1, 2)
    assert specs.outcome.covariate_indices == (1, 2, 3)
    assert not specs.missingness.include_outcome
    assert specs.imputation.include_outcome


def test_spec_bundle_rejects_unknown_covariates():
    with pytest.raises(ConfigError):
        build_spec_bundle({'outcome': {'covariates': ['bmi']}}, ['age'])


def test_run_file_overrides(tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text("mode: simulate\nB: 200\nmethods: [ipw-wee, tr-wee]\nspecs:\n  imputation: null\n")
    cfg = RunConfig.from_yaml(path)
    assert cfg.B == 200
    assert cfg.methods == ('ipw-wee', 'tr-wee')
    assert cfg.spec_mapping == {'imputation': None}
    with pytest.raises(ConfigError):
        cfg.with_overrides(unknown=1)
