import numpy as np
import pytest
from click.testing import CliRunner

from dataio.report import parse_report
from main import cli


def _invoke(*args):
    return CliRunner().invoke(cli, ['--env', 'testing', *args])


def _estimate_args(csv, *extra):
    return ['run', '--mode', 'estimate', '--data', str(csv), '--exposure-col', 'cvd', '--outcome-col', 'death',
            '--covariates', 'age,sex,diabetes', '--B', '100', '--seed', '3', *extra]


def test_estimate_run_writes_a_report(covid_csv, tmp_path):
    out = tmp_path / 'report.txt'
    result = _invoke(*_estimate_args(covid_csv, '--method', 'ipw-ipw', '--method', 'tr-wee', '--out', str(out)))
    assert result.exit_code == 0, result.output

    version, records = parse_report(out.read_text())
    assert version == 1
    dataset, *methods = records
    assert dataset['record'] == 'dataset' and dataset['n'] == '927'
    assert [m['method'] for m in methods] == ['ipw-ipw', 'tr-wee']
    for m in methods:
        assert m['status'] == 'ok'
        assert np.isfinite(float(m['tau']))
        assert float(m['ci_lower']) <= float(m['ci_upper'])


def test_absent_column_exits_with_data_code(covid_csv):
    result = _invoke('run', '--mode', 'estimate', '--data', str(covid_csv), '--exposure-col', 'cvd',
                     '--outcome-col', 'survived', '--B', '100')
    assert result.exit_code == 2
    assert 'record=error error_type=SchemaError exit_code=2' in result.output


def test_missing_data_file_exits_with_data_code(tmp_path):
    result = _invoke('run', '--mode', 'estimate', '--data', str(tmp_path / 'none.csv'),
                     '--exposure-col', 'A', '--outcome-col', 'Y', '--B', '100')
    assert result.exit_code == 2


def test_tr_without_imputation_spec_exits_with_config_code(covid_csv, tmp_path):
    run_file = tmp_path / 'run.yml'
    run_file.write_text("specs:\n  imputation: null\n")
    result = _invoke(*_estimate_args(covid_csv, '--config', str(run_file), '--method', 'tr-wee'))
    assert result.exit_code == 1
    assert 'error_type=ConfigError' in result.output


def test_bad_flag_value_exits_with_usage_code():
    result = _invoke('run', '--mode', 'interactive')
    assert result.exit_code == 1


def test_numerical_failure_still_writes_the_report(tmp_path):
    path = tmp_path / 'all_exposed.csv'
    rows = [f"{'NA' if i % 5 == 0 else 1},{i % 2},{i / 10}" for i in range(60)]
    path.write_text("A,Y,x\n" + "\n".join(rows) + "\n")
    out = tmp_path / 'report.txt'

    result = _invoke('run', '--mode', 'estimate', '--data', str(path), '--exposure-col', 'A',
                     '--outcome-col', 'Y', '--method', 'ipw-ipw', '--B', '100', '--out', str(out))
    assert result.exit_code == 3
    _, records = parse_report(out.read_text())
    assert records[1]['status'] == 'failed'
    assert records[1]['error_type'] == 'EmptyClassError'


def test_simulate_mode_reports_the_truth(tmp_path):
    out, data_out = tmp_path / 'report.txt', tmp_path / 'sim.csv'
    result = _invoke('run', '--mode', 'simulate', '--sample-size', '300', '--method', 'ipw-wee', '--B', '100',
                     '--out', str(out), '--data-out', str(data_out))
    assert result.exit_code == 0, result.output
    _, records = parse_report(out.read_text())
    assert float(records[0]['true_tau']) == pytest.approx(2.201, abs=5e-4)
    assert data_out.exists()


def test_bench_smoke_is_byte_reproducible(tmp_path):
    outputs = []
    for name in ('a.csv', 'b.csv'):
        out = tmp_path / name
        result = _invoke('run', '--mode', 'bench', '--grid', 'ipw', '--scenario', 'All True',
                         '--method', 'ipw-ipw', '--N', '2', '--B', '100', '--sample-size', '200', '--seed', '9',
                         '--out', str(out), '--estimates-out', str(tmp_path / f"est_{name}"))
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())

    assert outputs[0] == outputs[1]
    lines = outputs[0].decode().splitlines()
    assert lines[0] == '# schema_version=1'
    assert len(lines) == 3
    assert lines[2].startswith('All True,ipw-ipw,')

    estimates = (tmp_path / 'est_a.csv').read_text().splitlines()
    # --N counts replications: header comment, column names, one row per replication
    assert len(estimates) == 2 + 2


def test_generate_data_command(tmp_path):
    out = tmp_path / 'cohort.csv'
    result = _invoke('generate-data', '--out', str(out), '--seed', '2')
    assert result.exit_code == 0
    header = out.read_text().splitlines()[0]
    assert header == 'cvd,death,age,sex,diabetes'


@pytest.mark.slow
def test_applied_smoke_all_weighting_methods(covid_csv, tmp_path):
    out = tmp_path / 'report.txt'
    result = _invoke(*_estimate_args(covid_csv, '--out', str(out)))
    assert result.exit_code == 0, result.output
    _, records = parse_report(out.read_text())
    assert len(records) == 6
    assert all(r['status'] == 'ok' for r in records[1:])


def test_run_help_describes_simulate_and_bench():
    result = CliRunner().invoke(cli, ['run', '--help'])
    assert result.exit_code == 0
    text = ' '.join(result.output.split())
    assert 'draw one dataset from the simulation model' in text
    assert 'bench: run a scenario grid' in text
    assert '--N, --reps' in text
