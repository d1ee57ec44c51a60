"""
Module: Command-Line Entry Point
Purpose: Estimate, simulate and bench runs; synthetic dataset generation
Dependencies: click, config, dataio, utils
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import click

from config import ALL_METHODS, MODES, RunConfig, get_config, validate_config
from dataio.report import format_record
from dataio.workflows import run_bench, run_estimate
from utils.core import setup_logger
from utils.data_generator import CovidShapedGenerator
from utils.error_handler import EXIT_OK, EXIT_USAGE, TrweeError, exit_code_for

logger = None


class TrweeGroup(click.Group):
    """Group whose commands return an exit code; usage errors exit with 1"""

    def main(self, *args, **kwargs):
        kwargs['standalone_mode'] = False
        try:
            code = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            emit_error('UsageError', EXIT_USAGE, e.format_message())
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            sys.exit(EXIT_USAGE)
        sys.exit(code if isinstance(code, int) else EXIT_OK)


def emit_error(error_type, exit_code, message):
    """One machine-parsable error record on stderr"""
    click.echo(format_record('error', {
        'error_type': error_type,
        'exit_code': exit_code,
        'message': message
    }), err=True)


def create_run(config_name=None):
    """Settings class for this invocation, validated, with logging configured"""
    global logger

    config_class = get_config(config_name)
    validate_config(config_class)
    logger = setup_logger(config_class.LOG_LEVEL, config_class.LOG_DIR)
    return config_class


def _split(text):
    return tuple(c.strip() for c in text.split(',') if c.strip()) if text else None


@click.group(cls=TrweeGroup)
@click.option('--env', 'config_name', default=None, help='Settings profile (development, production, testing)')
@click.pass_context
def cli(ctx, config_name):
    """Causal odds ratio estimation with a missing-at-random exposure"""
    ctx.ensure_object(dict)
    ctx.obj['config_name'] = config_name


@cli.command()
@click.option('--mode', type=click.Choice(MODES), default=None,
              help='estimate: analyse --data. simulate: draw one dataset from the simulation model and '
                   'analyse it. bench: run a scenario grid and write its metrics table')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None, help='YAML run file')
@click.option('--data', 'dataset_path', default=None, help='Input CSV (estimate mode)')
@click.option('--exposure-col', default=None)
@click.option('--outcome-col', default=None)
@click.option('--covariates', default=None, help='Comma-separated covariate columns')
@click.option('--method', 'methods', multiple=True, type=click.Choice(ALL_METHODS))
@click.option('--B', 'B', type=int, default=None, help='Bootstrap resamples')
@click.option('--N', '--reps', 'reps', type=int, default=None, help='Replications per scenario (bench)')
@click.option('--sample-size', 'sample_size', type=int, default=None, help='Rows per simulated dataset')
@click.option('--m', 'm', type=int, default=None, help='MICE imputations')
@click.option('--seed', type=int, default=None)
@click.option('--bayes-fallback/--no-bayes-fallback', default=None)
@click.option('--grid', default=None, help="Scenario grid: 'ipw', 'tr' or a YAML path")
@click.option('--scenario', 'scenarios', multiple=True, help='Restrict the grid to these labels')
@click.option('--jobs', type=int, default=None)
@click.option('--out', 'output_path', default=None, help='Report or metrics file (stdout if omitted)')
@click.option('--estimates-out', 'estimates_path', default=None, help='Per-replication estimates CSV (bench)')
@click.option('--data-out', default=None, help='Write the simulated dataset (simulate mode)')
@click.option('--textbook-delta/--no-textbook-delta', default=None)
@click.pass_context
def run(ctx, config_path, **flags):
    """Run an analysis or benchmark.

    Simulate mode analyses a single simulated dataset and reports the true odds ratio next to
    the estimates; use bench mode to replicate over a scenario grid.
    """
    try:
        config_class = create_run(ctx.obj.get('config_name'))
        cfg = RunConfig.from_config_class(config_class)
        if config_path:
            cfg = RunConfig.from_yaml(config_path, base=cfg)

        flags['covariates'] = _split(flags['covariates'])
        flags['methods'] = flags['methods'] or None
        flags['scenarios'] = flags['scenarios'] or None
        cfg = cfg.with_overrides(**flags)
        logger.info(f"Run mode '{cfg.mode}' (seed {cfg.seed})")

        if cfg.mode == 'bench':
            _, code = run_bench(cfg, config_class)
        else:
            report, code = run_estimate(cfg, config_class)
            for failed in report.failed:
                emit_error(failed['error_type'], code, f"{failed['method']}: {failed['message']}")
        return code

    except (TrweeError, ValueError) as e:
        code = exit_code_for(e)
        if logger:
            logger.error(f"Run failed: {e}")
        emit_error(type(e).__name__, code, str(e))
        return code


@cli.command('generate-data')
@click.option('--out', 'path', default=None, help='CSV path (defaults under data/)')
@click.option('--seed', type=int, default=0)
@click.option('--n', type=int, default=927)
@click.option('--n-missing', type=int, default=162)
@click.pass_context
def generate_data(ctx, path, seed, n, n_missing):
    """Write the synthetic applied-analysis CSV"""
    try:
        create_run(ctx.obj.get('config_name'))
        path = CovidShapedGenerator(n=n, n_missing=n_missing, seed=seed).generate_now(path)
    except (TrweeError, ValueError) as e:
        code = exit_code_for(e)
        emit_error(type(e).__name__, code, str(e))
        return code
    click.echo(str(path))
    return EXIT_OK


if __name__ == '__main__':
    cli()
