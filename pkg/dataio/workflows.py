"""
Module: Run Workflows
Purpose: Estimate/simulate analysis runs and the benchmark driver behind the CLI
Dependencies: estimators, inference, simulation, dataio
"""

import logging

from config import Config
from dataio.loader import ColumnMap, load_csv, write_csv
from dataio.report import AnalysisReport, dataset_summary, method_fields, write_estimates, write_metrics, write_report
from estimators import estimate
from inference import delta_from_bootstrap
from inference.bootstrap import bootstrap
from simulation import DgpConfig, generate_dataset, load_scenario_grid, run_scenario_grid, true_tau
from utils.error_handler import (
    EXIT_OK, ErrorCollector, handle_exceptions, log_performance
)
from utils.validators import build_spec_bundle, requested_methods, validate_run_config

logger = logging.getLogger(__name__)


def column_map(cfg):
    return ColumnMap(
        exposure=cfg.exposure_col,
        outcome=cfg.outcome_col,
        covariates=cfg.covariates,
        missing_markers=cfg.missing_markers
    )


@handle_exceptions(logger)
def estimate_with_bootstrap(data, specs, method, cfg):
    """Point estimate, percentile bootstrap and delta-method interval for one method"""
    point = estimate(data, specs, method, seed=cfg.seed, m=cfg.m)
    boot = bootstrap(data, specs, method, cfg.B, seed=cfg.seed, m=cfg.m, jobs=cfg.jobs)
    delta = delta_from_bootstrap(boot, point, textbook=cfg.textbook_delta)
    logger.info(f"{method}: tau {point.tau:.4f} CI ({boot.ci_lower:.4f}, {boot.ci_upper:.4f})")
    return point, boot, delta


def _analysis_data(cfg, config_class):
    """Dataset and, in simulate mode, the true tau of its generating model"""
    if cfg.mode == 'estimate':
        return load_csv(cfg.dataset_path, column_map(cfg)), None

    dgp = DgpConfig(n=cfg.sample_size, seed=cfg.seed)
    data = generate_dataset(dgp)
    if cfg.data_out:
        write_csv(data, cfg.data_out, column_map(cfg) if cfg.exposure_col and cfg.outcome_col else None)
    return data, true_tau(dgp.coef_outcome, config_class.QUADRATURE_ORDER)


@log_performance
def run_estimate(cfg, config_class=Config):
    """AnalysisReport for every requested method and the exit code it implies.

    A failing method gets a failure record; the others still run.
    """
    validate_run_config(cfg)
    data, truth = _analysis_data(cfg, config_class)
    specs = build_spec_bundle(cfg.spec_mapping, data.covariate_names, cfg.bayes_fallback)
    specs.check(data.p)

    collector = ErrorCollector()
    report = AnalysisReport(dataset_summary(data, truth))
    exit_code = EXIT_OK

    for method in requested_methods(cfg):
        outcome = estimate_with_bootstrap(data, specs, method, cfg)
        report.methods.append(method_fields(method, outcome))
        if outcome['success']:
            point, boot, _ = outcome['result']
            collector.extend(point.diagnostics, method)
            if boot.n_failed:
                collector.add_warning(f"{boot.n_failed} of {boot.B} bootstrap replicates dropped", method)
        else:
            collector.add_error(f"{outcome['error_type']}: {outcome['error']}", method)
            exit_code = max(exit_code, outcome['exit_code'])

    n_errors, report.warnings = collector.counts()
    logger.info(f"Estimate run finished: {len(report.methods)} methods, {n_errors} failed, {report.warnings} warnings")
    if n_errors:
        logger.error(f"Failed methods: {', '.join(collector.failed_methods())}")

    write_report(report, cfg.output_path)
    return report, exit_code


@log_performance
def run_bench(cfg, config_class=Config):
    """Run a scenario grid and write its metrics table"""
    validate_run_config(cfg)
    grid = load_scenario_grid(cfg.grid, p=3, reps=cfg.reps, bootstrap_B=cfg.B)
    if cfg.methods or cfg.scenarios:
        grid = grid.subset(labels=cfg.scenarios or None, methods=cfg.methods or None)

    metrics = run_scenario_grid(
        DgpConfig(n=cfg.sample_size, seed=cfg.seed), grid,
        jobs=cfg.jobs, m=cfg.m, config_class=config_class
    )
    write_metrics(metrics, cfg.output_path)
    if cfg.estimates_path:
        write_estimates(metrics, cfg.estimates_path)
    return metrics, EXIT_OK
