"""
Module: Simulation Runner
Purpose: Replicate generate -> estimate -> bootstrap over a scenario grid and summarise
Dependencies: numpy, pandas, concurrent.futures, estimators, inference
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd

from config import Config
from estimators import estimate
from inference.bootstrap import bootstrap
from simulation.dgp import generate_dataset
from simulation.truth import true_tau
from utils.core import STREAM_BOOTSTRAP, STREAM_DATA, STREAM_IMPUTATION, derive_rng, derive_seed
from utils.error_handler import EstimationError, ExcessiveFailureError, log_performance

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ('scenario', 'method', 'bias', 'bias_rate', 'ese', 'median_bse', 'rmse',
                  'ci_coverage', 'n_failed_reps')


@dataclass(frozen=True)
class CellMetrics:
    scenario: str
    method: str
    bias: float
    bias_rate: float
    ese: float
    median_bse: float
    rmse: float
    ci_coverage: float
    n_failed_reps: int


@dataclass(frozen=True, eq=False)
class CellResult:
    """Per-replication vectors for one scenario x method (NaN marks a failed replication)"""
    scenario: str
    method: str
    estimates: np.ndarray
    bses: np.ndarray
    covered: np.ndarray

    @property
    def n_failed(self):
        return int(np.isnan(self.estimates).sum())


def compute_metrics(cell, truth):
    """Bias, bias rate (%), ESE, median BSE, RMSE and CI coverage (%) over successful replications"""
    ok = ~np.isnan(cell.estimates)
    estimates, bses, covered = cell.estimates[ok], cell.bses[ok], cell.covered[ok]
    n = estimates.size
    if n == 0:
        nan = float('nan')
        return CellMetrics(cell.scenario, cell.method, nan, nan, nan, nan, nan, nan, cell.n_failed)

    bias = float(np.mean(estimates) - truth)
    errors = estimates - truth
    return CellMetrics(
        scenario=cell.scenario,
        method=cell.method,
        bias=bias,
        bias_rate=100.0 * bias / truth,
        ese=float(np.std(estimates, ddof=1)) if n > 1 else float('nan'),
        median_bse=float(np.median(bses)),
        rmse=float(np.sqrt(errors @ errors / (n - 1))) if n > 1 else float('nan'),
        ci_coverage=100.0 * float(np.mean(covered)),
        n_failed_reps=cell.n_failed
    )


@dataclass(frozen=True, eq=False)
class MetricsReport:
    rows: tuple
    cells: tuple
    truth: float
    grid_name: str = ''

    def to_frame(self):
        return pd.DataFrame([asdict(row) for row in self.rows], columns=list(METRIC_COLUMNS))

    def estimates_frame(self):
        """Long table of per-replication estimates"""
        frames = [
            pd.DataFrame({
                'scenario': cell.scenario,
                'method': cell.method,
                'replication': np.arange(cell.estimates.size),
                'estimate': cell.estimates,
                'bse': cell.bses,
                'covered': cell.covered
            })
            for cell in self.cells
        ]
        return pd.concat(frames, ignore_index=True)


def _replication(cfg, index, rep, scenario, grid, truth, estimate_fn, m, opts):
    data = generate_dataset(cfg, rng=derive_rng(cfg.seed, STREAM_DATA, index, rep))
    outcome = {}
    for method in grid.methods:
        try:
            point = estimate_fn(data, scenario.specs, method,
                                seed=derive_seed(cfg.seed, STREAM_IMPUTATION, index, rep), m=m, opts=opts)
            boot = bootstrap(data, scenario.specs, method, grid.bootstrap_B,
                             seed=derive_seed(cfg.seed, STREAM_BOOTSTRAP, index, rep),
                             estimate_fn=estimate_fn, m=m, opts=opts)
            outcome[method] = (point.tau, boot.bse, boot.covers(truth))
        except (EstimationError, np.linalg.LinAlgError) as e:
            logger.warning(f"[{scenario.label}] {method} replication {rep} failed: {e}")
            outcome[method] = (np.nan, np.nan, False)
    return outcome


@log_performance
def run_scenario_grid(cfg, grid, estimate_fn=None, jobs=1, truth=None, m=Config.MICE_IMPUTATIONS,
                      opts=None, config_class=Config):
    """Metrics for every scenario x method; raises if a cell loses too many replications"""
    estimate_fn = estimate_fn or estimate
    truth = true_tau(cfg.coef_outcome, config_class.QUADRATURE_ORDER) if truth is None else truth
    logger.info(f"Running grid '{grid.name}' ({len(grid.scenarios)} scenarios, {grid.reps} reps, true tau {truth:.4f})")

    rows, cells = [], []
    for index, scenario in enumerate(grid.scenarios):
        def run(rep):
            return _replication(cfg, index, rep, scenario, grid, truth, estimate_fn, m, opts)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(run, range(grid.reps)))
        else:
            outcomes = [run(rep) for rep in range(grid.reps)]

        for method in grid.methods:
            values = np.array([o[method] for o in outcomes], dtype=object)
            cell = CellResult(
                scenario=scenario.label,
                method=method,
                estimates=values[:, 0].astype(float),
                bses=values[:, 1].astype(float),
                covered=values[:, 2].astype(bool)
            )
            if cell.n_failed > config_class.MAX_FAILED_REP_FRACTION * grid.reps:
                raise ExcessiveFailureError(
                    f"[{scenario.label}] {method}: {cell.n_failed} of {grid.reps} replications failed"
                )
            metrics = compute_metrics(cell, truth)
            logger.info(f"[{scenario.label}] {method}: bias {metrics.bias:.3f}, coverage {metrics.ci_coverage:.1f}")
            rows.append(metrics)
            cells.append(cell)

    return MetricsReport(tuple(rows), tuple(cells), truth, grid.name)
