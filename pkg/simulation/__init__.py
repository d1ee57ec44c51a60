"""
Simulation Study Package
"""
from .dgp import DgpConfig, generate_dataset
from .truth import true_tau, true_tau_monte_carlo
from .scenarios import Scenario, ScenarioGrid, load_scenario_grid
from .runner import CellMetrics, CellResult, MetricsReport, compute_metrics, run_scenario_grid

__all__ = [
    'DgpConfig', 'generate_dataset', 'true_tau', 'true_tau_monte_carlo',
    'Scenario', 'ScenarioGrid', 'load_scenario_grid',
    'CellMetrics', 'CellResult', 'MetricsReport', 'compute_metrics', 'run_scenario_grid'
]
