"""
Module: Scenario Grids
Purpose: Load (mis)specification grids from YAML into SpecBundles
Dependencies: PyYAML, estimators.base
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import yaml

from config import ALL_METHODS, Config
from estimators.base import SpecBundle
from utils.error_handler import ConfigError

logger = logging.getLogger(__name__)

FLAG_KEYS = ('missingness', 'imputation', 'ps', 'outcome')


@dataclass(frozen=True)
class Scenario:
    label: str
    specs: SpecBundle


@dataclass(frozen=True)
class ScenarioGrid:
    scenarios: tuple
    methods: tuple
    reps: int = Config.SIM_REPS
    bootstrap_B: int = Config.BOOTSTRAP_B
    name: str = ''

    def __post_init__(self):
        if not self.scenarios:
            raise ConfigError("Scenario grid is empty")
        labels = [s.label for s in self.scenarios]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"Scenario labels must be unique: {labels}")
        unknown = [m for m in self.methods if m not in ALL_METHODS]
        if unknown:
            raise ConfigError(f"Unknown methods in grid: {unknown}")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")

    def subset(self, labels=None, methods=None):
        """Grid restricted to some scenarios and/or methods"""
        scenarios = self.scenarios if labels is None else tuple(s for s in self.scenarios if s.label in labels)
        return ScenarioGrid(scenarios, tuple(methods or self.methods), self.reps, self.bootstrap_B, self.name)


def grid_path(name):
    """Built-in grid name ('ipw', 'tr') or a path to a YAML file"""
    path = Path(name)
    if path.suffix in ('.yml', '.yaml'):
        return path
    return Config.SCENARIO_DIR / f"{name}.yml"


def _scenario(row, p, drop, with_imputation):
    missing = [k for k in ('label', 'missingness', 'ps', 'outcome') if k not in row]
    if with_imputation and 'imputation' not in row:
        missing.append('imputation')
    if missing:
        raise ConfigError(f"Scenario row lacks {missing}: {row}")

    specs = SpecBundle.full(p, imputation=with_imputation, use_bayes_fallback=bool(row.get('bayes_fallback', False)))
    specs = specs.misspecify(
        missingness=not row['missingness'],
        imputation=with_imputation and not row['imputation'],
        ps=not row['ps'],
        outcome=not row['outcome'],
        drop=drop
    )
    return Scenario(str(row['label']), specs)


def load_scenario_grid(name, p=3, reps=Config.SIM_REPS, bootstrap_B=Config.BOOTSTRAP_B):
    """Read a grid file; correct models use every covariate"""
    path = grid_path(name)
    try:
        with open(path, 'r') as f:
            raw = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read scenario grid {path}: {e}")

    rows = raw.get('scenarios') or []
    drop = tuple(raw.get('misspecification', {}).get('drop_covariates', [p]))
    with_imputation = any('imputation' in row for row in rows)
    scenarios = tuple(_scenario(row, p, drop, with_imputation) for row in rows)

    grid = ScenarioGrid(scenarios, tuple(raw.get('methods') or ()), reps, bootstrap_B, raw.get('name', path.stem))
    logger.info(f"Loaded grid '{grid.name}': {len(scenarios)} scenarios x {len(grid.methods)} methods")
    return grid
