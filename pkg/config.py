"""
Module: Configuration Management
Purpose: Centralized settings for estimation, inference and simulation runs
Dependencies: os, pathlib, dataclasses, PyYAML, python-dotenv
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml
from dotenv import load_dotenv

from utils.error_handler import ConfigError

load_dotenv()

# Base directory
BASE_DIR = Path(__file__).parent.absolute()

MODES = ('simulate', 'estimate', 'bench')
WEIGHTING_METHODS = ('ipw-ipw', 'ipw-dr', 'ipw-wee', 'tr-aipw', 'tr-wee')
IMPUTATION_METHODS = ('dr-si', 'dr-mice')
ALL_METHODS = WEIGHTING_METHODS + IMPUTATION_METHODS


class Config:
    """Base configuration class"""

    # Newton solver
    SOLVER_MAX_ITERATIONS = int(os.environ.get('SOLVER_MAX_ITERATIONS') or 100)
    SOLVER_TOLERANCE = float(os.environ.get('SOLVER_TOLERANCE') or 1e-8)
    SOLVER_DAMPING = int(os.environ.get('SOLVER_DAMPING') or 30)

    # Numerical guards
    PROBABILITY_CLAMP = 1e-6
    SEPARATION_EPS = 1e-10
    RCOND_THRESHOLD = 1e-12
    EXTREME_WEIGHT = float(os.environ.get('EXTREME_WEIGHT') or 100)

    # Estimators
    MICE_IMPUTATIONS = int(os.environ.get('MICE_IMPUTATIONS') or 10)
    BAYES_MAX_ROUNDS = int(os.environ.get('BAYES_MAX_ROUNDS') or 25)
    BAYES_TOLERANCE = float(os.environ.get('BAYES_TOLERANCE') or 1e-6)

    # Inference
    BOOTSTRAP_B = int(os.environ.get('BOOTSTRAP_B') or 500)
    MIN_USABLE_BOOTSTRAP_FRACTION = 0.5
    CI_LEVEL = 0.95

    # Simulation study
    SIM_REPS = int(os.environ.get('SIM_REPS') or 200)
    SIM_SAMPLE_SIZE = int(os.environ.get('SIM_SAMPLE_SIZE') or 1000)
    MAX_FAILED_REP_FRACTION = 0.2
    QUADRATURE_ORDER = int(os.environ.get('QUADRATURE_ORDER') or 60)
    SCENARIO_DIR = BASE_DIR / 'scenarios'
    SEED = int(os.environ.get('SEED') or 20240101)

    # Input files
    MISSING_MARKERS = ('NA', '')

    # Logging Configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
    LOG_DIR = os.environ.get('LOG_DIR') or None

    # Processing Configuration
    MAX_CONCURRENT_PROCESSES = int(os.environ.get('MAX_CONCURRENT_PROCESSES') or 1)


class DevelopmentConfig(Config):
    """Desk-scale configuration"""
    BOOTSTRAP_B = 500
    SIM_REPS = 200


class ProductionConfig(Config):
    """Full study scale"""
    LOG_LEVEL = 'WARNING'
    BOOTSTRAP_B = 2000
    SIM_REPS = 500
    MAX_CONCURRENT_PROCESSES = int(os.environ.get('MAX_CONCURRENT_PROCESSES') or 4)


class TestingConfig(Config):
    """Testing configuration"""
    LOG_LEVEL = 'DEBUG'
    BOOTSTRAP_B = 100
    SIM_REPS = 2
    SIM_SAMPLE_SIZE = 300
    MICE_IMPUTATIONS = 3


# Configuration selector
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name=None):
    """Get configuration class by name"""
    if config_name is None:
        config_name = os.environ.get('TRWEE_ENV', 'default')

    return config.get(config_name, config['default'])


def validate_config(config_class):
    """Validate configuration settings"""
    errors = []

    if config_class.SOLVER_TOLERANCE <= 0:
        errors.append(f"SOLVER_TOLERANCE must be positive: {config_class.SOLVER_TOLERANCE}")
    if config_class.SOLVER_MAX_ITERATIONS < 1:
        errors.append(f"SOLVER_MAX_ITERATIONS must be >= 1: {config_class.SOLVER_MAX_ITERATIONS}")
    if config_class.SOLVER_DAMPING < 0:
        errors.append(f"SOLVER_DAMPING must be >= 0: {config_class.SOLVER_DAMPING}")
    if config_class.BOOTSTRAP_B < 100:
        errors.append(f"BOOTSTRAP_B must be >= 100: {config_class.BOOTSTRAP_B}")
    if config_class.QUADRATURE_ORDER < 20:
        errors.append(f"QUADRATURE_ORDER must be >= 20: {config_class.QUADRATURE_ORDER}")
    if config_class.MICE_IMPUTATIONS < 2:
        errors.append(f"MICE_IMPUTATIONS must be >= 2: {config_class.MICE_IMPUTATIONS}")
    if not 0 < config_class.PROBABILITY_CLAMP < 0.5:
        errors.append(f"PROBABILITY_CLAMP out of range: {config_class.PROBABILITY_CLAMP}")
    if config_class.MAX_CONCURRENT_PROCESSES < 1:
        errors.append(f"MAX_CONCURRENT_PROCESSES must be >= 1: {config_class.MAX_CONCURRENT_PROCESSES}")

    if errors:
        raise ConfigError(f"Configuration validation failed: {'; '.join(errors)}")

    return True


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, assembled from a YAML run file and flags"""

    mode: str = 'estimate'
    dataset_path: Path = None
    exposure_col: str = None
    outcome_col: str = None
    covariates: tuple = None
    missing_markers: tuple = Config.MISSING_MARKERS
    spec_mapping: dict = None
    bayes_fallback: bool = False
    methods: tuple = ()
    B: int = Config.BOOTSTRAP_B
    reps: int = Config.SIM_REPS
    sample_size: int = Config.SIM_SAMPLE_SIZE
    m: int = Config.MICE_IMPUTATIONS
    seed: int = Config.SEED
    grid: str = 'ipw'
    scenarios: tuple = ()
    jobs: int = Config.MAX_CONCURRENT_PROCESSES
    textbook_delta: bool = False
    output_path: Path = None
    estimates_path: Path = None
    data_out: Path = None

    @classmethod
    def from_config_class(cls, config_class):
        """Defaults taken from a settings class"""
        return cls(
            missing_markers=tuple(config_class.MISSING_MARKERS),
            B=config_class.BOOTSTRAP_B,
            reps=config_class.SIM_REPS,
            sample_size=config_class.SIM_SAMPLE_SIZE,
            m=config_class.MICE_IMPUTATIONS,
            seed=config_class.SEED,
            jobs=config_class.MAX_CONCURRENT_PROCESSES
        )

    @classmethod
    def from_yaml(cls, path, base=None):
        """Load a run file; keys mirror the dataclass fields"""
        try:
            with open(path, 'r') as f:
                raw = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"Cannot read run file {path}: {e}")
        if not isinstance(raw, dict):
            raise ConfigError(f"Run file {path} must hold a mapping")

        # 'specs' is the documented alias for spec_mapping
        if 'specs' in raw:
            raw['spec_mapping'] = raw.pop('specs')
        return (base or cls()).with_overrides(**raw)

    def with_overrides(self, **overrides):
        """Copy with the given non-None fields replaced"""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"Unknown run settings: {', '.join(unknown)}")

        updates = {}
        for name, value in overrides.items():
            if value is None:
                continue
            if name in ('covariates', 'missing_markers', 'methods', 'scenarios') and isinstance(value, (list, tuple)):
                value = tuple(str(v) for v in value)
            elif name in ('dataset_path', 'output_path', 'estimates_path', 'data_out'):
                value = Path(value)
            updates[name] = value
        return replace(self, **updates)
