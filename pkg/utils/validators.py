"""
Module: Run Validation
Purpose: Check a RunConfig before any computation and build its SpecBundle
Dependencies: config, estimators.base, model.nuisance
"""

import logging
from pathlib import Path

from config import ALL_METHODS, MODES, WEIGHTING_METHODS
from estimators.base import SpecBundle, needs_imputation
from model.nuisance import ModelKind, ModelSpec
from simulation.scenarios import grid_path
from utils.error_handler import ConfigError

logger = logging.getLogger(__name__)

SPEC_KEYS = ('covariates', 'include_outcome', 'include_exposure')


def requested_methods(cfg):
    """Methods to run; defaults to every weighting method"""
    return tuple(cfg.methods) or WEIGHTING_METHODS


def _imputation_declared(mapping):
    return not mapping or 'imputation' not in mapping or mapping['imputation'] is not None


def validate_run_config(cfg):
    """Collect every problem and raise one ConfigError"""
    errors = []

    if cfg.mode not in MODES:
        errors.append(f"mode must be one of {MODES}, got '{cfg.mode}'")
    if cfg.mode == 'estimate':
        if cfg.dataset_path is None:
            errors.append("estimate mode requires a dataset path")
        if not cfg.exposure_col or not cfg.outcome_col:
            errors.append("estimate mode requires exposure and outcome column names")
    elif cfg.dataset_path is not None:
        errors.append(f"{cfg.mode} mode does not take a dataset path")

    names = [c for c in (cfg.exposure_col, cfg.outcome_col, *(cfg.covariates or ())) if c]
    if len(set(names)) != len(names):
        errors.append(f"column names must be distinct: {names}")

    methods = requested_methods(cfg)
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        errors.append(f"unknown methods {unknown}; choose from {', '.join(ALL_METHODS)}")
    if not _imputation_declared(cfg.spec_mapping):
        needing = [m for m in methods if m in ALL_METHODS and needs_imputation(m)]
        if needing:
            errors.append(f"methods {needing} need an imputation model spec")

    if cfg.B < 100:
        errors.append(f"B must be >= 100, got {cfg.B}")
    if cfg.m < 2:
        errors.append(f"m must be >= 2, got {cfg.m}")
    if cfg.reps < 1:
        errors.append(f"reps must be >= 1, got {cfg.reps}")
    if cfg.sample_size < 10:
        errors.append(f"sample size must be >= 10, got {cfg.sample_size}")
    if cfg.jobs < 1:
        errors.append(f"jobs must be >= 1, got {cfg.jobs}")
    if cfg.mode == 'bench' and not Path(grid_path(cfg.grid)).is_file():
        errors.append(f"scenario grid '{cfg.grid}' not found")

    if cfg.spec_mapping is not None and not isinstance(cfg.spec_mapping, dict):
        errors.append("specs must be a mapping of model name to spec")
    elif cfg.spec_mapping:
        extra = sorted(set(cfg.spec_mapping) - {k.value for k in ModelKind})
        if extra:
            errors.append(f"unknown models in specs: {extra}")

    if errors:
        raise ConfigError(f"Run validation failed: {'; '.join(errors)}")
    return True


def _model_spec(kind, entry, covariate_names):
    p = len(covariate_names)
    if entry is None or entry is True:
        return ModelSpec.full(kind, p)
    if not isinstance(entry, dict):
        raise ConfigError(f"Spec for {kind.value} must be a mapping, got {entry!r}")
    extra = sorted(set(entry) - set(SPEC_KEYS))
    if extra:
        raise ConfigError(f"Unknown keys in {kind.value} spec: {extra}")

    full = ModelSpec.full(kind, p)
    selected = entry.get('covariates')
    if selected is None:
        indices = full.covariate_indices
    else:
        missing = [c for c in selected if c not in covariate_names]
        if missing:
            raise ConfigError(f"{kind.value} spec names unknown covariates {missing}")
        indices = tuple(covariate_names.index(c) + 1 for c in selected)

    try:
        return ModelSpec(
            model=kind,
            covariate_indices=indices,
            include_outcome=bool(entry.get('include_outcome', full.include_outcome)),
            include_exposure=bool(entry.get('include_exposure', full.include_exposure))
        )
    except ValueError as e:
        raise ConfigError(str(e))


def build_spec_bundle(mapping, covariate_names, bayes_fallback=False):
    """SpecBundle from a name-based mapping; absent models use every covariate.

    imputation: null drops the imputation model altogether.
    """
    mapping = dict(mapping or {})
    covariate_names = list(covariate_names)

    imputation = None
    if _imputation_declared(mapping):
        imputation = _model_spec(ModelKind.IMPUTATION, mapping.get('imputation'), covariate_names)

    for key in ('missingness', 'ps', 'outcome'):
        if key in mapping and mapping[key] is None:
            raise ConfigError(f"The {key} model cannot be omitted")

    specs = SpecBundle(
        missingness=_model_spec(ModelKind.MISSINGNESS, mapping.get('missingness'), covariate_names),
        ps=_model_spec(ModelKind.PS, mapping.get('ps'), covariate_names),
        outcome=_model_spec(ModelKind.OUTCOME, mapping.get('outcome'), covariate_names),
        imputation=imputation,
        use_bayes_fallback=bayes_fallback
    )
    logger.debug(f"Spec bundle: {specs}")
    return specs
