"""
Module: Nuisance Models
Purpose: Dataset container, model specifications, missingness/imputation/PS/outcome fits
Dependencies: numpy, scipy, model.glm
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.special import expit

from config import Config
from model.glm import (
    CoefVector, SolveOptions, fit_weighted_logistic, logistic_information,
    logistic_jacobian, logistic_score, solve_estimating_equation
)
from utils.error_handler import EmptyClassError, ExtremeWeightWarning

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows (X, A, Y, R); A is NaN where missing, X carries the intercept column"""
    X: np.ndarray
    A: np.ndarray
    Y: np.ndarray
    covariate_names: tuple = ()
    covariate_coding: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        A = np.asarray(self.A, dtype=float)
        Y = np.asarray(self.Y, dtype=float)

        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"Design matrix must be a non-empty 2-D array, got shape {X.shape}")
        n = X.shape[0]
        if A.shape != (n,) or Y.shape != (n,):
            raise ValueError(f"Length mismatch: X has {n} rows, A {A.shape}, Y {Y.shape}")
        if not np.all(X[:, 0] == 1.0):
            raise ValueError("First design column must be the intercept")
        if not np.all(np.isfinite(X)):
            raise ValueError("Covariates must be fully observed and finite")
        if not np.all((Y == 0) | (Y == 1)):
            raise ValueError("Outcome must be binary 0/1")
        observed = ~np.isnan(A)
        if not np.all((A[observed] == 0) | (A[observed] == 1)):
            raise ValueError("Exposure must be binary 0/1 where observed")

        names = tuple(self.covariate_names) or tuple(f"X{j}" for j in range(1, X.shape[1]))
        if len(names) != X.shape[1] - 1:
            raise ValueError(f"Expected {X.shape[1] - 1} covariate names, got {len(names)}")

        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'Y', Y)
        object.__setattr__(self, 'covariate_names', names)

    @classmethod
    def from_arrays(cls, covariates, A, Y, names=(), coding=None):
        """Build from raw covariates; the intercept is prepended"""
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates[:, None]
        X = np.column_stack([np.ones(covariates.shape[0]), covariates])
        return cls(X, A, Y, tuple(names), dict(coding or {}))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1] - 1

    @property
    def R(self):
        return np.isnan(self.A).astype(float)

    @property
    def complete(self):
        return ~np.isnan(self.A)

    @property
    def a_filled(self):
        """Exposure with missing entries set to 0; such rows always carry zero weight"""
        return np.where(np.isnan(self.A), 0.0, self.A)

    @property
    def n_missing(self):
        return int(np.isnan(self.A).sum())

    @property
    def missing_rate(self):
        return self.n_missing / self.n

    def take(self, index):
        """Rows selected (or resampled) by an integer index"""
        index = np.asarray(index)
        return replace(self, X=self.X[index], A=self.A[index], Y=self.Y[index])

    def with_exposure(self, A):
        """Same rows with a replacement exposure vector"""
        return replace(self, A=np.asarray(A, dtype=float))


class ModelKind(str, Enum):
    MISSINGNESS = 'missingness'
    IMPUTATION = 'imputation'
    PS = 'ps'
    OUTCOME = 'outcome'


@dataclass(frozen=True)
class ModelSpec:
    """Which columns enter one of the four nuisance models"""
    model: ModelKind
    covariate_indices: tuple
    include_outcome: bool = False
    include_exposure: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'model', ModelKind(self.model))
        indices = tuple(int(j) for j in self.covariate_indices)
        if any(j < 1 for j in indices) or len(set(indices)) != len(indices):
            raise ValueError(f"Covariate indices must be distinct and >= 1: {indices}")
        object.__setattr__(self, 'covariate_indices', tuple(sorted(indices)))

        if self.include_outcome and self.model not in (ModelKind.MISSINGNESS, ModelKind.IMPUTATION):
            raise ValueError(f"include_outcome is not allowed for the {self.model.value} model")
        if self.include_exposure and self.model is not ModelKind.OUTCOME:
            raise ValueError(f"include_exposure is not allowed for the {self.model.value} model")

    @classmethod
    def full(cls, model, p):
        """All covariates, plus Y or A where the model admits it"""
        model = ModelKind(model)
        return cls(
            model=model,
            covariate_indices=tuple(range(1, p + 1)),
            include_outcome=model in (ModelKind.MISSINGNESS, ModelKind.IMPUTATION),
            include_exposure=model is ModelKind.OUTCOME
        )

    def without(self, *indices):
        """Drop covariates (deliberate misspecification)"""
        keep = tuple(j for j in self.covariate_indices if j not in set(indices))
        return replace(self, covariate_indices=keep)

    def without_outcome(self):
        return replace(self, include_outcome=False)

    def check(self, p):
        if any(j > p for j in self.covariate_indices):
            raise ValueError(
                f"{self.model.value} spec uses covariate {max(self.covariate_indices)} but data has {p}"
            )

    def design(self, data, exposure=None):
        """Design matrix; exposure overrides A with a constant or a vector"""
        self.check(data.p)
        columns = [data.X[:, [0, *self.covariate_indices]]]
        if self.include_outcome:
            columns.append(data.Y[:, None])
        if self.include_exposure:
            a = data.a_filled if exposure is None else np.broadcast_to(
                np.asarray(exposure, dtype=float), (data.n,))
            columns.append(a[:, None])
        return np.hstack(columns)

    def covariate_design(self, data):
        """Intercept and selected covariates only"""
        self.check(data.p)
        return data.X[:, [0, *self.covariate_indices]]

    def column_names(self, data):
        names = ['intercept'] + [data.covariate_names[j - 1] for j in self.covariate_indices]
        if self.include_outcome:
            names.append('Y')
        if self.include_exposure:
            names.append('A')
        return tuple(names)


def clamp_probabilities(p, eps=Config.PROBABILITY_CLAMP):
    """Clip to [eps, 1-eps]; the flag says whether anything moved"""
    p = np.asarray(p, dtype=float)
    clipped = np.clip(p, eps, 1.0 - eps)
    return clipped, bool(np.any(clipped != p))


@dataclass(frozen=True, eq=False)
class NuisanceFit:
    """Fitted coefficients and per-row probabilities for one model"""
    spec: ModelSpec
    coef: CoefVector
    fitted: np.ndarray
    clamped: bool = False
    diagnostics: dict = field(default_factory=dict)
    information: np.ndarray = None

    @classmethod
    def from_coef(cls, spec, coef, data, diagnostics=None, information=None):
        fitted, clamped = clamp_probabilities(expit(spec.design(data) @ coef.values))
        if clamped:
            logger.warning(f"Fitted {spec.model.value} probabilities clamped")
        diagnostics = dict(diagnostics or {})
        diagnostics.setdefault('iterations', coef.iterations)
        diagnostics['clamped'] = clamped
        return cls(spec, coef, fitted, clamped, diagnostics, information)

    @classmethod
    def degenerate(cls, spec, data, value=0.0):
        """Known constant probability, exempt from clamping"""
        k = len(spec.column_names(data))
        coef = CoefVector(np.zeros(k), label=spec.model.value)
        return cls(spec, coef, np.full(data.n, float(value)), False, {'degenerate': True, 'value': float(value)})

    @property
    def is_degenerate(self):
        return bool(self.diagnostics.get('degenerate'))

    def predict(self, data, exposure=None):
        """Clamped probabilities for new rows or a counterfactual exposure"""
        if self.is_degenerate:
            return np.full(data.n, self.diagnostics['value'])
        p, _ = clamp_probabilities(expit(self.spec.design(data, exposure) @ self.coef.values))
        return p

    def at_exposure(self, data, a):
        """Outcome fit re-evaluated with A set to a on every row"""
        fitted, clamped = clamp_probabilities(expit(self.spec.design(data, a) @ self.coef.values))
        return replace(self, fitted=fitted, clamped=clamped or self.clamped)


def _opts(opts):
    return opts or SolveOptions.from_config()


def _expect(spec, kind):
    if spec.model is not kind:
        raise ValueError(f"Expected a {kind.value} spec, got {spec.model.value}")


def missingness_weights(data, miss):
    """(1 - R) / (1 - P_R), with the count of weights above the reporting threshold"""
    w = data.complete / (1.0 - miss.fitted)
    extreme = int(np.sum(w > Config.EXTREME_WEIGHT))
    if extreme:
        message = f"{extreme} missingness weights exceed {Config.EXTREME_WEIGHT:g}"
        logger.warning(message)
        warnings.warn(message, ExtremeWeightWarning, stacklevel=2)
    return w, extreme


def imputation_probabilities(imp):
    """P(A=1 | X, Y) from an imputation fit or a plain probability vector"""
    return imp.fitted if isinstance(imp, NuisanceFit) else np.asarray(imp, dtype=float)


def fit_missingness(data, spec, opts=None):
    """Logistic fit of R on the selected columns"""
    _expect(spec, ModelKind.MISSINGNESS)
    R = data.R
    if R.min() == R.max():
        raise EmptyClassError(f"Missing indicator is constant ({int(R[0])}); missingness model undefined")
    design = spec.design(data)
    coef = fit_weighted_logistic(design, R, opts=_opts(opts), label='missingness',
                                 names=spec.column_names(data))
    fit = NuisanceFit.from_coef(spec, coef, data, information=logistic_information(coef.values, design))
    logger.info(f"Missingness model fitted: {coef.as_dict()}")
    return fit


def fit_imputation(data, spec, opts=None):
    """Complete-case, unweighted logistic fit of A; probabilities for every row"""
    _expect(spec, ModelKind.IMPUTATION)
    observed = data.A[data.complete]
    if observed.size == 0 or observed.min() == observed.max():
        raise EmptyClassError("Observed exposure is constant; imputation model undefined")
    design = spec.design(data)
    w = data.complete.astype(float)
    coef = fit_weighted_logistic(design, data.a_filled, w, opts=_opts(opts), label='imputation',
                                 names=spec.column_names(data))
    information = logistic_information(coef.values, design, w)
    fit = NuisanceFit.from_coef(spec, coef, data, information=information)
    logger.info(f"Imputation model fitted: {coef.as_dict()}")
    return fit


def _fit_wla(data, miss, spec, response, kind, opts):
    _expect(spec, kind)
    _expect(miss.spec, ModelKind.MISSINGNESS)
    w, extreme = missingness_weights(data, miss)
    design = spec.design(data)
    coef = fit_weighted_logistic(design, response, w, opts=_opts(opts), label=f"{kind.value}-wla",
                                 names=spec.column_names(data))
    return NuisanceFit.from_coef(spec, coef, data, diagnostics={'extreme_weights': extreme})


def fit_ps_wla(data, miss, spec, opts=None):
    """Propensity score by the weighted likelihood approach"""
    return _fit_wla(data, miss, spec, data.a_filled, ModelKind.PS, opts)


def fit_outcome_wla(data, miss, spec, opts=None):
    """Outcome model by the weighted likelihood approach"""
    return _fit_wla(data, miss, spec, data.Y, ModelKind.OUTCOME, opts)


def ps_ee_score(alpha, data, miss, imp, spec):
    """Augmented PS estimating equation, averaged over rows"""
    X = spec.design(data)
    w = data.complete / (1.0 - miss.fitted)
    d = w - 1.0
    pi = imputation_probabilities(imp)
    # w U - (w - 1) m_A collapses to X'[(w A - d pi) - expit(X alpha)]
    pseudo = w * data.a_filled - d * pi
    return X.T @ (pseudo - expit(X @ alpha)) / data.n


def fit_ps_ee(data, miss, imp, spec, opts=None):
    """Propensity score from the imputation-augmented estimating equation"""
    _expect(spec, ModelKind.PS)
    X = spec.design(data)
    w, extreme = missingness_weights(data, miss)
    ones = np.ones(data.n)

    def score(alpha):
        return ps_ee_score(alpha, data, miss, imp, spec)

    def jacobian(alpha):
        return logistic_jacobian(alpha, X, ones) / data.n

    coef = solve_estimating_equation(score, jacobian, np.zeros(X.shape[1]), _opts(opts), label='ps-ee')
    coef = replace(coef, names=spec.column_names(data))
    return NuisanceFit.from_coef(spec, coef, data, diagnostics={'extreme_weights': extreme})


def _outcome_ee_rows(data, miss, imp, spec):
    """Stacked (design, response, signed weight) rows of the augmented outcome equation"""
    w = data.complete / (1.0 - miss.fitted)
    d = w - 1.0
    pi = imputation_probabilities(imp)
    Z = np.vstack([spec.design(data), spec.design(data, 1.0), spec.design(data, 0.0)])
    y = np.concatenate([data.Y, data.Y, data.Y])
    weights = np.concatenate([w, -d * pi, -d * (1.0 - pi)])
    keep = weights != 0
    return Z[keep], y[keep], weights[keep]


def outcome_score_expectation(beta, data, spec, pi):
    """Per-row E[V | X, Y] by two-point enumeration over A"""
    Z1, Z0 = spec.design(data, 1.0), spec.design(data, 0.0)
    r1 = (data.Y - expit(Z1 @ beta))[:, None] * Z1
    r0 = (data.Y - expit(Z0 @ beta))[:, None] * Z0
    pi = np.asarray(pi, dtype=float)[:, None]
    return pi * r1 + (1.0 - pi) * r0


def outcome_ee_score(beta, data, miss, imp, spec):
    """Augmented outcome estimating equation, averaged over rows"""
    Z, y, weights = _outcome_ee_rows(data, miss, imp, spec)
    return logistic_score(beta, Z, y, weights) / data.n


def fit_outcome_ee(data, miss, imp, spec, opts=None):
    """Outcome model from the imputation-augmented estimating equation"""
    _expect(spec, ModelKind.OUTCOME)
    _, extreme = missingness_weights(data, miss)
    Z, y, weights = _outcome_ee_rows(data, miss, imp, spec)

    def score(beta):
        return logistic_score(beta, Z, y, weights) / data.n

    def jacobian(beta):
        return logistic_jacobian(beta, Z, weights) / data.n

    coef = solve_estimating_equation(score, jacobian, np.zeros(Z.shape[1]), _opts(opts), label='outcome-ee')
    coef = replace(coef, names=spec.column_names(data))
    return NuisanceFit.from_coef(spec, coef, data, diagnostics={'extreme_weights': extreme})


def bayes_imputation(ps, outcome_fit1, outcome_fit0, data):
    """P(A=1 | X, Y) reconstructed from the PS and outcome models by Bayes' rule"""
    prior = ps.fitted
    q1, q0 = outcome_fit1.fitted, outcome_fit0.fitted
    # likelihood of the observed outcome under each exposure
    l1 = np.where(data.Y == 1, q1, 1.0 - q1)
    l0 = np.where(data.Y == 1, q0, 1.0 - q0)
    posterior = l1 * prior / (l1 * prior + l0 * (1.0 - prior))
    posterior, clamped = clamp_probabilities(posterior)
    if clamped:
        logger.warning("Bayes posterior exposure probabilities clamped")
    return posterior
