"""
Module: Estimator Types
Purpose: EffectEstimate, SpecBundle and helpers shared by every estimator
Dependencies: numpy, scipy, model
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logit

from config import Config, IMPUTATION_METHODS
from model.nuisance import ModelKind, ModelSpec, NuisanceFit, fit_missingness
from utils.error_handler import ConfigError, DegenerateArmError

logger = logging.getLogger(__name__)

ARMS = (1, 0)


def odds_ratio(tau1, tau0):
    """Odds of the exposed mean over odds of the unexposed mean"""
    return (tau1 / (1.0 - tau1)) / (tau0 / (1.0 - tau0))


@dataclass(frozen=True, eq=False)
class EffectEstimate:
    """Potential-outcome means and their odds ratio"""
    tau1: float
    tau0: float
    tau: float
    method: str
    diagnostics: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)

    @classmethod
    def from_means(cls, tau1, tau0, method, diagnostics=None, fits=None):
        """Clamp the arm means into (0, 1) and form the odds ratio"""
        diagnostics = dict(diagnostics or {})
        for name, value in (('tau1', tau1), ('tau0', tau0)):
            if not np.isfinite(value):
                raise DegenerateArmError(f"{method}: {name} is not finite")

        eps = Config.PROBABILITY_CLAMP
        clamped1, clamped0 = float(np.clip(tau1, eps, 1 - eps)), float(np.clip(tau0, eps, 1 - eps))
        if clamped1 != tau1 or clamped0 != tau0:
            logger.warning(f"{method}: arm means clamped ({tau1:.6g}, {tau0:.6g})")
            diagnostics['means_clamped'] = True
        else:
            diagnostics.setdefault('means_clamped', False)

        return cls(clamped1, clamped0, odds_ratio(clamped1, clamped0), method, diagnostics, dict(fits or {}))

    @property
    def log_tau(self):
        return float(np.log(self.tau))

    @property
    def logits(self):
        return float(logit(self.tau1)), float(logit(self.tau0))


@dataclass(frozen=True)
class SpecBundle:
    """One spec per nuisance model"""
    missingness: ModelSpec
    ps: ModelSpec
    outcome: ModelSpec
    imputation: ModelSpec = None
    use_bayes_fallback: bool = False

    def __post_init__(self):
        slots = (('missingness', ModelKind.MISSINGNESS), ('ps', ModelKind.PS),
                 ('outcome', ModelKind.OUTCOME), ('imputation', ModelKind.IMPUTATION))
        for name, kind in slots:
            spec = getattr(self, name)
            if spec is not None and spec.model is not kind:
                raise ConfigError(f"Slot '{name}' holds a {spec.model.value} spec")

    @classmethod
    def full(cls, p, imputation=True, use_bayes_fallback=False):
        """Every model with every covariate"""
        return cls(
            missingness=ModelSpec.full(ModelKind.MISSINGNESS, p),
            ps=ModelSpec.full(ModelKind.PS, p),
            outcome=ModelSpec.full(ModelKind.OUTCOME, p),
            imputation=ModelSpec.full(ModelKind.IMPUTATION, p) if imputation else None,
            use_bayes_fallback=use_bayes_fallback
        )

    def misspecify(self, missingness=False, imputation=False, ps=False, outcome=False, drop=()):
        """Drop Y from missingness/imputation and the given covariates from PS/outcome"""
        return replace(
            self,
            missingness=self.missingness.without_outcome() if missingness else self.missingness,
            imputation=(self.imputation.without_outcome()
                        if imputation and self.imputation is not None else self.imputation),
            ps=self.ps.without(*drop) if ps else self.ps,
            outcome=self.outcome.without(*drop) if outcome else self.outcome
        )

    def require_imputation(self, method):
        if self.imputation is None:
            raise ConfigError(f"Method '{method}' needs an imputation model spec")

    def check(self, p):
        for spec in (self.missingness, self.ps, self.outcome, self.imputation):
            if spec is not None:
                spec.check(p)


def needs_imputation(method):
    return method.startswith('tr-') or method in IMPUTATION_METHODS


def missingness_fit(data, specs, opts=None):
    """Missingness fit, or an exact P_R = 0 when nothing is missing"""
    if data.n_missing == 0:
        logger.info("No missing exposure; using P_R = 0")
        return NuisanceFit.degenerate(specs.missingness, data, 0.0)
    return fit_missingness(data, specs.missingness, opts)


def arm_exposure(data, arm):
    """Arm indicator: A for arm 1, 1 - A for arm 0 (missing rows zero-filled)"""
    a = data.a_filled
    return a if arm == 1 else np.where(data.complete, 1.0 - a, 0.0)


def arm_probability(p, arm):
    """P for arm 1 and 1 - P for arm 0"""
    return p if arm == 1 else 1.0 - p
