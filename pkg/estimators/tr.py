"""
Module: Triple-Robust Estimators
Purpose: TR-AIPW and TR-WEE with augmented (EE) nuisance fits and optional Bayes fallback
Dependencies: numpy, scipy, model
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from config import Config
from estimators.base import ARMS, EffectEstimate, arm_exposure, arm_probability, missingness_fit
from model.glm import logistic_jacobian, logistic_score, solve_estimating_equation
from model.nuisance import (
    bayes_imputation, fit_imputation, fit_outcome_ee, fit_ps_ee, missingness_weights
)

logger = logging.getLogger(__name__)


@dataclass
class TRNuisance:
    """Everything the TR functionals consume"""
    w: np.ndarray
    pi: np.ndarray
    miss: object
    imp: object
    ps: object
    outcome: object
    bayes_rounds: int = 0
    bayes_change: float = 0.0
    bayes_converged: bool = True
    extreme_weights: int = 0

    def fits(self):
        return {'missingness': self.miss, 'imputation': self.imp, 'ps': self.ps, 'outcome': self.outcome}

    def diagnostics(self):
        fits = self.fits().values()
        return {
            'extreme_weights': self.extreme_weights,
            'clamped': any(f.clamped for f in fits),
            'iterations': sum(f.diagnostics.get('iterations', 0) for f in fits),
            'bayes_rounds': self.bayes_rounds,
            'bayes_change': self.bayes_change,
            'bayes_converged': self.bayes_converged
        }


def fit_tr_nuisance(data, specs, opts=None, config_class=Config):
    """gamma, delta, then alpha/beta from the augmented equations"""
    specs.require_imputation('tr')
    miss = missingness_fit(data, specs, opts)
    w, extreme = missingness_weights(data, miss)
    imp = fit_imputation(data, specs.imputation, opts)
    pi = imp.fitted
    ps = fit_ps_ee(data, miss, pi, specs.ps, opts)
    outcome = fit_outcome_ee(data, miss, pi, specs.outcome, opts)
    nuisance = TRNuisance(w, pi, miss, imp, ps, outcome, extreme_weights=extreme)

    if specs.use_bayes_fallback:
        _bayes_fixed_point(data, specs, nuisance, opts, config_class)
    return nuisance


def _bayes_fixed_point(data, specs, nuisance, opts, config_class):
    """Alternate Bayes posterior and EE refits until the posterior settles"""
    for rounds in range(1, config_class.BAYES_MAX_ROUNDS + 1):
        posterior = bayes_imputation(
            nuisance.ps,
            nuisance.outcome.at_exposure(data, 1),
            nuisance.outcome.at_exposure(data, 0),
            data
        )
        change = float(np.max(np.abs(posterior - nuisance.pi)))
        nuisance.pi = posterior
        nuisance.ps = fit_ps_ee(data, nuisance.miss, posterior, specs.ps, opts)
        nuisance.outcome = fit_outcome_ee(data, nuisance.miss, posterior, specs.outcome, opts)
        nuisance.bayes_rounds, nuisance.bayes_change = rounds, change
        if change < config_class.BAYES_TOLERANCE:
            break
    else:
        nuisance.bayes_converged = False
        logger.warning(
            f"Bayes fallback stopped after {nuisance.bayes_rounds} rounds (change {nuisance.bayes_change:.3e})"
        )
    logger.info(f"Bayes fallback used {nuisance.bayes_rounds} rounds")


def tr_aipw_functional(w, a, ps, pi, Y, m_t, m_e):
    """mean of w Q(m_t) minus mean of (w - 1) E[Q(m_e) | X, Y]"""
    q = a / ps * (Y - m_t) + m_t
    expected_q = pi / ps * (Y - m_e) + m_e
    return float(np.mean(w * q) - np.mean((w - 1.0) * expected_q))


def _arm_inputs(data, nuisance, arm):
    return (
        arm_exposure(data, arm),
        arm_probability(nuisance.ps.fitted, arm),
        arm_probability(nuisance.pi, arm),
        nuisance.outcome.at_exposure(data, arm).fitted
    )


def estimate_tr_aipw(data, specs, opts=None):
    """Combination of two DR estimators through the imputation expectation"""
    nuisance = fit_tr_nuisance(data, specs, opts)
    means = {}
    for arm in ARMS:
        a, ps, pi, m = _arm_inputs(data, nuisance, arm)
        means[arm] = tr_aipw_functional(nuisance.w, a, ps, pi, data.Y, m, m)
    return EffectEstimate.from_means(means[1], means[0], 'tr-aipw', nuisance.diagnostics(), nuisance.fits())


def tr_wee_score_parts(data, specs, nuisance, arm):
    """Design, WEE weights and the constant block of the TR-WEE score"""
    a, ps, pi, m_e = _arm_inputs(data, nuisance, arm)
    design = specs.outcome.covariate_design(data)
    weights = nuisance.w * a / ps
    # augmentation block: (1 - w) E[Q - m_e | X, Y] as a vector
    offset = design.T @ ((1.0 - nuisance.w) * pi / ps * (data.Y - m_e))
    return design, weights, offset, m_e


def fit_tr_wee_arm(data, specs, nuisance, arm, opts=None):
    """Solve the arm-specific TR-WEE equation from a zero start"""
    design, weights, offset, m_e = tr_wee_score_parts(data, specs, nuisance, arm)

    def score(beta):
        return (logistic_score(beta, design, data.Y, weights) + offset) / data.n

    def jacobian(beta):
        return logistic_jacobian(beta, design, weights) / data.n

    coef = solve_estimating_equation(score, jacobian, np.zeros(design.shape[1]), opts, label=f"tr-wee-{arm}")
    return coef, m_e


def estimate_tr_wee(data, specs, opts=None):
    """TR weighted estimating equation, then averaged fitted responses"""
    nuisance = fit_tr_nuisance(data, specs, opts)
    design = specs.outcome.covariate_design(data)
    diagnostics = nuisance.diagnostics()
    fits = nuisance.fits()
    means = {}
    for arm in ARMS:
        coef, m_e = fit_tr_wee_arm(data, specs, nuisance, arm, opts)
        fits[f"wee_{arm}"] = coef
        diagnostics['iterations'] += coef.iterations
        m_t = expit(design @ coef.values)
        means[arm] = float(np.mean(nuisance.w * (m_t - m_e)) + np.mean(m_e))
    return EffectEstimate.from_means(means[1], means[0], 'tr-wee', diagnostics, fits)
