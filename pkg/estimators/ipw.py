"""
Module: IPW Estimators
Purpose: IPW-IPW, IPW-DR and IPW-WEE estimators with WLA nuisance fits
Dependencies: numpy, scipy, model
"""

import logging

import numpy as np
from scipy.special import expit

from estimators.base import ARMS, EffectEstimate, arm_exposure, arm_probability, missingness_fit
from model.glm import fit_weighted_logistic, logistic_score
from model.nuisance import fit_outcome_wla, fit_ps_wla, missingness_weights

logger = logging.getLogger(__name__)


def ipw_ipw_functional(w, a, ps, Y):
    """mean of w a Y / ps"""
    return float(np.mean(w * a * Y / ps))


def ipw_dr_functional(w, a, ps, Y, m):
    """mean of w [a/ps (Y - m) + m]"""
    return float(np.mean(w * (a / ps * (Y - m) + m)))


def _ipw_nuisance(data, specs, opts, outcome=False):
    miss = missingness_fit(data, specs, opts)
    w, extreme = missingness_weights(data, miss)
    ps = fit_ps_wla(data, miss, specs.ps, opts)
    fits = {'missingness': miss, 'ps': ps}
    if outcome:
        fits['outcome'] = fit_outcome_wla(data, miss, specs.outcome, opts)
    diagnostics = {
        'extreme_weights': extreme,
        'clamped': any(f.clamped for f in fits.values()),
        'iterations': sum(f.diagnostics.get('iterations', 0) for f in fits.values())
    }
    return w, fits, diagnostics


def estimate_ipw_ipw(data, specs, opts=None):
    """Doubly inverse-weighted arm means"""
    w, fits, diagnostics = _ipw_nuisance(data, specs, opts)
    means = {
        arm: ipw_ipw_functional(w, arm_exposure(data, arm), arm_probability(fits['ps'].fitted, arm), data.Y)
        for arm in ARMS
    }
    return EffectEstimate.from_means(means[1], means[0], 'ipw-ipw', diagnostics, fits)


def estimate_ipw_dr(data, specs, opts=None):
    """Missingness-weighted augmented IPW"""
    w, fits, diagnostics = _ipw_nuisance(data, specs, opts, outcome=True)
    means = {}
    for arm in ARMS:
        m = fits['outcome'].at_exposure(data, arm).fitted
        means[arm] = ipw_dr_functional(
            w, arm_exposure(data, arm), arm_probability(fits['ps'].fitted, arm), data.Y, m
        )
    return EffectEstimate.from_means(means[1], means[0], 'ipw-dr', diagnostics, fits)


def fit_wee_arm(data, specs, w, ps, arm, opts=None):
    """Arm-specific weighted estimating equation for the covariate-only outcome model"""
    design = specs.outcome.covariate_design(data)
    weights = w * arm_exposure(data, arm) / arm_probability(ps, arm)
    return fit_weighted_logistic(design, data.Y, weights, opts=opts, label=f"ipw-wee-{arm}")


def wee_intercept_residual(data, specs, w, ps, arm, coef):
    """Intercept component of the WEE score at coef, averaged over rows"""
    design = specs.outcome.covariate_design(data)
    weights = w * arm_exposure(data, arm) / arm_probability(ps, arm)
    return float(logistic_score(coef.values, design, data.Y, weights)[0] / data.n)


def estimate_ipw_wee(data, specs, opts=None):
    """WEE outcome coefficients, then missingness-weighted average of fitted responses"""
    w, fits, diagnostics = _ipw_nuisance(data, specs, opts)
    design = specs.outcome.covariate_design(data)
    means = {}
    for arm in ARMS:
        coef = fit_wee_arm(data, specs, w, fits['ps'].fitted, arm, opts)
        fits[f"wee_{arm}"] = coef
        diagnostics['iterations'] += coef.iterations
        means[arm] = float(np.mean(w * expit(design @ coef.values)))
    logger.debug(f"IPW-WEE arm means: {means}")
    return EffectEstimate.from_means(means[1], means[0], 'ipw-wee', diagnostics, fits)
