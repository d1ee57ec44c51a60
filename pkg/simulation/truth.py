"""
Module: True Causal Odds Ratio
Purpose: Ground truth for the simulation outcome model by quadrature, with a Monte Carlo cross-check
Dependencies: numpy, scipy, inference.delta
"""

import logging

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import expit

from config import Config
from inference.delta import delta_variance
from utils.core import derive_rng

logger = logging.getLogger(__name__)


def _split(coef_outcome):
    coef = np.asarray(coef_outcome, dtype=float)
    return coef[0], coef[1:-1], coef[-1]


def true_tau(coef_outcome, quadrature_order=Config.QUADRATURE_ORDER):
    """Odds ratio of E[expit(b0 + bA + b'X)] over E[expit(b0 + b'X)] for X ~ N(0, I).

    b'X is N(0, |b|^2), so each expectation is a one-dimensional
    Gauss-Hermite sum.
    """
    if quadrature_order < 20:
        raise ValueError(f"quadrature_order must be >= 20, got {quadrature_order}")
    intercept, beta, beta_a = _split(coef_outcome)
    scale = np.linalg.norm(beta)

    nodes, weights = hermgauss(quadrature_order)
    z = np.sqrt(2.0) * scale * nodes
    p1 = weights @ expit(intercept + beta_a + z) / np.sqrt(np.pi)
    p0 = weights @ expit(intercept + z) / np.sqrt(np.pi)
    return float((p1 / (1 - p1)) / (p0 / (1 - p0)))


def true_tau_monte_carlo(coef_outcome, draws=10 ** 7, seed=Config.SEED, chunk=10 ** 6):
    """Plain Monte Carlo over the full covariate vector; returns (tau, standard error)"""
    intercept, beta, beta_a = _split(coef_outcome)
    rng = derive_rng(seed, 99)
    sums = np.zeros(5)  # s1, s0, s11, s00, s10

    remaining = draws
    while remaining > 0:
        size = min(chunk, remaining)
        lin = intercept + rng.standard_normal((size, beta.size)) @ beta
        y1, y0 = expit(lin + beta_a), expit(lin)
        sums += [y1.sum(), y0.sum(), y1 @ y1, y0 @ y0, y1 @ y0]
        remaining -= size

    p1, p0 = sums[0] / draws, sums[1] / draws
    var1 = sums[2] / draws - p1 ** 2
    var0 = sums[3] / draws - p0 ** 2
    cov10 = sums[4] / draws - p1 * p0
    cov = np.array([[var1, cov10], [cov10, var0]]) * draws / (draws - 1) / draws

    delta = delta_variance(p1, p0, cov, textbook=True)
    return delta.tau, float(np.sqrt(delta.var_tau))
