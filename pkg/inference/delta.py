"""
Module: Delta-Method Variance
Purpose: Variance of log(tau) and tau from the covariance of the two arm means
Dependencies: numpy, scipy
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from utils.error_handler import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeltaVariance:
    var_log_tau: float
    var_tau: float
    tau: float
    inputs: tuple
    textbook: bool = False

    def confidence_interval(self, level=0.95):
        """Normal-approximation interval tau +/- z sd(tau)"""
        z = norm.ppf(0.5 + level / 2.0)
        half = z * np.sqrt(self.var_tau)
        return self.tau - half, self.tau + half


def delta_variance(tau1, tau0, cov, textbook=False):
    """Var(log tau) from Var(tau1), Var(tau0), Cov(tau1, tau0).

    The default combines the terms as v1/d1^2 + v0/d0^2 + c/(d1 d0) with
    d = tau (1 - tau). textbook=True uses the first-order expansion of
    logit(tau1) - logit(tau0), whose cross term is -2 c/(d1 d0).
    """
    for name, value in (('tau1', tau1), ('tau0', tau0)):
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value}")

    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise ValueError(f"cov must be 2x2, got shape {cov.shape}")
    if not np.isclose(cov[0, 1], cov[1, 0]):
        raise ValueError("cov must be symmetric")
    if cov[0, 0] < 0 or cov[1, 1] < 0:
        raise ValueError("cov must have a nonnegative diagonal")

    d1 = tau1 * (1.0 - tau1)
    d0 = tau0 * (1.0 - tau0)
    cross = -2.0 if textbook else 1.0
    var_log_tau = cov[0, 0] / d1 ** 2 + cov[1, 1] / d0 ** 2 + cross * cov[0, 1] / (d1 * d0)
    var_log_tau = max(float(var_log_tau), 0.0)

    tau = (tau1 / (1.0 - tau1)) / (tau0 / (1.0 - tau0))
    return DeltaVariance(
        var_log_tau=var_log_tau,
        var_tau=tau ** 2 * var_log_tau,
        tau=tau,
        inputs=(float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1])),
        textbook=textbook
    )


def delta_from_bootstrap(result, estimate, textbook=False):
    """Delta-method variance using the bootstrap covariance of the arm means"""
    cov = np.cov(np.vstack([result.tau1_replicates, result.tau0_replicates]), ddof=1)
    return delta_variance(estimate.tau1, estimate.tau0, cov, textbook=textbook)
