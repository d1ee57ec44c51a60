"""
Module: Weighted Logistic Core
Purpose: Weighted logistic fitting and a damped Newton root-finder for estimating equations
Dependencies: numpy, scipy
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from config import Config
from utils.error_handler import (
    ConvergenceError, EmptyClassError, RankError,
    SeparationError, SingularJacobianError
)

logger = logging.getLogger(__name__)

__all__ = [
    'expit', 'CoefVector', 'SolveOptions', 'solve_estimating_equation',
    'fit_weighted_logistic', 'logistic_score', 'logistic_jacobian',
    'logistic_information'
]


@dataclass(frozen=True, eq=False)
class CoefVector:
    """Coefficients of one fitted model"""
    values: np.ndarray
    label: str = ''
    names: tuple = ()
    iterations: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise ConvergenceError(f"Non-finite coefficients for model '{self.label}'")
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)

    def as_dict(self):
        """Coefficient values keyed by design column name"""
        names = self.names or tuple(f"b{j}" for j in range(len(self.values)))
        return dict(zip(names, self.values.tolist()))


@dataclass(frozen=True)
class SolveOptions:
    """Newton solver settings"""
    max_iterations: int = Config.SOLVER_MAX_ITERATIONS
    tolerance: float = Config.SOLVER_TOLERANCE
    damping: int = Config.SOLVER_DAMPING

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.damping < 0:
            raise ValueError(f"damping must be >= 0, got {self.damping}")

    @classmethod
    def from_config(cls, config_class=Config):
        return cls(
            max_iterations=config_class.SOLVER_MAX_ITERATIONS,
            tolerance=config_class.SOLVER_TOLERANCE,
            damping=config_class.SOLVER_DAMPING
        )


def _max_norm(g):
    return float(np.max(np.abs(g))) if g.size else 0.0


def _newton_direction(J, g, singular_error):
    if not np.all(np.isfinite(J)):
        raise singular_error("Jacobian has non-finite entries")
    rcond = 1.0 / np.linalg.cond(J)
    if not np.isfinite(rcond) or rcond < Config.RCOND_THRESHOLD:
        raise singular_error(f"Jacobian numerically singular (rcond={rcond:.3e})")
    return np.linalg.solve(J, g)


def _damped_newton(score, jacobian, init, opts, check=None, singular_error=SingularJacobianError):
    """Returns (theta, iterations); raises on failure"""
    theta = np.array(init, dtype=float).reshape(-1)
    g = np.asarray(score(theta), dtype=float)
    norm = _max_norm(g)
    if not np.isfinite(norm):
        raise ConvergenceError("Score is not finite at the starting point")

    iterations = 0
    while norm > opts.tolerance:
        if iterations >= opts.max_iterations:
            raise ConvergenceError(
                f"No convergence after {opts.max_iterations} iterations (|score|={norm:.3e})"
            )
        direction = _newton_direction(np.asarray(jacobian(theta), dtype=float), g, singular_error)

        # step-halving until the score max-norm decreases
        step = 1.0
        for _ in range(opts.damping + 1):
            candidate = theta - step * direction
            g_candidate = np.asarray(score(candidate), dtype=float)
            norm_candidate = _max_norm(g_candidate)
            if np.isfinite(norm_candidate) and norm_candidate < norm:
                break
            step *= 0.5
        else:
            raise ConvergenceError(
                f"Step-halving exhausted after {opts.damping} halvings (|score|={norm:.3e})"
            )

        theta, g, norm = candidate, g_candidate, norm_candidate
        iterations += 1
        if check is not None:
            check(theta)
        logger.debug(f"Newton iteration {iterations}: |score|={norm:.3e}, step={step:g}")

    # One refinement step, kept only if it lowers the residual
    if norm > 0:
        try:
            direction = _newton_direction(np.asarray(jacobian(theta), dtype=float), g, singular_error)
            candidate = theta - direction
            norm_candidate = _max_norm(np.asarray(score(candidate), dtype=float))
            if np.isfinite(norm_candidate) and norm_candidate < norm:
                theta = candidate
        except singular_error:
            pass

    return theta, iterations


def solve_estimating_equation(score, jacobian, init, opts=None, label=''):
    """Solve score(theta) = 0 by damped Newton; jacobian must be exact"""
    opts = opts or SolveOptions.from_config()
    theta, iterations = _damped_newton(score, jacobian, init, opts)
    return CoefVector(theta, label=label, iterations=iterations)


def logistic_score(theta, X, y, w):
    """Weighted logistic score X'[w(y - expit(X theta))]"""
    p = expit(X @ theta)
    return X.T @ (w * (y - p))


def logistic_jacobian(theta, X, w):
    """Derivative of logistic_score with respect to theta"""
    p = expit(X @ theta)
    return -(X.T * (w * p * (1.0 - p))) @ X


def logistic_information(theta, X, w=None):
    """Observed information of a (weighted) logistic likelihood"""
    w = np.ones(X.shape[0]) if w is None else w
    return -logistic_jacobian(np.asarray(theta, dtype=float), X, w)


def fit_weighted_logistic(X, y, w=None, opts=None, label='', names=()):
    """Weighted maximum likelihood for a logistic model, cold start at zero"""
    opts = opts or SolveOptions.from_config()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones(X.shape[0]) if w is None else np.asarray(w, dtype=float)

    if X.ndim != 2 or y.shape != (X.shape[0],) or w.shape != (X.shape[0],):
        raise ValueError(f"Shape mismatch: X {X.shape}, y {y.shape}, w {w.shape}")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ValueError("Weights must be finite and nonnegative")

    positive = w > 0
    Xp, yp, wp = X[positive], y[positive], w[positive]
    if not np.all(np.isfinite(Xp)):
        raise ValueError("Design matrix has non-finite entries on positive-weight rows")
    if not np.all((yp == 0) | (yp == 1)):
        raise ValueError("Response must be binary on positive-weight rows")
    if not (yp == 1).any() or not (yp == 0).any():
        raise EmptyClassError(f"Response is constant on positive-weight rows for model '{label}'")
    if Xp.shape[0] < X.shape[1]:
        raise RankError(f"Fewer positive-weight rows ({Xp.shape[0]}) than columns ({X.shape[1]})")

    # Normalizing by the weight total keeps the iterates identical under rescaling
    scale = wp.sum()

    def score(theta):
        return logistic_score(theta, Xp, yp, wp) / scale

    def jacobian(theta):
        return logistic_jacobian(theta, Xp, wp) / scale

    def check(theta):
        p = expit(Xp @ theta)
        if p.min() < Config.SEPARATION_EPS or p.max() > 1.0 - Config.SEPARATION_EPS:
            raise SeparationError(f"Fitted probabilities pinned to 0 or 1 for model '{label}'")

    theta, iterations = _damped_newton(
        score, jacobian, np.zeros(X.shape[1]), opts, check=check, singular_error=RankError
    )
    logger.debug(f"Fitted '{label}' in {iterations} iterations")
    return CoefVector(theta, label=label, names=tuple(names), iterations=iterations)
