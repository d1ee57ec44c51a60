"""
Module: Data-Generating Process
Purpose: Draw simulation datasets with three normal covariates and MAR exposure
Dependencies: numpy, scipy, model
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from config import Config
from model.nuisance import Dataset
from utils.core import STREAM_DATA, derive_rng

logger = logging.getLogger(__name__)

N_COVARIATES = 3


@dataclass(frozen=True)
class DgpConfig:
    """Generating coefficients.

    coef_ps: (intercept, X1, X2, X3)
    coef_outcome: (intercept, X1, X2, X3, A)
    coef_missing: (intercept, X1, X2, X3, Y)
    """
    n: int = Config.SIM_SAMPLE_SIZE
    coef_ps: tuple = (-0.2, 0.9, 1.0, 0.8)
    coef_outcome: tuple = (0.7, 0.5, 0.9, 0.7, 1.0)
    coef_missing: tuple = (-0.5, 0.6, 0.7, 0.8, 0.5)
    seed: int = Config.SEED

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        expected = {'coef_ps': N_COVARIATES + 1, 'coef_outcome': N_COVARIATES + 2, 'coef_missing': N_COVARIATES + 2}
        for name, length in expected.items():
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != length:
                raise ValueError(f"{name} needs {length} coefficients, got {len(values)}")
            object.__setattr__(self, name, values)


def generate_dataset(cfg, rng=None):
    """X ~ N(0, I); A | X; Y | A, X; R | X, Y; A masked where R = 1"""
    rng = rng or derive_rng(cfg.seed, STREAM_DATA)
    ps, outcome, missing = (np.asarray(c) for c in (cfg.coef_ps, cfg.coef_outcome, cfg.coef_missing))

    X = rng.standard_normal((cfg.n, N_COVARIATES))
    A = (rng.random(cfg.n) < expit(ps[0] + X @ ps[1:])).astype(float)
    Y = (rng.random(cfg.n) < expit(outcome[0] + X @ outcome[1:-1] + outcome[-1] * A)).astype(float)
    R = rng.random(cfg.n) < expit(missing[0] + X @ missing[1:-1] + missing[-1] * Y)

    A_observed = np.where(R, np.nan, A)
    return Dataset.from_arrays(X, A_observed, Y, names=tuple(f"X{j}" for j in range(1, N_COVARIATES + 1)))
