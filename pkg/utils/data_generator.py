"""
Module: Synthetic Applied Dataset
Purpose: Write a synthetic cohort CSV shaped like a hospital mortality study with a partly missing exposure
Dependencies: numpy, pandas, scipy
"""

from pathlib import Path
import logging

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import expit

from utils.core import STREAM_DATA, derive_rng

logger = logging.getLogger(__name__)

COLUMNS = ['cvd', 'death', 'age', 'sex', 'diabetes']


class CovidShapedGenerator:
    """Synthetic cohort: cvd exposure (some missing), death outcome, age/sex/diabetes covariates.

    Coding: age in raw years; sex as 'female'/'male'; diabetes as 'no'/'yes';
    cvd and death as 0/1 with 'NA' marking a missing exposure. Values are
    synthetic and reproduce only the marginal shape (row count, missing
    exposure count, mortality rate).
    """

    def __init__(self, n=927, n_missing=162, mortality=0.24, seed=0, data_dir=None):
        if not 0 <= n_missing < n:
            raise ValueError(f"n_missing must lie in [0, n), got {n_missing}")
        self.n = n
        self.n_missing = n_missing
        self.mortality = mortality
        self.seed = seed
        self.data_dir = Path(data_dir) if data_dir else Path('data')

    def generate_frame(self):
        """Build the synthetic table in memory"""
        rng = derive_rng(self.seed, STREAM_DATA)
        n = self.n

        age = np.clip(np.round(rng.normal(62, 16, n)), 18, 100)
        male = (rng.random(n) < 0.55).astype(float)
        diabetes = (rng.random(n) < expit(-1.4 + 0.03 * (age - 62))).astype(float)
        cvd = (rng.random(n) < expit(-1.6 + 0.04 * (age - 62) + 0.3 * male + 0.6 * diabetes)).astype(float)

        # Calibrate the intercept so expected mortality matches the target
        lin = 0.05 * (age - 62) + 0.4 * male + 0.5 * diabetes + 0.3 * cvd
        intercept = brentq(lambda c: expit(c + lin).mean() - self.mortality, -20, 20)
        death = (rng.random(n) < expit(intercept + lin)).astype(float)

        # MAR: missingness depends on age and death only
        weights = expit(-1.5 + 0.02 * (age - 62) + 0.5 * death)
        missing = rng.choice(n, size=self.n_missing, replace=False, p=weights / weights.sum())

        exposure = pd.Series(cvd.astype(int).astype(str))
        exposure.iloc[missing] = 'NA'
        return pd.DataFrame({
            'cvd': exposure,
            'death': death.astype(int),
            'age': age.astype(int),
            'sex': np.where(male == 1, 'male', 'female'),
            'diabetes': np.where(diabetes == 1, 'yes', 'no')
        }, columns=COLUMNS)

    def generate_now(self, path=None):
        """Write the synthetic CSV and return its path"""
        path = Path(path) if path else self.data_dir / f"synthetic_covid_shaped_seed{self.seed}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = self.generate_frame()
        frame.to_csv(path, index=False)
        logger.info(f"Generated synthetic dataset {path} ({self.n} rows, {self.n_missing} missing exposure)")
        return path
