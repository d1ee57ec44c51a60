"""
Module: Nonparametric Bootstrap
Purpose: Resample rows, re-run an estimator end-to-end, percentile confidence intervals
Dependencies: numpy, concurrent.futures, estimators
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from config import Config
from estimators import estimate
from utils.core import STREAM_BOOTSTRAP, STREAM_IMPUTATION, derive_rng, derive_seed
from utils.error_handler import (
    ConfigError, EstimationError, InsufficientReplicatesError, log_performance
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    """Usable replicates of tau (and of the arm means) with the percentile CI"""
    replicates: np.ndarray
    tau1_replicates: np.ndarray
    tau0_replicates: np.ndarray
    ci_lower: float
    ci_upper: float
    bse: float
    n_failed: int
    B: int
    level: float = Config.CI_LEVEL
    failures: dict = field(default_factory=dict)

    @property
    def median_bse_input(self):
        """The per-run SE that a simulation cell takes the median of"""
        return self.bse

    @property
    def n_usable(self):
        return int(self.replicates.size)

    def covers(self, value):
        return bool(self.ci_lower <= value <= self.ci_upper)


def percentile_interval(replicates, level=Config.CI_LEVEL):
    """Equal-tailed percentile interval with linear (type-7) interpolation"""
    alpha = 1.0 - level
    lower, upper = np.quantile(np.asarray(replicates, dtype=float), [alpha / 2, 1 - alpha / 2], method='linear')
    return float(lower), float(upper)


def _one_replicate(data, specs, method, seed, index, estimate_fn, m, opts):
    rng = derive_rng(seed, STREAM_BOOTSTRAP, index)
    sample = data.take(rng.integers(0, data.n, size=data.n))
    try:
        result = estimate_fn(sample, specs, method, seed=derive_seed(seed, STREAM_IMPUTATION, index), m=m, opts=opts)
    except (EstimationError, np.linalg.LinAlgError) as e:
        return None, type(e).__name__
    if not np.isfinite(result.tau):
        return None, 'NonFinite'
    return result, None


@log_performance
def bootstrap(data, specs, method, B=Config.BOOTSTRAP_B, seed=Config.SEED, estimate_fn=None,
              m=Config.MICE_IMPUTATIONS, opts=None, jobs=1, level=Config.CI_LEVEL):
    """B resamples of n rows; failed replicates are dropped and counted"""
    if B < 100:
        raise ConfigError(f"Bootstrap needs B >= 100, got {B}")
    estimate_fn = estimate_fn or estimate

    def run(index):
        return _one_replicate(data, specs, method, seed, index, estimate_fn, m, opts)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, range(B)))
    else:
        outcomes = [run(index) for index in range(B)]

    usable = [result for result, _ in outcomes if result is not None]
    failures = Counter(reason for result, reason in outcomes if result is None)
    n_failed = B - len(usable)
    if n_failed:
        logger.warning(f"{method}: dropped {n_failed}/{B} bootstrap replicates {dict(failures)}")
    if len(usable) < Config.MIN_USABLE_BOOTSTRAP_FRACTION * B:
        raise InsufficientReplicatesError(f"{method}: only {len(usable)} of {B} bootstrap replicates usable")

    replicates = np.array([r.tau for r in usable])
    lower, upper = percentile_interval(replicates, level)
    return BootstrapResult(
        replicates=replicates,
        tau1_replicates=np.array([r.tau1 for r in usable]),
        tau0_replicates=np.array([r.tau0 for r in usable]),
        ci_lower=lower,
        ci_upper=upper,
        bse=float(np.std(replicates, ddof=1)),
        n_failed=n_failed,
        B=B,
        level=level,
        failures=dict(failures)
    )
