"""
Causal odds-ratio estimators for an exposure missing at random
"""

from config import Config
from estimators.base import EffectEstimate, SpecBundle, needs_imputation, odds_ratio
from estimators.imputation import estimate_dr_mice, estimate_dr_si
from estimators.ipw import estimate_ipw_dr, estimate_ipw_ipw, estimate_ipw_wee
from estimators.tr import estimate_tr_aipw, estimate_tr_wee
from utils.error_handler import ConfigError

ESTIMATORS = {
    'ipw-ipw': estimate_ipw_ipw,
    'ipw-dr': estimate_ipw_dr,
    'ipw-wee': estimate_ipw_wee,
    'tr-aipw': estimate_tr_aipw,
    'tr-wee': estimate_tr_wee,
    'dr-si': estimate_dr_si,
    'dr-mice': estimate_dr_mice
}


def estimate(data, specs, method, seed=0, m=Config.MICE_IMPUTATIONS, opts=None):
    """Dispatch one estimator by its method tag"""
    if method not in ESTIMATORS:
        raise ConfigError(f"Unknown method '{method}'; choose from {', '.join(ESTIMATORS)}")
    if needs_imputation(method):
        specs.require_imputation(method)
    specs.check(data.p)

    if method == 'dr-si':
        return estimate_dr_si(data, specs, seed=seed, opts=opts)
    if method == 'dr-mice':
        return estimate_dr_mice(data, specs, m=m, seed=seed, opts=opts)
    return ESTIMATORS[method](data, specs, opts=opts)


__all__ = [
    'ESTIMATORS', 'EffectEstimate', 'SpecBundle', 'estimate', 'odds_ratio',
    'estimate_ipw_ipw', 'estimate_ipw_dr', 'estimate_ipw_wee',
    'estimate_tr_aipw', 'estimate_tr_wee', 'estimate_dr_si', 'estimate_dr_mice'
]
