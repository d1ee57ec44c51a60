"""
Nuisance Model Package
"""
from .glm import CoefVector, SolveOptions, expit, fit_weighted_logistic, solve_estimating_equation
from .nuisance import (
    Dataset, ModelKind, ModelSpec, NuisanceFit, bayes_imputation, fit_imputation,
    fit_missingness, fit_outcome_ee, fit_outcome_wla, fit_ps_ee, fit_ps_wla
)

__all__ = [
    'CoefVector', 'SolveOptions', 'expit', 'fit_weighted_logistic', 'solve_estimating_equation',
    'Dataset', 'ModelKind', 'ModelSpec', 'NuisanceFit', 'bayes_imputation', 'fit_imputation',
    'fit_missingness', 'fit_outcome_ee', 'fit_outcome_wla', 'fit_ps_ee', 'fit_ps_wla'
]
