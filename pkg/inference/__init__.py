"""
Inference Package
"""
from .delta import DeltaVariance, delta_variance, delta_from_bootstrap

__all__ = ['DeltaVariance', 'delta_variance', 'delta_from_bootstrap']
