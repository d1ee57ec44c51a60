"""
Utilities Package
"""
from .core import setup_logger, derive_rng, derive_seed, canonical_order
from .error_handler import handle_exceptions, log_performance, ErrorCollector, exit_code_for

__all__ = [
    'setup_logger', 'derive_rng', 'derive_seed', 'canonical_order',
    'handle_exceptions', 'log_performance', 'ErrorCollector', 'exit_code_for'
]
