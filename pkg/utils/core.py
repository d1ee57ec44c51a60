"""
Module: Essential Utilities
Purpose: Logger setup, seeded random streams, row ordering helpers
Dependencies: logging, numpy
"""

import logging
from pathlib import Path

import numpy as np

# Stream identifiers for derive_rng
STREAM_DATA = 0
STREAM_BOOTSTRAP = 1
STREAM_IMPUTATION = 2


def setup_logger(level='INFO', log_dir=None):
    """Root handlers for a run: stderr, plus a trwee.log file when log_dir is set"""
    handlers = [logging.StreamHandler()]
    if log_dir:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_dir / 'trwee.log'))

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )
    return logging.getLogger('trwee')


def derive_rng(seed, *keys):
    """Counter-based generator for the stream identified by (seed, *keys)"""
    entropy = [int(seed)] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed, *keys):
    """Integer child seed for the stream identified by (seed, *keys)"""
    entropy = [int(seed)] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def canonical_order(data):
    """Row permutation sorting by covariates then outcome"""
    # lexsort uses the last key as primary
    keys = [data.Y] + [data.X[:, j] for j in range(data.X.shape[1] - 1, 0, -1)]
    return np.lexsort(keys)
