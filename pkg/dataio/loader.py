"""
Module: Dataset Ingestion
Purpose: Read an analysis CSV into a Dataset and write one back
Dependencies: pandas, numpy, model.nuisance
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from config import Config
from model.nuisance import Dataset
from utils.error_handler import ConfigError, DataError, ParseError, SchemaError

logger = logging.getLogger(__name__)

BINARY_TOKENS = {'0': 0.0, '1': 1.0, '0.0': 0.0, '1.0': 1.0}


@dataclass(frozen=True)
class ColumnMap:
    """Which CSV columns hold the exposure, the outcome and the covariates.

    covariates=None takes every remaining column in file order.
    """
    exposure: str
    outcome: str
    covariates: tuple = None
    missing_markers: tuple = Config.MISSING_MARKERS

    def __post_init__(self):
        if self.covariates is not None:
            object.__setattr__(self, 'covariates', tuple(self.covariates))
        object.__setattr__(self, 'missing_markers', tuple(self.missing_markers))

        names = [self.exposure, self.outcome, *(self.covariates or ())]
        if len(set(names)) != len(names):
            raise ConfigError(f"Column names must be distinct: {names}")

    def resolve(self, header):
        """Covariate list for a given header"""
        if self.covariates is not None:
            return self.covariates
        return tuple(c for c in header if c not in (self.exposure, self.outcome))


def _read_frame(path):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Data file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False)
    except pd.errors.EmptyDataError:
        raise ParseError(f"{path} is empty or has no header")
    except pd.errors.ParserError as e:
        raise ParseError(f"Invalid CSV in {path}: {e}")
    frame.columns = [c.strip() for c in frame.columns]
    return frame.apply(lambda col: col.str.strip())


def _parse_exposure(values, column, markers):
    out = np.empty(len(values))
    for i, raw in enumerate(values):
        if raw in markers:
            out[i] = np.nan
        elif raw in BINARY_TOKENS:
            out[i] = BINARY_TOKENS[raw]
        else:
            raise ParseError(f"Exposure must be 0, 1 or a missing marker, got '{raw}'", row=i + 1, column=column)
    return out


def _parse_outcome(values, column, markers):
    for i, raw in enumerate(values):
        if raw in markers:
            raise ParseError("Missing outcome", row=i + 1, column=column)
    numeric = pd.to_numeric(values, errors='coerce')
    bad = np.flatnonzero(np.isnan(numeric))
    if bad.size:
        raise ParseError(f"Outcome is not numeric: '{values.iloc[bad[0]]}'", row=int(bad[0]) + 1, column=column)
    outside = np.flatnonzero((numeric != 0) & (numeric != 1))
    if outside.size:
        raise ValueError(
            f"Outcome '{column}' must be 0/1, got {values.iloc[outside[0]]} at row {int(outside[0]) + 1}"
        )
    return np.asarray(numeric, dtype=float)


def _parse_covariate(values, column, markers):
    """Numeric column, or a two-level text column coded by sorted level order"""
    for i, raw in enumerate(values):
        if raw in markers:
            raise ParseError("Missing covariate value", row=i + 1, column=column)

    try:
        # float() parsing keeps written values bit-identical on reload
        numeric = values.astype(float).to_numpy()
    except ValueError:
        numeric = None
    if numeric is not None:
        bad = np.flatnonzero(~np.isfinite(numeric))
        if bad.size:
            raise ParseError("Covariate is not finite", row=int(bad[0]) + 1, column=column)
        return numeric, None

    levels = sorted(values.unique())
    if len(levels) != 2:
        first = int(np.flatnonzero(np.isnan(pd.to_numeric(values, errors='coerce')))[0])
        raise ParseError(
            f"Covariate is neither numeric nor binary categorical ({len(levels)} levels)",
            row=first + 1, column=column
        )
    coding = {level: code for code, level in enumerate(levels)}
    logger.info(f"Coded '{column}': {coding}")
    return values.map(coding).to_numpy(dtype=float), coding


def load_csv(path, colmap):
    """Parse a CSV into a Dataset; rows with a missing outcome or covariate are rejected"""
    frame = _read_frame(path)
    covariates = colmap.resolve(frame.columns)
    if not covariates:
        raise SchemaError("No covariate columns")

    for column in (colmap.exposure, colmap.outcome, *covariates):
        if column not in frame.columns:
            raise SchemaError(f"Column '{column}' not found in {path}", column=column)
    if frame.empty:
        raise ParseError(f"{path} has a header but no rows")

    markers = set(colmap.missing_markers)
    A = _parse_exposure(frame[colmap.exposure], colmap.exposure, markers)
    Y = _parse_outcome(frame[colmap.outcome], colmap.outcome, markers)

    columns, coding = [], {}
    for column in covariates:
        values, levels = _parse_covariate(frame[column], column, markers)
        columns.append(values)
        if levels:
            coding[column] = levels

    data = Dataset.from_arrays(np.column_stack(columns), A, Y, names=covariates, coding=coding)
    logger.info(f"Loaded {path}: n={data.n}, {data.n_missing} missing exposure ({data.missing_rate:.1%})")
    return data


def write_csv(data, path, colmap=None):
    """Write a Dataset so load_csv(path, colmap) gives back the same values"""
    exposure = colmap.exposure if colmap else 'A'
    outcome = colmap.outcome if colmap else 'Y'
    marker = colmap.missing_markers[0] if colmap and colmap.missing_markers else 'NA'

    frame = pd.DataFrame({
        exposure: [marker if np.isnan(a) else str(int(a)) for a in data.A],
        outcome: data.Y.astype(int)
    })
    for j, name in enumerate(data.covariate_names, start=1):
        frame[name] = data.X[:, j]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n')
    logger.info(f"Wrote {data.n} rows to {path}")
    return path
