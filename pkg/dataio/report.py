"""
Module: Reports
Purpose: Key-value analysis report, metrics table and per-replication estimates
Dependencies: pandas, numpy, shlex
"""

import json
import logging
import math
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

DATASET_FIELDS = ('n', 'n_missing', 'missing_rate', 'complete_exposed', 'complete_unexposed',
                  'outcome_rate', 'covariates', 'true_tau')

METHOD_FIELDS = ('method', 'status', 'tau', 'tau1', 'tau0', 'ci_lower', 'ci_upper', 'ci_level', 'bse',
                 'n_failed', 'B', 'delta_ci_lower', 'delta_ci_upper', 'means_clamped', 'clamped',
                 'extreme_weights', 'error_type', 'message')


def format_value(value):
    """One field value; strings with spaces, quotes or '=' are JSON-quoted"""
    if value is None:
        return '""'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return 'nan' if math.isnan(value) else repr(float(value))
    text = str(value)
    if not text or any(c.isspace() or c in '"\'=\\' for c in text):
        return json.dumps(text, ensure_ascii=False)
    return text


def format_record(kind, fields):
    parts = [f"record={kind}"] + [f"{key}={format_value(value)}" for key, value in fields.items()]
    return ' '.join(parts)


def parse_report(text):
    """(schema_version, records); each record is a dict of strings"""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith('schema_version='):
        raise ValueError("Report lacks a schema_version header")
    version = int(lines[0].split('=', 1)[1])

    records = []
    for line in lines[1:]:
        record = {}
        for token in shlex.split(line):
            key, _, value = token.partition('=')
            record[key] = value
        records.append(record)
    return version, records


def dataset_summary(data, truth=None):
    complete = data.complete
    return {
        'n': data.n,
        'n_missing': data.n_missing,
        'missing_rate': float(data.missing_rate),
        'complete_exposed': int(np.sum(data.A[complete] == 1)),
        'complete_unexposed': int(np.sum(data.A[complete] == 0)),
        'outcome_rate': float(data.Y.mean()),
        'covariates': ','.join(data.covariate_names),
        'true_tau': float('nan') if truth is None else float(truth)
    }


def method_fields(method, outcome):
    """Full field set for one method; a failure record keeps every key with NaN values"""
    fields = dict.fromkeys(METHOD_FIELDS, float('nan'))
    fields.update(method=method, status='ok', n_failed=0, B=0, means_clamped=False, clamped=False,
                  extreme_weights=0, error_type='', message='')

    if not outcome['success']:
        fields.update(status='failed', error_type=outcome['error_type'], message=outcome['error'])
        return fields

    est, boot, delta = outcome['result']
    delta_lower, delta_upper = delta.confidence_interval(boot.level)
    fields.update(
        tau=est.tau, tau1=est.tau1, tau0=est.tau0,
        ci_lower=boot.ci_lower, ci_upper=boot.ci_upper, ci_level=boot.level, bse=boot.bse,
        n_failed=boot.n_failed, B=boot.B,
        delta_ci_lower=float(delta_lower), delta_ci_upper=float(delta_upper),
        means_clamped=bool(est.diagnostics.get('means_clamped', False)),
        clamped=bool(est.diagnostics.get('clamped', False)),
        extreme_weights=int(est.diagnostics.get('extreme_weights', 0))
    )
    return fields


@dataclass
class AnalysisReport:
    """Dataset summary plus one record per requested method"""
    dataset: dict
    methods: list = field(default_factory=list)
    warnings: int = 0

    @property
    def failed(self):
        return [m for m in self.methods if m['status'] != 'ok']

    def render(self):
        lines = [f"schema_version={SCHEMA_VERSION}",
                 format_record('dataset', {key: self.dataset[key] for key in DATASET_FIELDS})]
        lines += [format_record('method', {key: m[key] for key in METHOD_FIELDS}) for m in self.methods]
        return '\n'.join(lines) + '\n'


def _write_text(text, path):
    if path is None:
        sys.stdout.write(text)
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Wrote {path}")
    return path


def write_report(report, path=None):
    """Report to a file, or stdout when no path is given"""
    return _write_text(report.render(), path)


def render_metrics(metrics):
    body = metrics.to_frame().to_csv(index=False, float_format='%.6f', lineterminator='\n')
    return f"# schema_version={SCHEMA_VERSION}\n{body}"


def write_metrics(metrics, path=None):
    return _write_text(render_metrics(metrics), path)


def write_estimates(metrics, path):
    body = metrics.estimates_frame().to_csv(index=False, float_format='%.10g', lineterminator='\n')
    return _write_text(f"# schema_version={SCHEMA_VERSION}\n{body}", path)
