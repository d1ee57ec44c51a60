"""
Data Input/Output Package
"""
from .loader import ColumnMap, load_csv, write_csv
from .report import AnalysisReport, parse_report, write_metrics, write_report

__all__ = ['ColumnMap', 'load_csv', 'write_csv', 'AnalysisReport', 'parse_report', 'write_metrics', 'write_report']
