"""
Result files: CSV tables and JSON reports.
"""

from .results import ResultWriter, coefficient_frame, dumps, series_frame

__all__ = ["ResultWriter", "coefficient_frame", "series_frame", "dumps"]
