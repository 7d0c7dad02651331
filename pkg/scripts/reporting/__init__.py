"""
Profile reporting.

Provides aggregation of profile documents, formatting and report generation
for the `report` command.
"""

from .aggregator import PROFILE_SUFFIX, ProfileAggregator
from .formatters import (
    PROFILE_COLUMNS,
    ASCIIChart,
    CSVFormatter,
    JSONFormatter,
    MarkdownFormatter,
    profile_row,
)
from .generator import FORMATS, ReportGenerator

__all__ = [
    'PROFILE_SUFFIX',
    'ProfileAggregator',
    'PROFILE_COLUMNS',
    'ASCIIChart',
    'CSVFormatter',
    'JSONFormatter',
    'MarkdownFormatter',
    'profile_row',
    'FORMATS',
    'ReportGenerator',
]
