"""Readers for configuration and data files"""

from .config_parser import ConfigLoader, parse_override
from .stream_reader import (
    read_stream_csv,
    read_processed_csv,
    read_timeline_csv,
    read_features_csv,
    read_values_csv,
    read_signal,
)

__all__ = [
    'ConfigLoader',
    'parse_override',
    'read_stream_csv',
    'read_processed_csv',
    'read_timeline_csv',
    'read_features_csv',
    'read_values_csv',
    'read_signal',
]
