"""Writers for data files, trained models and plots"""

from .csv_writer import (
    fmt,
    write_stream_csv,
    write_processed_csv,
    write_timeline_csv,
    write_features_csv,
    write_values_csv,
    write_metrics_csv,
    write_summary_csv,
    metrics_frame,
    summary_frame,
)
from .model_store import ModelSet, save_models, load_models

__all__ = [
    'fmt',
    'write_stream_csv',
    'write_processed_csv',
    'write_timeline_csv',
    'write_features_csv',
    'write_values_csv',
    'write_metrics_csv',
    'write_summary_csv',
    'metrics_frame',
    'summary_frame',
    'ModelSet',
    'save_models',
    'load_models',
]
