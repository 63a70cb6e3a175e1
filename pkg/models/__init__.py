"""Data models for frames, decision streams, scheme settings and timelines"""

from .stream_model import (
    EmgFrame,
    FeatureVector,
    ConfidenceVector,
    DecisionPoint,
    ClassCatalog,
    Tick,
    ProcessedDecision,
    DecisionStream,
    ProcessedStream,
)
from .scheme_config import SchemeConfig, SCHEME_NAMES
from .timeline import Segment, GroundTruthTimeline, MetricsReport, STEADY, TRANSITION

__all__ = [
    'EmgFrame',
    'FeatureVector',
    'ConfidenceVector',
    'DecisionPoint',
    'ClassCatalog',
    'Tick',
    'ProcessedDecision',
    'DecisionStream',
    'ProcessedStream',
    'SchemeConfig',
    'SCHEME_NAMES',
    'Segment',
    'GroundTruthTimeline',
    'MetricsReport',
    'STEADY',
    'TRANSITION',
]
