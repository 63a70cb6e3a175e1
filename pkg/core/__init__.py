"""Core abstract base classes and error types"""

from .base import FeatureExtractor, Classifier, StreamProcessor
from .exceptions import (
    DsqiError,
    ConfigurationError,
    UsageError,
    ArgumentError,
    EmptyStreamError,
    UnsupportedSchemeError,
    InvariantError,
    FeatureExtractionError,
    EvaluationError,
    TrainingError,
    ParseError,
    AlignmentError,
)

__all__ = [
    'FeatureExtractor',
    'Classifier',
    'StreamProcessor',
    'DsqiError',
    'ConfigurationError',
    'UsageError',
    'ArgumentError',
    'EmptyStreamError',
    'UnsupportedSchemeError',
    'InvariantError',
    'FeatureExtractionError',
    'EvaluationError',
    'TrainingError',
    'ParseError',
    'AlignmentError',
]
