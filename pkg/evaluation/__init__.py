"""Steady-state and transition metrics over processed decision streams"""

from .steady import steady_metrics, instability
from .transitions import (
    BOUND_VOTE_WIDTH,
    TransitionResult,
    centered_majority,
    detect_bounds,
    transition_metrics,
    transition_results,
)
from .report import evaluate_stream, aggregate, check_alignment

__all__ = [
    'steady_metrics',
    'instability',
    'BOUND_VOTE_WIDTH',
    'TransitionResult',
    'centered_majority',
    'detect_bounds',
    'transition_metrics',
    'transition_results',
    'evaluate_stream',
    'aggregate',
    'check_alignment',
]
