"""Synthetic timelines, signals and confidence streams"""

from .config import GeneratorConfig, ALL_PAIRS, RNG_STREAMS
from .timeline import all_pairs_circuit, schedule_classes, gen_timeline, crossfade_weight, mixture_at, frame_mixture
from .emg import gen_emg, emg_envelope, gen_training_signal, signal_length
from .confidence import (
    gen_confidence_stream,
    gen_latent_features,
    gen_training_features,
    gen_mean_mav,
    gen_rest_amplitudes,
    gen_synthetic_stream,
    class_means,
    target_confidences,
    steady_blips,
)

__all__ = [
    'GeneratorConfig',
    'ALL_PAIRS',
    'RNG_STREAMS',
    'all_pairs_circuit',
    'schedule_classes',
    'gen_timeline',
    'crossfade_weight',
    'mixture_at',
    'frame_mixture',
    'gen_emg',
    'emg_envelope',
    'gen_training_signal',
    'signal_length',
    'gen_confidence_stream',
    'gen_latent_features',
    'gen_training_features',
    'gen_mean_mav',
    'gen_rest_amplitudes',
    'gen_synthetic_stream',
    'class_means',
    'target_confidences',
    'steady_blips',
]
