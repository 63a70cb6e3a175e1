# File: dsqi_bench/synthesis/emg.py
"""Amplitude-modulated Gaussian noise standing in for recorded EMG"""

import logging
from typing import Tuple

import numpy as np

from features.windowing import frame_geometry, ms_to_samples
from models.timeline import GroundTruthTimeline
from synthesis.config import GeneratorConfig
from synthesis.timeline import mixture_at

logger = logging.getLogger(__name__)


def signal_length(n_frames: int, frame_samples: int, stride: int) -> int:
    """Samples needed for exactly ``n_frames`` frames"""
    return (n_frames - 1) * stride + frame_samples


def emg_envelope(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> np.ndarray:
    """Per-sample per-channel RMS level implied by the timeline

    Each sample takes the class mixture of the frame it completes, so frame
    i ends where the timeline says frame i is; transitions cross-fade the
    class profiles.
    """
    frame_samples, stride = frame_geometry(cfg.frame_length_ms, cfg.increment_ms, cfg.sample_rate_hz)
    n_samples = signal_length(timeline.n_frames, frame_samples, stride)
    positions = (np.arange(n_samples) - frame_samples + 1) / stride
    source, target, weight = mixture_at(timeline, positions, cfg.transition_shape)
    profiles = cfg.profiles()
    return (1.0 - weight)[:, None] * profiles[source - 1] + weight[:, None] * profiles[target - 1]


def gen_emg(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> np.ndarray:
    """Zero-mean Gaussian noise scaled by the class amplitude envelope

    Returns:
        (n_samples, N_CH) signal that cuts into exactly ``timeline.n_frames``
        frames
    """
    envelope = emg_envelope(cfg, timeline)
    signal = cfg.rng("emg").standard_normal(envelope.shape) * envelope
    logger.info("Generated %d samples on %d channels", signal.shape[0], signal.shape[1])
    return signal


def gen_training_signal(cfg: GeneratorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Recording holding every class in turn for ``steady_ms``

    Returns:
        Tuple of the (n_samples, N_CH) signal and the per-sample class labels
    """
    hold = ms_to_samples(cfg.steady_ms, cfg.sample_rate_hz, "steady duration")
    labels = np.repeat(np.arange(1, cfg.n_classes + 1), hold)
    envelope = cfg.profiles()[labels - 1]
    signal = cfg.rng("training_signal").standard_normal(envelope.shape) * envelope
    return signal, labels
