# File: dsqi_bench/synthesis/confidence.py
"""Synthetic confidence streams, latent features and amplitude envelopes"""

import logging
import math
from dataclasses import replace
from typing import Tuple

import numpy as np

from models.stream_model import DecisionStream
from models.timeline import GroundTruthTimeline
from synthesis.config import CONFIDENCE_FLOOR, GeneratorConfig
from synthesis.timeline import frame_mixture

logger = logging.getLogger(__name__)

#: Mean absolute value of a unit-RMS zero-mean Gaussian.
GAUSSIAN_MAV = math.sqrt(2.0 / math.pi)


def steady_blips(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> np.ndarray:
    """Wrong class shown on each frame of a steady-state error burst, 0 elsewhere

    Each steady frame starts a burst with probability ``blip_rate``. A burst
    lasts 1..``blip_frames`` frames, shows one class other than the held
    class and ends early at the edge of its segment.

    Returns:
        (N,) int array
    """
    blips = np.zeros(timeline.n_frames, dtype=np.int64)
    if cfg.blip_rate <= 0:
        return blips
    labels = timeline.frame_labels()
    segment_end = np.zeros(timeline.n_frames, dtype=np.int64)
    for seg in timeline.steady_segments():
        segment_end[seg.start_frame:seg.end_frame] = seg.end_frame
    rng = cfg.rng("blips")
    starts = np.flatnonzero((labels > 0) & (rng.random(timeline.n_frames) < cfg.blip_rate))
    lengths = rng.integers(1, cfg.blip_frames + 1, size=starts.size)
    # a shift in 1..K-1 never lands back on the held class
    wrong = (labels[starts] - 1 + rng.integers(1, cfg.n_classes, size=starts.size)) % cfg.n_classes + 1
    for start, length, k in zip(starts.tolist(), lengths.tolist(), wrong.tolist()):
        blips[start:min(start + length, segment_end[start])] = k
    logger.debug("Placed %d steady-state error bursts", starts.size)
    return blips


def _blend_blips(cfg: GeneratorConfig, held: np.ndarray, blips: np.ndarray, points: np.ndarray) -> None:
    """Move ``blip_weight`` of each burst frame's row from the held class point to the wrong class point"""
    shown = blips > 0
    if shown.any():
        held[shown] = (1.0 - cfg.blip_weight) * held[shown] + cfg.blip_weight * points[blips[shown] - 1]


def target_confidences(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> Tuple[np.ndarray, np.ndarray]:
    """Floored cross-fade confidence targets per frame and the steady-frame mask

    Frames inside steady-state error bursts lean towards the burst class.
    """
    source, target, weight = frame_mixture(timeline, cfg.transition_shape)
    eye = np.eye(cfg.n_classes)
    mixed = (1.0 - weight)[:, None] * eye[source - 1] + weight[:, None] * eye[target - 1]
    _blend_blips(cfg, mixed, steady_blips(cfg, timeline), eye)
    floored = (1.0 - CONFIDENCE_FLOOR) * mixed + CONFIDENCE_FLOOR / cfg.n_classes
    return floored, source == target


def gen_confidence_stream(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> DecisionStream:
    """Draw one confidence vector per frame around the ground-truth target

    Steady frames draw from a Dirichlet with concentration
    ``steady_concentration`` around the floored one-hot of the held class.
    Transition frames draw around the floored cross-fade with concentration
    ``transition_concentration / volatility``, so volatility 0 reproduces
    the cross-fade exactly and larger volatility spreads the draws further.

    Returns:
        DecisionStream with ground-truth labels (0 inside transitions)
    """
    floored, steady = target_confidences(cfg, timeline)
    concentration = np.where(steady, cfg.steady_concentration, np.inf)
    if cfg.volatility > 0:
        concentration = np.where(steady, concentration, cfg.transition_concentration / cfg.volatility)
    drawn = np.isfinite(concentration)
    confidences = floored.copy()
    gamma = cfg.rng("confidence").standard_gamma(concentration[drawn, None] * floored[drawn])
    totals = gamma.sum(axis=1, keepdims=True)
    usable = totals[:, 0] > 0
    sampled = floored[drawn]
    sampled[usable] = gamma[usable] / totals[usable]
    confidences[drawn] = sampled
    confidences /= confidences.sum(axis=1, keepdims=True)
    logger.info("Generated confidence stream of %d frames (volatility %g)", len(confidences), cfg.volatility)
    return DecisionStream(
        confidences=confidences,
        true_class=timeline.frame_labels(),
        increment_ms=cfg.increment_ms,
        generative=cfg.generative,
    )


def class_means(cfg: GeneratorConfig) -> np.ndarray:
    """Latent class means on separate axes, ``class_separation`` from the origin"""
    means = np.zeros((cfg.n_classes, cfg.feature_dim))
    means[np.arange(cfg.n_classes), np.arange(cfg.n_classes)] = cfg.class_separation
    return means


def gen_latent_features(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> np.ndarray:
    """Per-frame latent feature vectors (N, d)

    Steady frames are unit-variance Gaussians around the class mean.
    Transition frames follow the cross-fade of the two means, with a spread
    that grows by ``volatility`` at the midpoint of the transition.
    Frames inside steady-state error bursts shift towards the burst class mean.
    """
    source, target, weight = frame_mixture(timeline, cfg.transition_shape)
    means = class_means(cfg)
    centre = (1.0 - weight)[:, None] * means[source - 1] + weight[:, None] * means[target - 1]
    _blend_blips(cfg, centre, steady_blips(cfg, timeline), means)
    spread = 1.0 + cfg.volatility * 4.0 * weight * (1.0 - weight)
    noise = cfg.rng("features").standard_normal(centre.shape)
    return centre + spread[:, None] * noise


def gen_training_features(cfg: GeneratorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Labeled steady-state latent features, ``training_frames`` per class"""
    labels = np.repeat(np.arange(1, cfg.n_classes + 1), cfg.training_frames)
    means = class_means(cfg)
    features = means[labels - 1] + cfg.rng("training").standard_normal((labels.size, cfg.feature_dim))
    return features, labels


def _amplitude_levels(cfg: GeneratorConfig) -> np.ndarray:
    return cfg.profiles().mean(axis=1) * GAUSSIAN_MAV


def gen_mean_mav(cfg: GeneratorConfig, timeline: GroundTruthTimeline) -> np.ndarray:
    """Per-frame mean-MAV envelope following the class amplitude profiles"""
    source, target, weight = frame_mixture(timeline, cfg.transition_shape)
    levels = _amplitude_levels(cfg)
    envelope = (1.0 - weight) * levels[source - 1] + weight * levels[target - 1]
    noise = cfg.rng("mean_mav").standard_normal(envelope.shape)
    return np.clip(envelope * (1.0 + cfg.amplitude_noise * noise), 0.0, None)


def gen_rest_amplitudes(cfg: GeneratorConfig) -> np.ndarray:
    """NM mean-MAV calibration values, ``training_frames`` of them"""
    level = _amplitude_levels(cfg)[cfg.nm_class - 1]
    noise = cfg.rng("rest").standard_normal(cfg.training_frames)
    return np.clip(level * (1.0 + cfg.amplitude_noise * noise), 0.0, None)


def gen_synthetic_stream(
    cfg: GeneratorConfig,
    timeline: GroundTruthTimeline,
    with_features: bool = True,
    with_mean_mav: bool = True,
) -> DecisionStream:
    """Confidence stream with optional latent features and amplitude envelope attached"""
    stream = gen_confidence_stream(cfg, timeline)
    return replace(
        stream,
        features=gen_latent_features(cfg, timeline) if with_features else None,
        mean_mav=gen_mean_mav(cfg, timeline) if with_mean_mav else None,
    )
