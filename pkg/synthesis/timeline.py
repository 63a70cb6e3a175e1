# File: dsqi_bench/synthesis/timeline.py
"""Ground-truth timelines and the class mixture they imply per frame"""

import logging
from typing import List, Tuple

import numpy as np

from core.exceptions import ArgumentError
from models.timeline import GroundTruthTimeline, Segment, STEADY
from synthesis.config import ALL_PAIRS, GeneratorConfig

logger = logging.getLogger(__name__)

#: Logistic slope of the sigmoid cross-fade over a unit transition.
SIGMOID_SLOPE = 10.0


def all_pairs_circuit(n_classes: int, start: int, rng: np.random.Generator) -> List[int]:
    """Class sequence traversing every ordered class pair exactly once

    An Eulerian circuit of the complete directed graph on the classes
    (Hierholzer), with neighbour order shuffled by ``rng``. The sequence
    starts and ends at ``start`` and has K(K-1) + 1 entries.
    """
    remaining = {
        k: [int(j) for j in rng.permutation([j for j in range(1, n_classes + 1) if j != k])]
        for k in range(1, n_classes + 1)
    }
    stack, circuit = [start], []
    while stack:
        node = stack[-1]
        if remaining[node]:
            stack.append(remaining[node].pop())
        else:
            circuit.append(stack.pop())
    return circuit[::-1]


def schedule_classes(cfg: GeneratorConfig) -> List[int]:
    """Resolve the configured schedule into the ordered list of held classes

    Raises:
        ArgumentError: If an explicit schedule repeats a class back to back
    """
    if cfg.schedule == ALL_PAIRS:
        return all_pairs_circuit(cfg.n_classes, cfg.nm_class, cfg.rng("timeline"))
    classes = list(cfg.schedule)
    if cfg.rest_between:
        rested = [classes[0]]
        for k in classes[1:]:
            if rested[-1] != cfg.nm_class and k != cfg.nm_class:
                rested.append(cfg.nm_class)
            rested.append(k)
        classes = rested
    for prev, k in zip(classes, classes[1:]):
        if prev == k:
            raise ArgumentError(f"schedule holds class {k} twice in a row")
    return classes


def gen_timeline(cfg: GeneratorConfig) -> GroundTruthTimeline:
    """Alternating steady and transition segments following the schedule

    Example:
        With K = 7 and the all-pairs schedule the timeline has 43 steady
        segments and 42 transitions.
    """
    classes = schedule_classes(cfg)
    segments, frame = [], 0
    for i, k in enumerate(classes):
        if i:
            segments.append(Segment.transition(frame, frame + cfg.transition_frames, classes[i - 1], k))
            frame += cfg.transition_frames
        segments.append(Segment.steady(frame, frame + cfg.steady_frames, k))
        frame += cfg.steady_frames
    timeline = GroundTruthTimeline(segments)
    logger.info("Generated timeline: %d frames, %d transitions", timeline.n_frames, len(timeline.transitions()))
    return timeline


def crossfade_weight(position: np.ndarray, length: int, shape: str = "linear") -> np.ndarray:
    """Weight of the target class at (fractional) frame ``position`` of a transition

    Linear weights run (p + 1) / (L + 1), strictly inside (0, 1); the sigmoid
    shape passes them through a logistic curve centred on the midpoint.
    """
    w = np.clip((np.asarray(position, dtype=np.float64) + 1.0) / (length + 1.0), 0.0, 1.0)
    if shape == "sigmoid":
        w = 1.0 / (1.0 + np.exp(-SIGMOID_SLOPE * (w - 0.5)))
    return w


def mixture_at(
    timeline: GroundTruthTimeline,
    positions: np.ndarray,
    shape: str = "linear",
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source class, target class and target weight at frame positions

    Args:
        timeline: Ground truth
        positions: Frame coordinates, possibly fractional, clipped to the timeline
        shape: Cross-fade shape

    Returns:
        Tuple of (source, target, weight) arrays; steady frames have
        source == target and weight 0
    """
    positions = np.clip(np.asarray(positions, dtype=np.float64), 0.0, timeline.n_frames - 1)
    starts = np.array([s.start_frame for s in timeline.segments])
    index = np.searchsorted(starts, np.floor(positions), side="right") - 1
    source = np.empty(positions.shape, dtype=np.int64)
    target = np.empty(positions.shape, dtype=np.int64)
    weight = np.zeros(positions.shape)
    for i, seg in enumerate(timeline.segments):
        inside = index == i
        if seg.kind == STEADY:
            source[inside] = target[inside] = seg.class_id
        else:
            source[inside] = seg.from_class
            target[inside] = seg.to_class
            weight[inside] = crossfade_weight(positions[inside] - seg.start_frame, seg.length, shape)
    return source, target, weight


def frame_mixture(timeline: GroundTruthTimeline, shape: str = "linear"):
    """mixture_at evaluated on every frame of the timeline"""
    return mixture_at(timeline, np.arange(timeline.n_frames), shape)
