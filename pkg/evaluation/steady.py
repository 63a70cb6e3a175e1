# File: dsqi_bench/evaluation/steady.py
"""Steady-state metrics: active error rate, total error rate and instability"""

import math
from typing import Tuple

import numpy as np

from models.timeline import GroundTruthTimeline


def instability(decisions: np.ndarray) -> float:
    """Decision changes per adjacent frame pair; 0 for fewer than two frames"""
    if decisions.shape[0] < 2:
        return 0.0
    return float(np.count_nonzero(decisions[1:] != decisions[:-1]) / (decisions.shape[0] - 1))


def steady_metrics(decisions: np.ndarray, timeline: GroundTruthTimeline, nm_class: int) -> Tuple[float, float, float]:
    """AER, TER and INS averaged over the steady segments of a trial

    Within a segment of class k, TER is the fraction of outputs differing
    from k. AER is taken over active-class segments only and counts outputs
    of a different active class, so rejections to NM do not add to it. INS
    is the rate of decision changes. Each metric is computed per segment and
    averaged with equal weight per segment.

    Args:
        decisions: (N,) processed decisions
        timeline: Ground truth covering exactly N frames
        nm_class: The No Motion class

    Returns:
        Tuple (AER, TER, INS); NaN when the timeline has no steady segment,
        AER alone NaN when every steady segment is NM

    Raises:
        AlignmentError: If the timeline does not cover the stream
    """
    decisions = np.asarray(decisions)
    timeline.check_covers(decisions.shape[0])
    segments = timeline.steady_segments()
    if not segments:
        return math.nan, math.nan, math.nan
    aer, ter, ins = [], [], []
    for seg in segments:
        out = decisions[seg.start_frame:seg.end_frame]
        wrong = out != seg.class_id
        ter.append(np.mean(wrong))
        ins.append(instability(out))
        if seg.class_id != nm_class:
            aer.append(np.mean(wrong & (out != nm_class)))
    active = float(np.mean(aer)) if aer else math.nan
    return active, float(np.mean(ter)), float(np.mean(ins))
