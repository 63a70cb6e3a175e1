# File: dsqi_bench/evaluation/transitions.py
"""Transition bound detection and transition metrics"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.exceptions import ArgumentError
from evaluation.steady import instability
from models.timeline import TRANSITION, GroundTruthTimeline, Segment

logger = logging.getLogger(__name__)

#: Frames in the centered vote used to suppress blips before bound detection.
BOUND_VOTE_WIDTH = 9


def centered_majority(decisions: np.ndarray, width: int = BOUND_VOTE_WIDTH) -> np.ndarray:
    """Majority vote over a centered window, truncated at the stream edges

    Ties go to the class seen latest in the window.
    """
    if width < 1 or width % 2 == 0:
        raise ArgumentError(f"vote width must be a positive odd number, got {width}")
    decisions = np.asarray(decisions, dtype=np.int64)
    n = decisions.shape[0]
    if n == 0:
        return decisions.copy()
    n_classes = int(decisions.max()) + 1
    half = width // 2
    rows = np.arange(n)
    counts = np.zeros((n, n_classes), dtype=np.int64)
    latest = np.full((n, n_classes), -half - 1, dtype=np.int64)
    for offset in range(-half, half + 1):
        source = rows + offset
        valid = (source >= 0) & (source < n)
        idx = rows[valid]
        cls = decisions[source[valid]]
        counts[idx, cls] += 1
        latest[idx, cls] = offset
    modal = counts == counts.max(axis=1, keepdims=True)
    return np.argmax(np.where(modal, latest, -half - 2), axis=1).astype(np.int64)


def detect_bounds(
    decisions: np.ndarray,
    timeline: GroundTruthTimeline,
    segment: Segment,
    smoothed: Optional[np.ndarray] = None,
) -> Tuple[Optional[int], Optional[int]]:
    """Offset and onset frames of one transition

    The offset is the first frame at or after the entry bound whose 9-frame
    centered vote differs from the departing class; the onset is the first
    frame at or after the exit bound whose vote equals the target class.

    Args:
        decisions: (N,) processed decisions
        timeline: Timeline the segment belongs to
        segment: A transition segment of ``timeline``
        smoothed: Precomputed centered vote of ``decisions``

    Returns:
        Tuple (offset_frame, onset_frame); either is None when not found
        before the end of the stream
    """
    if segment.kind != TRANSITION or segment not in timeline.segments:
        raise ArgumentError(f"segment at frame {segment.start_frame} is not a transition of this timeline")
    if smoothed is None:
        smoothed = centered_majority(decisions)
    return (
        _first(smoothed[segment.entry_bound:] != segment.from_class, segment.entry_bound),
        _first(smoothed[segment.exit_bound:] == segment.to_class, segment.exit_bound),
    )


@dataclass
class TransitionResult:
    """Metrics of one transition; delays in ms"""
    segment: Segment
    offset_frame: Optional[int]
    onset_frame: Optional[int]
    t_offset: float = math.nan
    t_onset: float = math.nan
    t_transition: float = math.nan
    ins: float = math.nan
    tce: float = math.nan
    pnm: float = math.nan

    @property
    def excluded(self) -> bool:
        return self.onset_frame is None


def transition_results(
    decisions: np.ndarray,
    timeline: GroundTruthTimeline,
    nm_class: int,
    increment_ms: float = 16.0,
) -> List[TransitionResult]:
    """Per-transition bounds, delays and window metrics

    The transition window is [offset, onset), with the entry bound standing
    in for an undetected offset. TCE is the fraction of window frames whose
    output is neither endpoint class nor NM; PNM the fraction equal to NM;
    INS the change rate inside the window. A transition with no detectable
    onset keeps NaN metrics and counts as excluded.
    """
    decisions = np.asarray(decisions, dtype=np.int64)
    timeline.check_covers(decisions.shape[0])
    smoothed = centered_majority(decisions)
    results = []
    for seg in timeline.transitions():
        offset, onset = detect_bounds(decisions, timeline, seg, smoothed)
        result = TransitionResult(seg, offset, onset)
        if onset is None:
            logger.debug("No onset detected for transition %d->%d at frame %d",
                         seg.from_class, seg.to_class, seg.start_frame)
            results.append(result)
            continue
        start = seg.entry_bound if offset is None else offset
        result.t_onset = (onset - seg.exit_bound) * increment_ms
        if offset is not None:
            result.t_offset = (offset - seg.entry_bound) * increment_ms
            result.t_transition = (onset - offset) * increment_ms
        window = decisions[start:onset]
        if window.shape[0] == 0:
            result.tce = result.pnm = result.ins = 0.0
        else:
            endpoint = (window == seg.from_class) | (window == seg.to_class) | (window == nm_class)
            result.tce = float(np.mean(~endpoint))
            result.pnm = float(np.mean(window == nm_class))
            result.ins = instability(window)
        results.append(result)
    return results


def transition_metrics(
    decisions: np.ndarray,
    timeline: GroundTruthTimeline,
    nm_class: int,
    increment_ms: float = 16.0,
) -> Dict[str, float]:
    """Transition metrics averaged over the detectable transitions of a trial

    Returns:
        Dict with t_offset, t_onset, t_transition (ms), transition_ins, tce,
        pnm, n_transitions (included) and n_excluded. Averages are NaN when
        no transition is included.
    """
    results = transition_results(decisions, timeline, nm_class, increment_ms)
    included = [r for r in results if not r.excluded]
    summary = {
        "t_offset": _nanmean([r.t_offset for r in included]),
        "t_onset": _nanmean([r.t_onset for r in included]),
        "t_transition": _nanmean([r.t_transition for r in included]),
        "transition_ins": _nanmean([r.ins for r in included]),
        "tce": _nanmean([r.tce for r in included]),
        "pnm": _nanmean([r.pnm for r in included]),
        "n_transitions": len(included),
        "n_excluded": len(results) - len(included),
    }
    if summary["n_excluded"]:
        logger.info("%d of %d transitions excluded (no onset)", summary["n_excluded"], len(results))
    return summary


def _first(mask: np.ndarray, base: int) -> Optional[int]:
    hits = np.flatnonzero(mask)
    return None if hits.size == 0 else base + int(hits[0])


def _nanmean(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    values = values[~np.isnan(values)]
    return float(values.mean()) if values.size else math.nan
