# File: dsqi_bench/models/timeline.py
"""Data models for ground-truth timelines and metric reports"""

import math
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import AlignmentError, ArgumentError

STEADY = "steady"
TRANSITION = "transition"


@dataclass(frozen=True)
class Segment:
    """One steady-state or transition segment over frames [start_frame, end_frame)"""
    kind: str
    start_frame: int
    end_frame: int
    class_id: Optional[int] = None
    from_class: Optional[int] = None
    to_class: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (STEADY, TRANSITION):
            raise ArgumentError(f"segment kind must be '{STEADY}' or '{TRANSITION}', got '{self.kind}'")
        if not 0 <= self.start_frame < self.end_frame:
            raise ArgumentError(f"invalid segment bounds [{self.start_frame}, {self.end_frame})")
        if self.kind == STEADY and self.class_id is None:
            raise ArgumentError("steady segment needs a class")
        if self.kind == TRANSITION and (self.from_class is None or self.to_class is None):
            raise ArgumentError("transition segment needs from_class and to_class")

    @property
    def length(self) -> int:
        return self.end_frame - self.start_frame

    @property
    def entry_bound(self) -> int:
        """First frame of a transition"""
        return self.start_frame

    @property
    def exit_bound(self) -> int:
        """First frame after a transition"""
        return self.end_frame

    @classmethod
    def steady(cls, start: int, end: int, class_id: int) -> 'Segment':
        return cls(STEADY, start, end, class_id=class_id)

    @classmethod
    def transition(cls, start: int, end: int, from_class: int, to_class: int) -> 'Segment':
        return cls(TRANSITION, start, end, from_class=from_class, to_class=to_class)


class GroundTruthTimeline:
    """Ordered, contiguous, alternating steady/transition segments"""

    def __init__(self, segments: Sequence[Segment]):
        """Initialize and validate a timeline

        Args:
            segments: Segments in time order

        Raises:
            ArgumentError: If segments are empty, overlap, leave gaps or do not
                alternate between steady and transition
        """
        if not segments:
            raise ArgumentError("timeline needs at least one segment")
        self.segments: Tuple[Segment, ...] = tuple(segments)
        for prev, seg in zip(self.segments, self.segments[1:]):
            if seg.start_frame != prev.end_frame:
                raise ArgumentError(
                    f"segments must be contiguous: [{prev.start_frame}, {prev.end_frame}) "
                    f"followed by [{seg.start_frame}, {seg.end_frame})"
                )
            if seg.kind == prev.kind:
                raise ArgumentError(f"segments must alternate, found two '{seg.kind}' segments at frame {seg.start_frame}")
            if seg.kind == TRANSITION and seg.from_class != prev.class_id:
                raise ArgumentError(f"transition at frame {seg.start_frame} does not leave class {prev.class_id}")
            if prev.kind == TRANSITION and seg.class_id != prev.to_class:
                raise ArgumentError(f"steady segment at frame {seg.start_frame} is not the transition target {prev.to_class}")

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroundTruthTimeline) and self.segments == other.segments

    @property
    def start_frame(self) -> int:
        return self.segments[0].start_frame

    @property
    def n_frames(self) -> int:
        """Exclusive end frame of the last segment"""
        return self.segments[-1].end_frame

    def steady_segments(self) -> List[Segment]:
        return [s for s in self.segments if s.kind == STEADY]

    def transitions(self) -> List[Segment]:
        return [s for s in self.segments if s.kind == TRANSITION]

    def frame_labels(self) -> np.ndarray:
        """Ground-truth class per frame; 0 inside transitions"""
        labels = np.zeros(self.n_frames, dtype=np.int64)
        for seg in self.steady_segments():
            labels[seg.start_frame:seg.end_frame] = seg.class_id
        return labels

    def check_covers(self, n_frames: int) -> None:
        """Check that the timeline spans a stream of ``n_frames`` frames

        Raises:
            AlignmentError: If the lengths differ
        """
        if self.start_frame != 0 or self.n_frames != n_frames:
            frame = min(self.n_frames, n_frames) if self.start_frame == 0 else 0
            raise AlignmentError(
                f"timeline covers frames [{self.start_frame}, {self.n_frames}) "
                f"but the stream has {n_frames} frames",
                frame=frame,
            )


@dataclass
class MetricsReport:
    """Steady-state and transition metrics of one trial (or an aggregate)

    Delays are in milliseconds and NaN when no transition was detectable.
    """
    aer: float = 0.0
    ter: float = 0.0
    steady_ins: float = 0.0
    t_offset: float = math.nan
    t_onset: float = math.nan
    t_transition: float = math.nan
    transition_ins: float = 0.0
    tce: float = 0.0
    pnm: float = 0.0
    n_steady: int = 0
    n_transitions: int = 0
    n_excluded: int = 0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)
