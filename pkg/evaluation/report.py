# File: dsqi_bench/evaluation/report.py
"""Per-trial metric reports and their nested aggregation"""

import logging
import math
import warnings
from collections import OrderedDict
from dataclasses import fields
from typing import Hashable, List, Optional, Sequence, Union

import numpy as np

from core.exceptions import AlignmentError, ArgumentError
from evaluation.steady import steady_metrics
from evaluation.transitions import transition_metrics
from models.stream_model import ProcessedStream
from models.timeline import GroundTruthTimeline, MetricsReport

logger = logging.getLogger(__name__)

_COUNT_FIELDS = ("n_steady", "n_transitions", "n_excluded")


def check_alignment(frame_index: np.ndarray, timeline: GroundTruthTimeline) -> None:
    """Check that frame indices run 0..N-1 and the timeline spans them

    Raises:
        AlignmentError: Naming the first mismatching frame
    """
    frame_index = np.asarray(frame_index)
    expected = np.arange(frame_index.shape[0])
    mismatch = np.flatnonzero(frame_index != expected)
    if mismatch.size:
        first = int(mismatch[0])
        raise AlignmentError(
            f"frame index {int(frame_index[first])} found at row {first}", frame=first
        )
    timeline.check_covers(frame_index.shape[0])


def evaluate_stream(
    processed: Union[ProcessedStream, np.ndarray],
    timeline: GroundTruthTimeline,
    nm_class: int,
    increment_ms: float = 16.0,
) -> MetricsReport:
    """Steady-state and transition metrics of one processed trial

    Args:
        processed: Processed stream, or a bare (N,) decision array
        timeline: Ground truth of the trial
        nm_class: The No Motion class
        increment_ms: Frame period used to convert delays to ms

    Returns:
        MetricsReport of the trial

    Raises:
        AlignmentError: If frames and timeline do not line up
    """
    if isinstance(processed, ProcessedStream):
        check_alignment(processed.frame_index, timeline)
        decisions = processed.decisions
    else:
        decisions = np.asarray(processed, dtype=np.int64)
        timeline.check_covers(decisions.shape[0])
    aer, ter, ins = steady_metrics(decisions, timeline, nm_class)
    transitions = transition_metrics(decisions, timeline, nm_class, increment_ms)
    return MetricsReport(
        aer=aer,
        ter=ter,
        steady_ins=ins,
        n_steady=len(timeline.steady_segments()),
        **transitions,
    )


def aggregate(
    reports: Sequence[MetricsReport],
    grouping: Optional[Sequence[Hashable]] = None,
) -> MetricsReport:
    """Unweighted nested average of per-trial reports

    Without a grouping every report weighs the same. With a grouping (one
    participant key per report) reports are first averaged within each
    participant, then across participants. NaN entries are skipped; segment
    counts are summed.

    Raises:
        ArgumentError: On an empty report set or a grouping of the wrong length
    """
    reports = list(reports)
    if not reports:
        raise ArgumentError("cannot aggregate an empty set of reports")
    if grouping is None:
        return _mean_report(reports)
    grouping = list(grouping)
    if len(grouping) != len(reports):
        raise ArgumentError(f"grouping has {len(grouping)} entries for {len(reports)} reports")
    groups: "OrderedDict[Hashable, List[MetricsReport]]" = OrderedDict()
    for key, report in zip(grouping, reports):
        groups.setdefault(key, []).append(report)
    logger.debug("Aggregating %d reports over %d groups", len(reports), len(groups))
    return _mean_report([_mean_report(group) for group in groups.values()])


def _mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    values = {}
    for f in fields(MetricsReport):
        column = np.array([getattr(r, f.name) for r in reports], dtype=np.float64)
        if f.name in _COUNT_FIELDS:
            values[f.name] = int(column.sum())
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", category=RuntimeWarning)
            mean = np.nanmean(column)
        values[f.name] = math.nan if np.isnan(mean) else float(mean)
    return MetricsReport(**values)
