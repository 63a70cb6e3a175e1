# File: dsqi_bench/writers/csv_writer.py
"""CSV writers for streams, timelines, processed decisions and metric tables"""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from core.exceptions import ConfigurationError
from models.stream_model import DecisionStream, ProcessedStream
from models.timeline import GroundTruthTimeline, MetricsReport, STEADY

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"

METRIC_COLUMNS = (
    "scheme", "scope", "n_segments", "n_excluded",
    "aer", "ter", "ins", "t_offset", "t_onset", "t_transition", "tce", "pnm",
)


def fmt(value: float) -> str:
    """Nine significant digits; NaN becomes an empty field"""
    value = float(value)
    return "" if math.isnan(value) else FLOAT_FORMAT % value


def ensure_parent(path: str) -> Path:
    """Create the parent directory of ``path``

    Raises:
        ConfigurationError: If the directory cannot be created
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"cannot create output directory {target.parent}: {e.strerror}") from e
    return target


def _write_rows(path: str, header: Sequence[str], rows) -> None:
    target = ensure_parent(path)
    try:
        with open(target, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ConfigurationError(f"cannot write {target}: {e.strerror}") from e


def stream_header(stream: DecisionStream) -> List[str]:
    header = ["frame", "ts_ms", "true_class", "y_hat"]
    header += [f"c_{k}" for k in range(1, stream.n_classes + 1)]
    if stream.mean_mav is not None:
        header.append("mean_mav")
    if stream.features is not None:
        header += [f"x_{j}" for j in range(1, stream.features.shape[1] + 1)]
    return header


def _stream_fields(stream: DecisionStream, i: int) -> List[str]:
    fields = [str(int(stream.frame_index[i])), fmt(stream.ts_ms[i]),
              str(int(stream.true_class[i])), str(int(stream.decisions[i]))]
    fields += [fmt(c) for c in stream.confidences[i]]
    if stream.mean_mav is not None:
        fields.append(fmt(stream.mean_mav[i]))
    if stream.features is not None:
        fields += [fmt(x) for x in stream.features[i]]
    return fields


def write_stream_csv(path: str, stream: DecisionStream) -> None:
    """Write ``frame,ts_ms,true_class,y_hat,c_1..c_K`` plus optional mean_mav and x_1..x_d"""
    _write_rows(path, stream_header(stream), (_stream_fields(stream, i) for i in range(len(stream))))
    logger.info("Wrote stream of %d frames to %s", len(stream), path)


def write_processed_csv(path: str, stream: DecisionStream, processed: ProcessedStream) -> None:
    """Write the input stream columns plus ``y_tilde,rejected,threshold``"""
    if len(processed) != len(stream):
        raise ConfigurationError(f"processed stream has {len(processed)} rows, input has {len(stream)}")
    rows = (
        _stream_fields(stream, i) + [
            str(int(processed.decisions[i])),
            "1" if processed.rejected[i] else "0",
            fmt(processed.thresholds[i]),
        ]
        for i in range(len(stream))
    )
    _write_rows(path, stream_header(stream) + ["y_tilde", "rejected", "threshold"], rows)


def write_timeline_csv(path: str, timeline: GroundTruthTimeline) -> None:
    """Write ``kind,start_frame,end_frame,class,from_class,to_class``"""

    def cell(value: Optional[int]) -> str:
        return "" if value is None else str(value)

    rows = [
        [seg.kind, str(seg.start_frame), str(seg.end_frame),
         cell(seg.class_id), cell(seg.from_class), cell(seg.to_class)]
        for seg in timeline
    ]
    _write_rows(path, ["kind", "start_frame", "end_frame", "class", "from_class", "to_class"], rows)


def write_features_csv(path: str, features: np.ndarray, labels: np.ndarray) -> None:
    """Write labeled features ``label,x_1..x_d``"""
    header = ["label"] + [f"x_{j}" for j in range(1, features.shape[1] + 1)]
    rows = ([str(int(label))] + [fmt(x) for x in row] for label, row in zip(labels, features))
    _write_rows(path, header, rows)


def write_values_csv(path: str, column: str, values: np.ndarray) -> None:
    _write_rows(path, [column], ([fmt(v)] for v in values))


def metrics_frame(reports: Mapping[str, MetricsReport]) -> pd.DataFrame:
    """Long-form table: one row per (scheme, scope) with scope in {steady, transition}"""
    rows: List[Dict[str, object]] = []
    for scheme, report in reports.items():
        rows.append({
            "scheme": scheme, "scope": STEADY, "n_segments": report.n_steady, "n_excluded": 0,
            "aer": report.aer, "ter": report.ter, "ins": report.steady_ins,
        })
        rows.append({
            "scheme": scheme, "scope": "transition", "n_segments": report.n_transitions,
            "n_excluded": report.n_excluded, "ins": report.transition_ins,
            "t_offset": report.t_offset, "t_onset": report.t_onset, "t_transition": report.t_transition,
            "tce": report.tce, "pnm": report.pnm,
        })
    return pd.DataFrame(rows, columns=list(METRIC_COLUMNS))


def summary_frame(reports: Mapping[str, MetricsReport]) -> pd.DataFrame:
    """Wide table: one row per scheme with every metric as a column"""
    frame = pd.DataFrame([{"scheme": scheme, **report.to_dict()} for scheme, report in reports.items()])
    return frame


def _write_frame(path: str, frame: pd.DataFrame) -> None:
    target = ensure_parent(path)
    try:
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    except OSError as e:
        raise ConfigurationError(f"cannot write {target}: {e.strerror}") from e


def write_metrics_csv(path: str, reports: Mapping[str, MetricsReport]) -> pd.DataFrame:
    frame = metrics_frame(reports)
    _write_frame(path, frame)
    logger.info("Wrote metrics for %d schemes to %s", len(reports), path)
    return frame


def write_summary_csv(path: str, reports: Mapping[str, MetricsReport]) -> pd.DataFrame:
    frame = summary_frame(reports)
    _write_frame(path, frame)
    return frame
