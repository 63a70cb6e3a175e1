# File: dsqi_bench/parsers/stream_reader.py
"""Readers for stream, timeline, processed-decision and feature CSV files"""

import csv
import logging
import math
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import ArgumentError, ParseError
from models.stream_model import DecisionStream, ProcessedStream
from models.timeline import GroundTruthTimeline, Segment, STEADY, TRANSITION

logger = logging.getLogger(__name__)

STREAM_BASE_COLUMNS = ("frame", "ts_ms", "true_class", "y_hat")
PROCESSED_COLUMNS = ("y_tilde", "rejected", "threshold")
TIMELINE_COLUMNS = ("kind", "start_frame", "end_frame", "class", "from_class", "to_class")

DEFAULT_INCREMENT_MS = 16.0


def _rows(path: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, fields) of a CSV file, skipping blank lines"""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot open file: {e.strerror}", path=path) from e
    with handle:
        for line_no, fields in enumerate(csv.reader(handle), start=1):
            if fields:
                yield line_no, fields


def _number(text: str, cast: Callable, path: str, line: int, column: str):
    try:
        return cast(text)
    except ValueError:
        raise ParseError(f"column '{column}': cannot parse '{text}'", path=path, line=line) from None


def _optional_int(text: str, path: str, line: int, column: str) -> Optional[int]:
    return None if text.strip() == "" else _number(text, int, path, line, column)


def _indexed_columns(header: Sequence[str], prefix: str, start: int) -> int:
    """Count consecutive columns prefix1, prefix2, ... beginning at ``start``"""
    count = 0
    while start + count < len(header) and header[start + count] == f"{prefix}{count + 1}":
        count += 1
    return count


def read_stream_csv(path: str, generative: bool = True) -> DecisionStream:
    """Read a confidence-stream CSV

    The header is ``frame,ts_ms,true_class,y_hat,c_1..c_K`` optionally
    followed by ``mean_mav`` and ``x_1..x_d``; further columns (such as those
    of a processed file) are ignored. Confidences are renormalized to absorb
    print rounding, and a warning is logged where ``y_hat`` disagrees with
    the recomputed argmax.

    Raises:
        ParseError: On a malformed header or row, naming the line
    """
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", path=path, line=1) from None
    header = [h.strip() for h in header]
    if tuple(header[:4]) != STREAM_BASE_COLUMNS:
        raise ParseError(f"header must start with {','.join(STREAM_BASE_COLUMNS)}", path=path, line=1)
    n_classes = _indexed_columns(header, "c_", 4)
    if n_classes < 2:
        raise ParseError("header needs at least two confidence columns c_1, c_2", path=path, line=1)
    col = 4 + n_classes
    mav_col = col if col < len(header) and header[col] == "mean_mav" else None
    if mav_col is not None:
        col += 1
    n_features = _indexed_columns(header, "x_", col)
    feature_col = col if n_features else None

    frames, ts, truth, y_hat, conf, mav, feats = [], [], [], [], [], [], []
    for line, fields in rows:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", path=path, line=line)
        frames.append(_number(fields[0], int, path, line, "frame"))
        ts.append(_number(fields[1], float, path, line, "ts_ms"))
        truth.append(_number(fields[2], int, path, line, "true_class"))
        y_hat.append(_number(fields[3], int, path, line, "y_hat"))
        row = [_number(fields[4 + k], float, path, line, f"c_{k + 1}") for k in range(n_classes)]
        if any(not math.isfinite(c) or c < 0 for c in row) or sum(row) <= 0:
            raise ParseError("confidences must be finite, non-negative and not all zero", path=path, line=line)
        conf.append(row)
        if mav_col is not None:
            mav.append(_number(fields[mav_col], float, path, line, "mean_mav"))
        if feature_col is not None:
            feats.append([_number(fields[feature_col + j], float, path, line, f"x_{j + 1}")
                          for j in range(n_features)])
    if not frames:
        raise ParseError("no data rows", path=path, line=2)

    confidences = np.asarray(conf, dtype=np.float64)
    confidences /= confidences.sum(axis=1, keepdims=True)
    ts_ms = np.asarray(ts)
    increment = float(ts_ms[1] - ts_ms[0]) if len(ts_ms) > 1 and ts_ms[1] > ts_ms[0] else DEFAULT_INCREMENT_MS
    stream = DecisionStream(
        confidences=confidences,
        frame_index=np.asarray(frames, dtype=np.int64),
        ts_ms=ts_ms,
        true_class=np.asarray(truth, dtype=np.int64),
        mean_mav=np.asarray(mav) if mav_col is not None else None,
        features=np.asarray(feats) if feature_col is not None else None,
        increment_ms=increment,
        generative=generative,
    )
    disagree = np.flatnonzero(stream.decisions != np.asarray(y_hat))
    if disagree.size:
        logger.warning("%s: y_hat differs from the confidence argmax on %d rows (first at frame %d)",
                       path, disagree.size, int(stream.frame_index[disagree[0]]))
    logger.info("Read %d frames, %d classes from %s", len(stream), n_classes, path)
    return stream


def read_processed_csv(path: str) -> ProcessedStream:
    """Read a processed-decision CSV (stream columns plus y_tilde, rejected, threshold)

    Raises:
        ParseError: On a malformed header or row
    """
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", path=path, line=1) from None
    header = [h.strip() for h in header]
    try:
        frame_col = header.index("frame")
        cols = [header.index(name) for name in PROCESSED_COLUMNS]
    except ValueError:
        raise ParseError(f"header needs frame,{','.join(PROCESSED_COLUMNS)}", path=path, line=1) from None
    frames, decisions, rejected, thresholds = [], [], [], []
    for line, fields in rows:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", path=path, line=line)
        frames.append(_number(fields[frame_col], int, path, line, "frame"))
        decisions.append(_number(fields[cols[0]], int, path, line, "y_tilde"))
        flag = fields[cols[1]].strip()
        if flag not in ("0", "1"):
            raise ParseError(f"column 'rejected' must be 0 or 1, got '{flag}'", path=path, line=line)
        rejected.append(flag == "1")
        text = fields[cols[2]].strip()
        thresholds.append(math.nan if text == "" else _number(text, float, path, line, "threshold"))
    return ProcessedStream(
        frame_index=np.asarray(frames, dtype=np.int64),
        decisions=np.asarray(decisions, dtype=np.int64),
        rejected=np.asarray(rejected, dtype=bool),
        thresholds=np.asarray(thresholds, dtype=np.float64),
    )


def read_timeline_csv(path: str) -> GroundTruthTimeline:
    """Read a timeline CSV ``kind,start_frame,end_frame,class,from_class,to_class``

    Raises:
        ParseError: On a malformed row or an inconsistent segment sequence
    """
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", path=path, line=1) from None
    if tuple(h.strip() for h in header) != TIMELINE_COLUMNS:
        raise ParseError(f"header must be {','.join(TIMELINE_COLUMNS)}", path=path, line=1)
    segments = []
    last_line = 1
    for line, fields in rows:
        last_line = line
        if len(fields) != len(TIMELINE_COLUMNS):
            raise ParseError(f"expected {len(TIMELINE_COLUMNS)} fields, found {len(fields)}", path=path, line=line)
        kind = fields[0].strip()
        if kind not in (STEADY, TRANSITION):
            raise ParseError(f"unknown segment kind '{kind}'", path=path, line=line)
        try:
            segments.append(Segment(
                kind=kind,
                start_frame=_number(fields[1], int, path, line, "start_frame"),
                end_frame=_number(fields[2], int, path, line, "end_frame"),
                class_id=_optional_int(fields[3], path, line, "class"),
                from_class=_optional_int(fields[4], path, line, "from_class"),
                to_class=_optional_int(fields[5], path, line, "to_class"),
            ))
        except ArgumentError as e:
            raise ParseError(str(e), path=path, line=line) from e
    try:
        return GroundTruthTimeline(segments)
    except ArgumentError as e:
        raise ParseError(str(e), path=path, line=last_line) from e


def read_features_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Read labeled features ``label,x_1..x_d``

    Returns:
        Tuple of (n, d) features and (n,) labels
    """
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", path=path, line=1) from None
    header = [h.strip() for h in header]
    n_features = _indexed_columns(header, "x_", 1)
    if header[:1] != ["label"] or n_features < 1 or len(header) != n_features + 1:
        raise ParseError("header must be label,x_1,...,x_d", path=path, line=1)
    labels, features = [], []
    for line, fields in rows:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", path=path, line=line)
        labels.append(_number(fields[0], int, path, line, "label"))
        features.append([_number(v, float, path, line, f"x_{j + 1}") for j, v in enumerate(fields[1:])])
    if not labels:
        raise ParseError("no data rows", path=path, line=2)
    return np.asarray(features, dtype=np.float64), np.asarray(labels, dtype=np.int64)


def read_values_csv(path: str, column: str) -> np.ndarray:
    """Read one numeric column by name"""
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", path=path, line=1) from None
    header = [h.strip() for h in header]
    if column not in header:
        raise ParseError(f"missing column '{column}'", path=path, line=1)
    idx = header.index(column)
    values = []
    for line, fields in rows:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", path=path, line=line)
        values.append(_number(fields[idx], float, path, line, column))
    return np.asarray(values, dtype=np.float64)


def read_signal(path: str) -> np.ndarray:
    """Load a raw (n_samples, N_CH) signal stored as .npy"""
    if not Path(path).is_file():
        raise ParseError("signal file not found", path=path)
    try:
        signal = np.load(path, allow_pickle=False)
    except ValueError as e:
        raise ParseError(f"not a numpy array file: {e}", path=path) from e
    if signal.ndim == 1:
        signal = signal[:, None]
    if signal.ndim != 2 or not np.all(np.isfinite(signal)):
        raise ParseError(f"signal must be a finite (n_samples, N_CH) array, got shape {signal.shape}", path=path)
    return signal.astype(np.float64, copy=False)
