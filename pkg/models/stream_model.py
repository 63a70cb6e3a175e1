# File: dsqi_bench/models/stream_model.py
"""Data models for frames, features, confidences and decision streams"""

from collections import abc
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence

import numpy as np

from core.exceptions import ArgumentError, InvariantError
from utils.validators import ConfidenceValidator


@dataclass(frozen=True, eq=False)
class EmgFrame:
    """One fixed-length window of multichannel signal (M samples × N_CH channels)"""
    samples: np.ndarray
    frame_index: int
    start_time_ms: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise InvariantError(f"frame must be an (M, N_CH) matrix, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvariantError(f"frame {self.frame_index} contains non-finite samples")
        if self.frame_index < 0:
            raise InvariantError(f"frame index must be non-negative, got {self.frame_index}")
        object.__setattr__(self, "samples", samples)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Feature vector X_i of one frame"""
    values: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(values)):
            raise InvariantError(f"feature vector of frame {self.frame_index} contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class ConfidenceVector:
    """Per-class confidences C_i; each in [0, 1], summing to 1"""
    confidences: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        confidences = np.asarray(self.confidences, dtype=np.float64).ravel()
        ConfidenceValidator.check_vector(confidences)
        object.__setattr__(self, "confidences", confidences)

    @property
    def n_classes(self) -> int:
        return self.confidences.size

    @property
    def decision(self) -> int:
        """Class id (1-based) of the highest confidence; lowest index wins ties"""
        return int(np.argmax(self.confidences)) + 1

    @property
    def max_confidence(self) -> float:
        return float(self.confidences.max())


@dataclass(frozen=True, eq=False)
class DecisionPoint:
    """Raw classifier output of one frame: ŷ_i, č_i and the full confidence vector"""
    frame_index: int
    decision: int
    max_confidence: float
    confidence: ConfidenceVector

    def __post_init__(self):
        if self.decision != self.confidence.decision:
            raise InvariantError(
                f"frame {self.frame_index}: decision {self.decision} is not the argmax "
                f"{self.confidence.decision} of its confidences"
            )
        if self.max_confidence != self.confidence.max_confidence:
            raise InvariantError(f"frame {self.frame_index}: max confidence does not match confidences")

    @classmethod
    def from_confidences(cls, confidences, frame_index: int = 0) -> 'DecisionPoint':
        """Build a decision point from a raw confidence vector

        Args:
            confidences: Array-like of K confidences or a ConfidenceVector
            frame_index: Frame index of the point

        Returns:
            DecisionPoint with decision = argmax and max_confidence = max
        """
        if not isinstance(confidences, ConfidenceVector):
            confidences = ConfidenceVector(confidences, frame_index)
        return cls(
            frame_index=frame_index,
            decision=confidences.decision,
            max_confidence=confidences.max_confidence,
            confidence=confidences,
        )


@dataclass(frozen=True)
class ClassCatalog:
    """Class ids 1..K and the No Motion class"""
    n_classes: int
    nm_class: int = 1

    def __post_init__(self):
        if self.n_classes < 2:
            raise ArgumentError(f"need at least 2 classes, got {self.n_classes}")
        if not 1 <= self.nm_class <= self.n_classes:
            raise ArgumentError(f"nm_class {self.nm_class} outside 1..{self.n_classes}")

    @property
    def classes(self) -> List[int]:
        return list(range(1, self.n_classes + 1))

    @property
    def active_classes(self) -> List[int]:
        return [k for k in self.classes if k != self.nm_class]


@dataclass(frozen=True, eq=False)
class Tick:
    """Everything a scheme may consume for one frame"""
    point: DecisionPoint
    features: Optional[FeatureVector] = None
    mean_mav: Optional[float] = None
    samples: Optional[np.ndarray] = None

    @property
    def frame_index(self) -> int:
        return self.point.frame_index


@dataclass(frozen=True, eq=False)
class ProcessedDecision:
    """Post-processed output ỹ_i of one frame"""
    frame_index: int
    decision: int
    rejected: bool = False
    effective_threshold: Optional[float] = None
    adjusted_confidence: Optional[ConfidenceVector] = None
    frame_length_ms: Optional[float] = None


@dataclass(eq=False)
class DecisionStream:
    """Array-backed raw decision stream of one trial

    Attributes:
        confidences: (N, K) confidence matrix; decisions are its row argmax
        frame_index: (N,) frame indices, default 0..N-1
        ts_ms: (N,) frame start times, default frame_index × increment_ms
        true_class: (N,) ground-truth class per frame, 0 inside transitions
        mean_mav: optional (N,) amplitude envelope for onset locking
        features: optional (N, d) feature matrix
        signal: optional raw (n_samples, N_CH) recording the frames were cut from
        sample_ends: optional (N,) exclusive end sample of each frame in ``signal``
        increment_ms: frame period
        generative: whether the source classifier models class densities
    """
    confidences: np.ndarray
    frame_index: Optional[np.ndarray] = None
    ts_ms: Optional[np.ndarray] = None
    true_class: Optional[np.ndarray] = None
    mean_mav: Optional[np.ndarray] = None
    features: Optional[np.ndarray] = None
    signal: Optional[np.ndarray] = None
    sample_ends: Optional[np.ndarray] = None
    increment_ms: float = 16.0
    generative: bool = True
    decisions: np.ndarray = field(init=False)

    def __post_init__(self):
        self.confidences = np.ascontiguousarray(self.confidences, dtype=np.float64)
        ConfidenceValidator.check_matrix(self.confidences)
        n = self.confidences.shape[0]
        if self.frame_index is None:
            self.frame_index = np.arange(n, dtype=np.int64)
        self.frame_index = np.asarray(self.frame_index, dtype=np.int64)
        if self.ts_ms is None:
            self.ts_ms = self.frame_index * float(self.increment_ms)
        self.ts_ms = np.asarray(self.ts_ms, dtype=np.float64)
        if self.true_class is None:
            self.true_class = np.zeros(n, dtype=np.int64)
        self.true_class = np.asarray(self.true_class, dtype=np.int64)
        for name in ("frame_index", "ts_ms", "true_class"):
            if getattr(self, name).shape != (n,):
                raise ArgumentError(f"{name} must have shape ({n},)")
        if self.mean_mav is not None:
            self.mean_mav = np.asarray(self.mean_mav, dtype=np.float64)
            if self.mean_mav.shape != (n,):
                raise ArgumentError(f"mean_mav must have shape ({n},)")
        if self.features is not None:
            self.features = np.asarray(self.features, dtype=np.float64)
            if self.features.ndim != 2 or self.features.shape[0] != n:
                raise ArgumentError(f"features must have shape ({n}, d)")
        if self.signal is not None:
            if self.sample_ends is None:
                raise ArgumentError("sample_ends is required together with signal")
            self.signal = np.asarray(self.signal, dtype=np.float64)
            self.sample_ends = np.asarray(self.sample_ends, dtype=np.int64)
        self.decisions = np.argmax(self.confidences, axis=1).astype(np.int64) + 1

    def __len__(self) -> int:
        return self.confidences.shape[0]

    @property
    def n_classes(self) -> int:
        return self.confidences.shape[1]

    @property
    def max_confidence(self) -> np.ndarray:
        return self.confidences.max(axis=1)

    def payloads(self) -> frozenset:
        """Names of the optional per-tick payloads this stream carries"""
        present = set()
        if self.features is not None:
            present.add("features")
        if self.mean_mav is not None:
            present.add("mean_mav")
        if self.signal is not None:
            present.add("signal")
        return frozenset(present)

    def point(self, i: int) -> DecisionPoint:
        """Materialize the decision point of row ``i``"""
        return DecisionPoint.from_confidences(self.confidences[i], int(self.frame_index[i]))

    def tick(self, i: int, max_samples: Optional[int] = None) -> Tick:
        """Materialize the tick of row ``i`` with every payload the stream carries

        Args:
            i: Row index
            max_samples: How many trailing samples to attach when a raw
                signal is present (default: everything up to the frame end)
        """
        features = None
        if self.features is not None:
            features = FeatureVector(self.features[i], int(self.frame_index[i]))
        mean_mav = None if self.mean_mav is None else float(self.mean_mav[i])
        samples = None
        if self.signal is not None:
            end = int(self.sample_ends[i])
            start = 0 if max_samples is None else max(0, end - max_samples)
            samples = self.signal[start:end]
        return Tick(point=self.point(i), features=features, mean_mav=mean_mav, samples=samples)

    def ticks(self, max_samples: Optional[int] = None) -> Iterator[Tick]:
        for i in range(len(self)):
            yield self.tick(i, max_samples)

    @classmethod
    def from_points(cls, points: Sequence[DecisionPoint], **kwargs) -> 'DecisionStream':
        """Assemble a stream from decision points"""
        if not points:
            raise ArgumentError("cannot build a stream from zero points")
        confidences = np.stack([p.confidence.confidences for p in points])
        frame_index = np.array([p.frame_index for p in points], dtype=np.int64)
        return cls(confidences=confidences, frame_index=frame_index, **kwargs)


@dataclass(eq=False)
class ProcessedStream(abc.Sequence):
    """Array-backed output of a scheme; behaves as a sequence of ProcessedDecision

    Attributes:
        frame_index: (N,) frame indices
        decisions: (N,) post-processed decisions ỹ_i
        rejected: (N,) rejection flags
        thresholds: (N,) effective thresholds, NaN where the scheme has none
        adjusted: optional (N, K) re-estimated confidences
        frame_length_ms: optional (N,) frame length used (adaptive windowing)
    """
    frame_index: np.ndarray
    decisions: np.ndarray
    rejected: np.ndarray
    thresholds: np.ndarray
    adjusted: Optional[np.ndarray] = None
    frame_length_ms: Optional[np.ndarray] = None

    def __post_init__(self):
        self.frame_index = np.asarray(self.frame_index, dtype=np.int64)
        self.decisions = np.asarray(self.decisions, dtype=np.int64)
        self.rejected = np.asarray(self.rejected, dtype=bool)
        self.thresholds = np.asarray(self.thresholds, dtype=np.float64)
        n = self.frame_index.shape[0]
        for name in ("decisions", "rejected", "thresholds"):
            if getattr(self, name).shape != (n,):
                raise ArgumentError(f"{name} must have shape ({n},)")

    def __len__(self) -> int:
        return self.frame_index.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        threshold = self.thresholds[i]
        adjusted = None
        if self.adjusted is not None:
            adjusted = ConfidenceVector(self.adjusted[i], int(self.frame_index[i]))
        return ProcessedDecision(
            frame_index=int(self.frame_index[i]),
            decision=int(self.decisions[i]),
            rejected=bool(self.rejected[i]),
            effective_threshold=None if np.isnan(threshold) else float(threshold),
            adjusted_confidence=adjusted,
            frame_length_ms=None if self.frame_length_ms is None else float(self.frame_length_ms[i]),
        )

    @classmethod
    def from_decisions(cls, outputs: Sequence[ProcessedDecision]) -> 'ProcessedStream':
        """Pack per-tick outputs into arrays"""
        n = len(outputs)
        adjusted = None
        if n and all(o.adjusted_confidence is not None for o in outputs):
            adjusted = np.stack([o.adjusted_confidence.confidences for o in outputs])
        frame_length = None
        if n and all(o.frame_length_ms is not None for o in outputs):
            frame_length = np.array([o.frame_length_ms for o in outputs], dtype=np.float64)
        return cls(
            frame_index=np.array([o.frame_index for o in outputs], dtype=np.int64),
            decisions=np.array([o.decision for o in outputs], dtype=np.int64),
            rejected=np.array([o.rejected for o in outputs], dtype=bool),
            thresholds=np.array(
                [np.nan if o.effective_threshold is None else o.effective_threshold for o in outputs],
                dtype=np.float64,
            ),
            adjusted=adjusted,
            frame_length_ms=frame_length,
        )

    @classmethod
    def passthrough(cls, stream: DecisionStream) -> 'ProcessedStream':
        """Unmodified raw decisions of a stream"""
        n = len(stream)
        return cls(
            frame_index=stream.frame_index.copy(),
            decisions=stream.decisions.copy(),
            rejected=np.zeros(n, dtype=bool),
            thresholds=np.full(n, np.nan),
        )
