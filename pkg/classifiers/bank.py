# File: dsqi_bench/classifiers/bank.py
"""Per-frame-length classifier bank for adaptive windowing"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from core.base import Classifier, FeatureExtractor
from core.exceptions import ConfigurationError, TrainingError
from classifiers.gaussian import GaussianClassifier, GaussianModel, train_gaussian
from features.extractors import TimeDomainExtractor
from features.windowing import frame_geometry, frame_windows, ms_to_samples
from models.stream_model import ConfidenceVector, EmgFrame

logger = logging.getLogger(__name__)


@dataclass
class ClassifierBank:
    """Feature extractor and classifier for every candidate frame length

    Attributes:
        sample_rate_hz: Sampling rate of the signals the bank classifies
        entries: Frame length in ms -> (extractor, classifier)
    """
    sample_rate_hz: float
    entries: Dict[float, Tuple[FeatureExtractor, Classifier]] = field(default_factory=dict)

    def lengths(self) -> List[float]:
        return sorted(self.entries)

    def frame_samples(self, frame_length_ms: float) -> int:
        return ms_to_samples(frame_length_ms, self.sample_rate_hz, "frame length")

    def require(self, frame_lengths: Iterable[float]) -> None:
        """Check the bank holds every listed frame length

        Raises:
            ConfigurationError: Naming the first missing length
        """
        for fl in frame_lengths:
            if fl not in self.entries:
                raise ConfigurationError(
                    f"no classifier trained for frame length {fl:g} ms "
                    f"(bank has {', '.join(f'{x:g}' for x in self.lengths()) or 'none'})"
                )

    def classify(self, frame_length_ms: float, samples: np.ndarray, frame_index: int = 0) -> ConfidenceVector:
        """Classify the trailing ``frame_length_ms`` of a sample buffer"""
        extractor, classifier = self.entries[frame_length_ms]
        needed = self.frame_samples(frame_length_ms)
        frame = EmgFrame(samples=samples[-needed:], frame_index=frame_index)
        return classifier.posterior(extractor.extract(frame))

    def classify_trailing(self, frame_lengths: Sequence[float], signal: np.ndarray, ends: np.ndarray) -> np.ndarray:
        """Confidences of the frame of every listed length ending at each of ``ends``

        Lengths whose entries share an extractor are featurized in one pass.

        Returns:
            (len(frame_lengths), n, K) array, NaN where the frame would start
            before the signal
        """
        ends = np.asarray(ends, dtype=np.int64)
        groups: Dict[FeatureExtractor, List[int]] = {}
        for j, fl in enumerate(frame_lengths):
            groups.setdefault(self.entries[fl][0], []).append(j)
        n_classes = self.entries[frame_lengths[0]][1].n_classes
        out = np.full((len(frame_lengths), ends.shape[0], n_classes), np.nan)
        for extractor, members in groups.items():
            sizes = [self.frame_samples(frame_lengths[j]) for j in members]
            tables = extractor.extract_trailing_lengths(signal, ends, sizes)
            for j, size, features in zip(members, sizes, tables):
                fits = ends >= size
                if fits.any():
                    out[j, fits] = self.entries[frame_lengths[j]][1].posterior_batch(features[fits])
        return out

    def to_dict(self) -> Dict[str, Any]:
        """Serialize a bank of time-domain extractors and Gaussian classifiers"""
        entries = []
        for fl in self.lengths():
            extractor, classifier = self.entries[fl]
            if not isinstance(extractor, TimeDomainExtractor) or not isinstance(classifier, GaussianClassifier):
                raise ConfigurationError("only time-domain/Gaussian banks can be serialized")
            entries.append({
                "frame_length_ms": fl,
                "n_channels": extractor.n_channels,
                "zc_threshold": extractor.zc_threshold,
                "ssc_threshold": extractor.ssc_threshold,
                "model": classifier.model.to_dict(),
            })
        return {"sample_rate_hz": self.sample_rate_hz, "entries": entries}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ClassifierBank':
        bank = cls(sample_rate_hz=float(data["sample_rate_hz"]))
        for entry in data["entries"]:
            extractor = TimeDomainExtractor(
                int(entry["n_channels"]), float(entry["zc_threshold"]), float(entry["ssc_threshold"])
            )
            model = GaussianModel.from_dict(entry["model"])
            bank.entries[float(entry["frame_length_ms"])] = (extractor, GaussianClassifier(model))
        return bank


def steady_frame_labels(sample_labels: np.ndarray, frame_samples: int, stride: int, n_frames: int) -> np.ndarray:
    """Label of each frame whose samples all share one class, 0 otherwise"""
    starts = np.arange(n_frames) * stride
    first = sample_labels[starts]
    last = sample_labels[starts + frame_samples - 1]
    # labels are piecewise constant, so equal ends mean one class within a segment
    return np.where(first == last, first, 0)


def train_bank(
    signal: np.ndarray,
    sample_labels: np.ndarray,
    frame_lengths: Iterable[float],
    increment_ms: float,
    sample_rate_hz: float,
    regularization: float = 1e-6,
    n_classes: int = None,
) -> ClassifierBank:
    """Train one time-domain LDA per frame length on a labeled recording

    Args:
        signal: (n_samples, N_CH) training recording
        sample_labels: (n_samples,) class per sample, 0 where unlabeled
        frame_lengths: Frame lengths in ms
        increment_ms: Frame increment used to cut training frames
        sample_rate_hz: Sampling rate
        regularization: Covariance ridge factor
        n_classes: Expected class count

    Returns:
        ClassifierBank keyed by frame length

    Raises:
        TrainingError: If a frame length leaves a class without frames
    """
    signal = np.asarray(signal, dtype=np.float64)
    sample_labels = np.asarray(sample_labels, dtype=np.int64)
    if signal.shape[0] != sample_labels.shape[0]:
        raise TrainingError("signal and sample labels differ in length")
    bank = ClassifierBank(sample_rate_hz=sample_rate_hz)
    extractor = TimeDomainExtractor(signal.shape[1])
    for fl in frame_lengths:
        frame_samples, stride = frame_geometry(fl, increment_ms, sample_rate_hz)
        windows = frame_windows(signal, frame_samples, stride)
        labels = steady_frame_labels(sample_labels, frame_samples, stride, windows.shape[0])
        keep = labels > 0
        features = extractor.extract_batch(windows[keep])
        model = train_gaussian(features, labels[keep], regularization, n_classes=n_classes)
        bank.entries[float(fl)] = (extractor, GaussianClassifier(model))
        logger.debug("Trained bank entry for %g ms on %d frames", fl, int(keep.sum()))
    logger.info("Trained classifier bank for %d frame lengths", len(bank.entries))
    return bank
