# File: dsqi_bench/features/extractors.py
"""Time-domain feature extraction and amplitude measures"""

from typing import List, Tuple

import numpy as np

from core.base import FeatureExtractor
from core.exceptions import DsqiError, FeatureExtractionError
from models.stream_model import EmgFrame, FeatureVector

#: Frames processed per chunk in batch extraction.
BATCH_CHUNK = 4096

#: Frames sharing one set of prefix sums in trailing-window extraction.
TRAILING_BLOCK = 4096


def mav(frame: EmgFrame) -> Tuple[np.ndarray, float]:
    """Mean absolute value per channel and its mean over channels

    Args:
        frame: The frame to measure

    Returns:
        Tuple of (per-channel MAV vector, scalar mean MAV)
    """
    per_channel = np.mean(np.abs(frame.samples), axis=0)
    return per_channel, float(np.mean(per_channel))


def mean_mav_batch(windows: np.ndarray) -> np.ndarray:
    """Mean-over-channels MAV of a stack of frames (n, M, N_CH) -> (n,)"""
    out = np.empty(windows.shape[0])
    for start in range(0, windows.shape[0], BATCH_CHUNK):
        chunk = windows[start:start + BATCH_CHUNK]
        out[start:start + BATCH_CHUNK] = np.mean(np.mean(np.abs(chunk), axis=1), axis=1)
    return out


class TimeDomainExtractor(FeatureExtractor):
    """MAV, waveform length, zero crossings and slope sign changes per channel

    Features are laid out feature-major: [MAV_1..MAV_C, WL_1..WL_C, ZC_1..ZC_C,
    SSC_1..SSC_C], so d = 4 × N_CH.
    """

    N_FEATURES = 4

    def __init__(self, n_channels: int, zc_threshold: float = 0.0, ssc_threshold: float = 0.0):
        """Initialize extractor

        Args:
            n_channels: Number of channels N_CH the frames carry
            zc_threshold: Minimum amplitude step counted as a zero crossing
            ssc_threshold: Minimum slope product counted as a slope sign change
        """
        if n_channels < 1:
            raise FeatureExtractionError(f"n_channels must be >= 1, got {n_channels}")
        self.n_channels = n_channels
        self.zc_threshold = zc_threshold
        self.ssc_threshold = ssc_threshold

    @property
    def dimension(self) -> int:
        return self.N_FEATURES * self.n_channels

    def extract(self, frame: EmgFrame) -> FeatureVector:
        if frame.n_channels != self.n_channels:
            raise FeatureExtractionError(
                f"frame {frame.frame_index} has {frame.n_channels} channels, extractor expects {self.n_channels}"
            )
        values = self._features(frame.samples[None, :, :])[0]
        return FeatureVector(values=values, frame_index=frame.frame_index)

    def extract_batch(self, windows: np.ndarray) -> np.ndarray:
        if windows.ndim != 3 or windows.shape[2] != self.n_channels:
            raise FeatureExtractionError(f"expected windows of shape (n, M, {self.n_channels}), got {windows.shape}")
        out = np.empty((windows.shape[0], self.dimension))
        for start in range(0, windows.shape[0], BATCH_CHUNK):
            out[start:start + BATCH_CHUNK] = self._features(windows[start:start + BATCH_CHUNK])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeDomainExtractor):
            return NotImplemented
        return (self.n_channels, self.zc_threshold, self.ssc_threshold) == (
            other.n_channels, other.zc_threshold, other.ssc_threshold
        )

    def __hash__(self) -> int:
        return hash((type(self), self.n_channels, self.zc_threshold, self.ssc_threshold))

    def extract_trailing(self, signal: np.ndarray, ends: np.ndarray, frame_samples: int) -> np.ndarray:
        ends = np.asarray(ends, dtype=np.int64)
        if ends.size and ends.min() < frame_samples:
            raise FeatureExtractionError(f"windows of {frame_samples} samples fall outside the signal")
        return self.extract_trailing_lengths(signal, ends, (frame_samples,))[0]

    def extract_trailing_lengths(self, signal: np.ndarray, ends: np.ndarray, sizes) -> List[np.ndarray]:
        """Trailing-window features for several lengths from prefix sums

        Every feature is a per-channel sum of a per-sample (MAV), per-pair
        (WL, ZC) or per-triple (SSC) term, so one cumulative sum over the
        signal span of a block of frames serves every window length. Results
        match ``extract_batch`` up to rounding of MAV and WL; ZC and SSC are
        exact counts.
        """
        x = np.asarray(signal, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_channels:
            raise FeatureExtractionError(f"expected a signal of shape (n, {self.n_channels}), got {x.shape}")
        ends = np.asarray(ends, dtype=np.int64)
        if ends.size and (ends.min() < 1 or ends.max() > x.shape[0]):
            raise FeatureExtractionError(f"window ends fall outside a {x.shape[0]}-sample signal")
        out = [np.full((ends.shape[0], self.dimension), np.nan) for _ in sizes]
        longest = max(sizes)
        for lo in range(0, ends.shape[0], TRAILING_BLOCK):
            block = ends[lo:lo + TRAILING_BLOCK]
            first = max(0, int(block.min()) - longest)
            sums = _TermSums(x[first:int(block.max())], self.zc_threshold, self.ssc_threshold)
            for size, features in zip(sizes, out):
                fits = block >= size
                if fits.any():
                    features[lo:lo + TRAILING_BLOCK][fits] = sums.features(block[fits] - first, size)
        return out

    def _features(self, w: np.ndarray) -> np.ndarray:
        """Features of a stack (n, M, C) along the sample axis"""
        diff = np.diff(w, axis=1)
        mav_ = np.mean(np.abs(w), axis=1)
        wl = np.sum(np.abs(diff), axis=1)
        crossings = (w[:, :-1, :] * w[:, 1:, :] < 0) & (np.abs(diff) >= self.zc_threshold)
        zc = np.sum(crossings, axis=1).astype(np.float64)
        if w.shape[1] < 3:
            ssc = np.zeros_like(mav_)
        else:
            s1 = w[:, 1:-1, :] - w[:, :-2, :]
            s2 = w[:, 1:-1, :] - w[:, 2:, :]
            ssc = np.sum(s1 * s2 > self.ssc_threshold, axis=1).astype(np.float64)
        return np.concatenate([mav_, wl, zc, ssc], axis=1)


def extract_features(frame: EmgFrame, extractor: FeatureExtractor) -> FeatureVector:
    """Apply a feature extractor to one frame

    Raises:
        FeatureExtractionError: If the extractor fails or returns a vector of
            the wrong dimension
    """
    try:
        features = extractor.extract(frame)
    except DsqiError:
        raise
    except Exception as e:
        raise FeatureExtractionError(f"feature extraction failed on frame {frame.frame_index}: {e}") from e
    if features.dimension != extractor.dimension:
        raise FeatureExtractionError(
            f"extractor returned {features.dimension} features, declared {extractor.dimension}"
        )
    return features


class _TermSums:
    """Prefix sums of the per-sample, per-pair and per-triple feature terms of a signal span"""

    def __init__(self, x: np.ndarray, zc_threshold: float, ssc_threshold: float):
        diff = np.diff(x, axis=0)
        self.abs = _prefix(np.abs(x))
        self.length = _prefix(np.abs(diff))
        self.crossings = _prefix((x[:-1] * x[1:] < 0) & (np.abs(diff) >= zc_threshold))
        self.slopes = _prefix((x[1:-1] - x[:-2]) * (x[1:-1] - x[2:]) > ssc_threshold)

    def features(self, ends: np.ndarray, size: int) -> np.ndarray:
        """Features of the ``size``-sample windows ending at ``ends`` (span-relative)"""
        starts = ends - size
        mav_ = (self.abs[ends] - self.abs[starts]) / size
        # term k spans samples k..k+1 (pairs) or k..k+2 (triples)
        wl = self.length[ends - 1] - self.length[starts]
        zc = (self.crossings[ends - 1] - self.crossings[starts]).astype(np.float64)
        if size < 3:
            ssc = np.zeros_like(mav_)
        else:
            ssc = (self.slopes[ends - 2] - self.slopes[starts]).astype(np.float64)
        return np.concatenate([mav_, wl, zc, ssc], axis=1)


def _prefix(terms: np.ndarray) -> np.ndarray:
    """Cumulative column sums with a leading zero row, so rows [a, b) sum to P[b] - P[a]"""
    dtype = np.int64 if terms.dtype == bool else np.float64
    prefix = np.zeros((terms.shape[0] + 1, terms.shape[1]), dtype=dtype)
    np.cumsum(terms, axis=0, dtype=dtype, out=prefix[1:])
    return prefix
