# File: dsqi_bench/features/windowing.py
"""Segmentation of multichannel signals into overlapping frames"""

import logging
from typing import List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from core.exceptions import ConfigurationError, EmptyStreamError
from models.stream_model import EmgFrame

logger = logging.getLogger(__name__)


def ms_to_samples(duration_ms: float, sample_rate_hz: float, what: str = "duration") -> int:
    """Convert a duration to an exact integer number of samples

    Raises:
        ConfigurationError: If the duration does not map to a whole number of
            samples, or maps to zero samples
    """
    exact = duration_ms * sample_rate_hz / 1000.0
    count = int(round(exact))
    if abs(exact - count) > 1e-9 or count < 1:
        raise ConfigurationError(
            f"{what} of {duration_ms} ms at {sample_rate_hz} Hz is {exact:g} samples; "
            f"an integer number of samples is required"
        )
    return count


def frame_geometry(frame_length_ms: float, increment_ms: float, sample_rate_hz: float) -> Tuple[int, int]:
    """Frame length M and stride in samples

    Example:
        160 ms frames with a 16 ms increment at 2000 Hz give (320, 32).
    """
    return (
        ms_to_samples(frame_length_ms, sample_rate_hz, "frame length"),
        ms_to_samples(increment_ms, sample_rate_hz, "frame increment"),
    )


def count_frames(n_samples: int, frame_samples: int, stride: int) -> int:
    """Number of complete frames; the trailing partial frame is dropped

    Raises:
        EmptyStreamError: If the signal is shorter than one frame
    """
    if n_samples < frame_samples:
        raise EmptyStreamError(
            f"signal of {n_samples} samples is shorter than one frame ({frame_samples} samples)"
        )
    return (n_samples - frame_samples) // stride + 1


def frame_windows(signal: np.ndarray, frame_samples: int, stride: int) -> np.ndarray:
    """Zero-copy view of all frames of a signal

    Args:
        signal: Array of shape (n_samples, N_CH)
        frame_samples: Frame length M in samples
        stride: Frame increment in samples

    Returns:
        Read-only view of shape (n_frames, M, N_CH)
    """
    signal = _as_matrix(signal)
    n_frames = count_frames(signal.shape[0], frame_samples, stride)
    windows = sliding_window_view(signal, frame_samples, axis=0)[::stride]
    return windows[:n_frames].transpose(0, 2, 1)


def frame_sample_ends(n_frames: int, frame_samples: int, stride: int) -> np.ndarray:
    """Exclusive end sample of every frame"""
    return np.arange(n_frames, dtype=np.int64) * stride + frame_samples


def make_frames(
    signal: np.ndarray,
    frame_length_ms: float,
    increment_ms: float,
    sample_rate_hz: float,
) -> List[EmgFrame]:
    """Split a multichannel signal into overlapping frames

    Frame i starts at sample i × stride; the trailing partial frame is dropped.

    Args:
        signal: Array of shape (n_samples, N_CH)
        frame_length_ms: Frame length
        increment_ms: Frame increment
        sample_rate_hz: Sampling rate

    Returns:
        List of EmgFrame in time order

    Raises:
        EmptyStreamError: If the signal is shorter than one frame
        ConfigurationError: If lengths are not whole numbers of samples

    Example:
        A 1 s, 2000 Hz signal cut into 160 ms frames every 16 ms yields 53
        frames of 320 samples.
    """
    frame_samples, stride = frame_geometry(frame_length_ms, increment_ms, sample_rate_hz)
    windows = frame_windows(signal, frame_samples, stride)
    logger.debug("Cut %d frames of %d samples (stride %d)", len(windows), frame_samples, stride)
    return [
        EmgFrame(samples=window, frame_index=i, start_time_ms=i * increment_ms)
        for i, window in enumerate(windows)
    ]


def _as_matrix(signal: np.ndarray) -> np.ndarray:
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim == 1:
        signal = signal[:, None]
    if signal.ndim != 2:
        raise ConfigurationError(f"signal must be an (n_samples, N_CH) matrix, got shape {signal.shape}")
    return signal
