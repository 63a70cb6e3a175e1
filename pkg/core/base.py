# File: dsqi_bench/core/base.py
"""Abstract base classes for the frame → feature → decision → post-processing pipeline"""

from abc import ABC, abstractmethod
from typing import FrozenSet, List, Sequence, TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

if TYPE_CHECKING:
    from models.stream_model import (
        ConfidenceVector,
        DecisionStream,
        EmgFrame,
        FeatureVector,
        ProcessedDecision,
        ProcessedStream,
        Tick,
    )

#: Windows gathered per chunk by the generic trailing-window extraction.
TRAILING_CHUNK = 2048


class FeatureExtractor(ABC):
    """Abstract base class for feature extractors h(EMG_i) -> X_i"""

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Number of features d produced for one frame"""
        pass

    @abstractmethod
    def extract(self, frame: "EmgFrame") -> "FeatureVector":
        """Extract the feature vector of one frame

        Args:
            frame: The frame to extract features from

        Returns:
            Feature vector of length ``dimension``
        """
        pass

    def extract_batch(self, windows: np.ndarray) -> np.ndarray:
        """Extract features for a stack of frames

        Args:
            windows: Array of shape (n_frames, M, N_CH)

        Returns:
            Array of shape (n_frames, d)
        """
        from models.stream_model import EmgFrame

        return np.stack(
            [self.extract(EmgFrame(samples=w, frame_index=i)).values for i, w in enumerate(windows)]
        )

    def extract_trailing(self, signal: np.ndarray, ends: np.ndarray, frame_samples: int) -> np.ndarray:
        """Extract features of the ``frame_samples`` samples before each end

        Args:
            signal: Array of shape (n_samples, N_CH)
            ends: (n,) exclusive end samples, each at least ``frame_samples``
            frame_samples: Window length M

        Returns:
            Array of shape (n, d)
        """
        windows = sliding_window_view(signal, frame_samples, axis=0)
        starts = np.asarray(ends, dtype=np.int64) - frame_samples
        out = np.empty((starts.shape[0], self.dimension))
        for lo in range(0, starts.shape[0], TRAILING_CHUNK):
            chunk = windows[starts[lo:lo + TRAILING_CHUNK]]
            out[lo:lo + TRAILING_CHUNK] = self.extract_batch(chunk.transpose(0, 2, 1))
        return out

    def extract_trailing_lengths(self, signal: np.ndarray, ends: np.ndarray, sizes: Sequence[int]) -> List[np.ndarray]:
        """Trailing-window features for several window lengths

        Args:
            signal: Array of shape (n_samples, N_CH)
            ends: (n,) exclusive end samples
            sizes: Window lengths in samples

        Returns:
            One (n, d) array per size; rows whose window would start before
            the signal are NaN
        """
        ends = np.asarray(ends, dtype=np.int64)
        out = []
        for size in sizes:
            features = np.full((ends.shape[0], self.dimension), np.nan)
            fits = ends >= size
            if fits.any():
                features[fits] = self.extract_trailing(signal, ends[fits], size)
            out.append(features)
        return out


class Classifier(ABC):
    """Abstract base class for classifiers f(X_i) -> C_i"""

    #: True when the classifier models class densities, which prior
    #: adjustment needs.
    is_generative: bool = False

    @property
    @abstractmethod
    def n_classes(self) -> int:
        """Number of classes K"""
        pass

    @abstractmethod
    def posterior(self, x: "FeatureVector") -> "ConfidenceVector":
        """Compute the confidence vector of one feature vector"""
        pass

    def posterior_batch(self, features: np.ndarray) -> np.ndarray:
        """Compute confidences for a matrix of feature vectors

        Args:
            features: Array of shape (n, d)

        Returns:
            Array of shape (n, K)
        """
        from models.stream_model import FeatureVector

        return np.stack(
            [self.posterior(FeatureVector(values=row, frame_index=i)).confidences
             for i, row in enumerate(features)]
        )


class StreamProcessor(ABC):
    """Abstract base class for decision stream quality improvement schemes

    A processor is fed one tick per frame and emits one processed decision
    per tick. Processors hold mutable streaming state; ``reset`` returns them
    to the cold-start state.
    """

    #: Scheme identifier used on the command line and in output file names.
    name: str = ""

    #: Per-tick payloads the scheme needs besides the decision point:
    #: any of "features", "mean_mav", "signal".
    requires: FrozenSet[str] = frozenset()

    @abstractmethod
    def process(self, tick: "Tick") -> "ProcessedDecision":
        """Process one tick and return the post-processed decision"""
        pass

    @abstractmethod
    def reset(self) -> None:
        """Clear all streaming state"""
        pass

    def process_ticks(self, ticks: Sequence["Tick"]) -> "ProcessedStream":
        """Run the per-tick path over a sequence of ticks

        Args:
            ticks: Ticks in frame order

        Returns:
            Processed stream with one entry per tick
        """
        from models.stream_model import ProcessedStream

        self.reset()
        outputs = [self.process(tick) for tick in ticks]
        self.reset()
        return ProcessedStream.from_decisions(outputs)

    def process_stream(self, stream: "DecisionStream") -> "ProcessedStream":
        """Run the scheme over a whole stream

        Subclasses override this with a vectorized implementation when one
        exists; the default materializes ticks and runs ``process``.
        """
        return self.process_ticks([stream.tick(i) for i in range(len(stream))])
