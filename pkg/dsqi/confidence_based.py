# File: dsqi_bench/dsqi/confidence_based.py
"""Schemes driven by class confidences: CBR, CS, BF, AW and VoCIR"""

import logging
from collections import deque
from typing import Optional

import numpy as np

from classifiers.bank import ClassifierBank
from core.exceptions import ConfigurationError
from dsqi.common import SchemeProcessor
from dsqi.kernels import bayesian_fusion, bf_weights, confidence_variance, normalize_rows
from models.scheme_config import SchemeConfig
from models.stream_model import (
    ClassCatalog,
    ConfidenceVector,
    DecisionStream,
    ProcessedDecision,
    ProcessedStream,
    Tick,
)

logger = logging.getLogger(__name__)


class ConfidenceRejectionProcessor(SchemeProcessor):
    """Reject to NM unless č > Th_Rej"""

    name = "cbr"

    def reset(self) -> None:
        pass

    def process(self, tick: Tick) -> ProcessedDecision:
        point = tick.point
        accepted = point.max_confidence > self.config.th_rej
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=point.decision if accepted else self.nm_class,
            rejected=not accepted,
            effective_threshold=self.config.th_rej,
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        accepted = stream.max_confidence > self.config.th_rej
        return self._finish(
            stream,
            np.where(accepted, stream.decisions, self.nm_class),
            rejected=~accepted,
            thresholds=np.full(len(stream), self.config.th_rej),
        )


class ConfidenceScalingProcessor(SchemeProcessor):
    """Scale each class confidence by s_k and renormalize

    A frame whose active raw decision is overridden to NM by the scaling is
    flagged as rejected.
    """

    name = "cs"

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        self.scale = np.asarray(config.resolved_scale_factors(catalog.n_classes, catalog.nm_class))

    def reset(self) -> None:
        pass

    def process(self, tick: Tick) -> ProcessedDecision:
        point = tick.point
        scaled = normalize_rows(point.confidence.confidences * self.scale)
        decision = int(np.argmax(scaled)) + 1
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=decision,
            rejected=decision == self.nm_class and point.decision != self.nm_class,
            adjusted_confidence=ConfidenceVector(scaled, tick.frame_index),
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        scaled = normalize_rows(stream.confidences * self.scale)
        decisions = np.argmax(scaled, axis=1).astype(np.int64) + 1
        rejected = (decisions == self.nm_class) & (stream.decisions != self.nm_class)
        return self._finish(stream, decisions, rejected=rejected, adjusted=scaled)


class BayesianFusionProcessor(SchemeProcessor):
    """Fuse the current and previous m confidence vectors

    c̃_k ∝ Π_n (c_(i-n)k + a_n) with weights from bf_weights; during warm-up
    the product runs over the frames seen so far.
    """

    name = "bf"

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        self.weights = bf_weights(config.m)
        self._history: deque = deque(maxlen=config.m + 1)

    def reset(self) -> None:
        self._history.clear()

    def process(self, tick: Tick) -> ProcessedDecision:
        self._history.append(tick.point.confidence.confidences)
        fused = bayesian_fusion(np.stack(self._history), self.weights)[-1]
        decision = int(np.argmax(fused)) + 1
        if self._in_warmup(len(self._history)):
            decision = self.nm_class
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=decision,
            adjusted_confidence=ConfidenceVector(fused, tick.frame_index),
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        fused = bayesian_fusion(stream.confidences, self.weights)
        decisions = np.argmax(fused, axis=1).astype(np.int64) + 1
        if self.config.warmup == "nm":
            decisions[: self.config.m] = self.nm_class
        return self._finish(stream, decisions, adjusted=fused)


class AdaptiveWindowProcessor(SchemeProcessor):
    """Adaptive windowing over a per-frame-length classifier bank

    Each tick classifies the trailing FL of signal. When č ≥ Th_AW the
    decision is accepted and FL returns to its base length; otherwise the
    tick emits NM and FL grows by one increment, holding at the longest
    length on the step grid.
    """

    name = "aw"
    requires = frozenset({"signal"})

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog, bank: Optional[ClassifierBank]):
        super().__init__(config, catalog)
        if bank is None:
            raise ConfigurationError("adaptive windowing needs a classifier bank")
        self.lengths = config.frame_lengths()
        bank.require(self.lengths)
        self.bank = bank
        self.max_samples = bank.frame_samples(self.lengths[-1])
        self.reset()

    @property
    def frame_length_ms(self) -> float:
        return self._frame_length

    def reset(self) -> None:
        self._frame_length = self.config.fl_min_ms

    def process(self, tick: Tick) -> ProcessedDecision:
        self.check_tick(tick)
        frame_length = self._fit_length(tick.samples.shape[0])
        confidence = self.bank.classify(frame_length, tick.samples, tick.frame_index)
        accepted = confidence.max_confidence >= self.config.th_aw
        if accepted:
            self._frame_length = self.config.fl_min_ms
        elif self._frame_length < self.lengths[-1]:
            # growth stops at the last length on the step grid, which may fall short of fl_max
            self._frame_length = min(self._frame_length + self.config.fl_step_ms, self.lengths[-1])
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=confidence.decision if accepted else self.nm_class,
            rejected=not accepted,
            effective_threshold=self.config.th_aw,
            adjusted_confidence=confidence,
            frame_length_ms=frame_length,
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        """Classify every frame at every length up front, then walk the length state

        Frame i sees the trailing min(end_i, max_samples) samples, as its tick
        does; a length that does not fit is left NaN and never chosen.
        """
        n = len(stream)
        ends = stream.sample_ends
        available = np.minimum(ends, self.max_samples)
        sizes = np.array([self.bank.frame_samples(fl) for fl in self.lengths])
        short = np.flatnonzero(available < sizes[0])
        if short.size:
            raise ConfigurationError(
                f"frame {int(stream.frame_index[short[0]])}: only {int(available[short[0]])} samples available, "
                f"shorter than the base frame length {self.lengths[0]:g} ms"
            )
        confidences = self.bank.classify_trailing(self.lengths, stream.signal, ends)
        with np.errstate(invalid="ignore"):
            accept_table = confidences.max(axis=2) >= self.config.th_aw
        fit = np.searchsorted(sizes, available, side="right") - 1

        levels = np.empty(n, dtype=np.int64)
        accept_rows = accept_table.T.tolist()
        top = len(self.lengths) - 1
        level = 0
        for i, (limit, row) in enumerate(zip(fit.tolist(), accept_rows)):
            used = min(level, limit)
            levels[i] = used
            if row[used]:
                level = 0
            elif level < top:
                level += 1

        rows = np.arange(n)
        chosen = confidences[levels, rows]
        accepted = accept_table[levels, rows]
        decisions = np.where(accepted, np.argmax(chosen, axis=1) + 1, self.nm_class).astype(np.int64)
        logger.debug("aw accepted %d of %d frames", int(accepted.sum()), n)
        return self._finish(
            stream,
            decisions,
            rejected=~accepted,
            thresholds=np.full(n, self.config.th_aw),
            adjusted=chosen,
            frame_length_ms=np.asarray(self.lengths, dtype=np.float64)[levels],
        )

    def _fit_length(self, available: int) -> float:
        """Current frame length, or the longest bank length the buffer can fill"""
        current = round(self._frame_length, 6)
        if self.bank.frame_samples(current) <= available:
            return current
        fitting = [fl for fl in self.lengths if self.bank.frame_samples(fl) <= available]
        if not fitting:
            raise ConfigurationError(
                f"only {available} samples available, shorter than the base frame length {self.lengths[0]:g} ms"
            )
        return fitting[-1]


class VarianceRejectionProcessor(SchemeProcessor):
    """Rejection threshold raised by recent confidence variability

    v_i is the largest per-class population variance of the raw confidences
    over the current and previous m frames; Th = min(Th_max, Th_min + β·v_i)
    and a frame is accepted when č ≥ Th.
    """

    name = "vocir"

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        self._history: deque = deque(maxlen=config.m + 1)

    def reset(self) -> None:
        self._history.clear()

    def threshold(self, variance):
        return np.minimum(self.config.th_max, self.config.th_min + self.config.beta * variance)

    def process(self, tick: Tick) -> ProcessedDecision:
        point = tick.point
        self._history.append(point.confidence.confidences)
        if self._in_warmup(len(self._history)):
            return ProcessedDecision(frame_index=tick.frame_index, decision=self.nm_class)
        variance = confidence_variance(np.stack(self._history), self.config.m)[-1:]
        threshold = float(self.threshold(variance)[0])
        accepted = point.max_confidence >= threshold
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=point.decision if accepted else self.nm_class,
            rejected=not accepted,
            effective_threshold=threshold,
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        thresholds = self.threshold(confidence_variance(stream.confidences, self.config.m))
        accepted = stream.max_confidence >= thresholds
        decisions = np.where(accepted, stream.decisions, self.nm_class)
        rejected = ~accepted
        if self.config.warmup == "nm":
            warm = min(self.config.m, len(stream))
            decisions[:warm] = self.nm_class
            rejected[:warm] = False
            thresholds[:warm] = np.nan
        return self._finish(stream, decisions, rejected=rejected, thresholds=thresholds)
