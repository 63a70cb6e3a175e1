# File: dsqi_bench/dsqi/feature_based.py
"""Schemes driven by signal amplitude or feature-space checks: OL and OD"""

import logging
from typing import List, Optional

import numpy as np

from classifiers.one_class import OccVerdict, OneClassSet, inlier_mask, occ_check
from core.exceptions import ConfigurationError, TrainingError
from dsqi.common import SchemeProcessor
from dsqi.kernels import majority_vote
from models.scheme_config import SchemeConfig
from models.stream_model import ClassCatalog, DecisionStream, ProcessedDecision, ProcessedStream, Tick

logger = logging.getLogger(__name__)


def ol_threshold(nm_mav_values) -> float:
    """Onset threshold μ + 3σ (population σ) of NM mean-MAV values

    Raises:
        TrainingError: With fewer than two values
    """
    values = np.asarray(nm_mav_values, dtype=np.float64).ravel()
    if values.size < 2:
        raise TrainingError(f"onset threshold needs at least 2 NM frames, got {values.size}")
    return float(values.mean() + 3.0 * values.std())


class OnsetLockProcessor(SchemeProcessor):
    """Lock the output to the vote of the first m_OL decisions after onset

    Frames whose mean MAV is below Th_MAV emit NM and end any lock. Above
    the threshold the first m_OL raw decisions pass through; afterwards the
    output holds their majority vote until the amplitude drops again.
    """

    name = "ol"
    requires = frozenset({"mean_mav"})

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        if config.th_mav is None:
            raise ConfigurationError("onset locking needs th_mav; train it from NM data or set it explicitly")
        self.th_mav = config.th_mav
        self.reset()

    @property
    def locked(self) -> Optional[int]:
        return self._locked

    def reset(self) -> None:
        self._onset: List[int] = []
        self._locked: Optional[int] = None

    def process(self, tick: Tick) -> ProcessedDecision:
        self.check_tick(tick)
        if tick.mean_mav < self.th_mav:
            self.reset()
            return ProcessedDecision(frame_index=tick.frame_index, decision=self.nm_class, rejected=True)
        decision = tick.point.decision
        if self._locked is not None:
            decision = self._locked
        else:
            self._onset.append(decision)
            if len(self._onset) == self.config.m_ol:
                self._locked = self._vote(np.asarray(self._onset))
        return ProcessedDecision(frame_index=tick.frame_index, decision=decision)

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        active = stream.mean_mav >= self.th_mav
        decisions = np.where(active, stream.decisions, self.nm_class)
        starts = np.flatnonzero(active & ~np.concatenate(([False], active[:-1])))
        ends = np.flatnonzero(active & ~np.concatenate((active[1:], [False]))) + 1
        m_ol = self.config.m_ol
        for start, end in zip(starts, ends):
            if end - start > m_ol:
                decisions[start + m_ol:end] = self._vote(stream.decisions[start:start + m_ol])
        return self._finish(stream, decisions, rejected=~active)

    def _vote(self, onset: np.ndarray) -> int:
        return int(majority_vote(onset, onset.shape[0] - 1, self.n_classes)[-1])


class OutlierDetectionProcessor(SchemeProcessor):
    """Reject frames whose features no class detector accepts"""

    name = "od"
    requires = frozenset({"features"})

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog, occ: Optional[OneClassSet]):
        super().__init__(config, catalog)
        if not occ:
            raise ConfigurationError("outlier detection needs trained one-class models")
        self.occ = occ

    def reset(self) -> None:
        pass

    def process(self, tick: Tick) -> ProcessedDecision:
        self.check_tick(tick)
        inlier = occ_check(self.occ, tick.features) is OccVerdict.INLIER
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=tick.point.decision if inlier else self.nm_class,
            rejected=not inlier,
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        inlier = inlier_mask(self.occ, stream.features)
        return self._finish(stream, np.where(inlier, stream.decisions, self.nm_class), rejected=~inlier)
