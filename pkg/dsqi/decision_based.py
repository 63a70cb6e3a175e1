# File: dsqi_bench/dsqi/decision_based.py
"""Schemes driven by the raw decision sequence: MV, pLDA and DCIR"""

import logging
from collections import deque
from typing import Optional

import numpy as np
from scipy.special import softmax

from core.exceptions import UnsupportedSchemeError
from classifiers.gaussian import GaussianModel
from dsqi.common import SchemeProcessor
from dsqi.kernels import frames_since_change, majority_vote
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


class MajorityVoteProcessor(SchemeProcessor):
    """Majority vote over the current and previous m raw decisions

    Among modal classes the most recently observed wins. During warm-up the
    vote runs over the decisions seen so far, or emits NM when
    ``warmup == "nm"``.
    """

    name = "mv"

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        self._history: deque = deque(maxlen=config.m + 1)

    def reset(self) -> None:
        self._history.clear()

    def process(self, tick: Tick) -> ProcessedDecision:
        self._history.append(tick.point.decision)
        if self._in_warmup(len(self._history)):
            decision = self.nm_class
        else:
            window = np.fromiter(self._history, dtype=np.int64, count=len(self._history))
            decision = int(majority_vote(window, self.config.m, self.n_classes)[-1])
        return ProcessedDecision(frame_index=tick.frame_index, decision=decision)

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        votes = majority_vote(stream.decisions, self.config.m, self.n_classes)
        if self.config.warmup == "nm":
            votes[: self.config.m] = self.nm_class
        return self._finish(stream, votes)


class PriorAdjustedLdaProcessor(SchemeProcessor):
    """Adaptive-prior LDA

    After each emitted decision d the prior of d grows by b**s, where s
    counts consecutive frames with decision d, unless the grown value would
    reach P_max. A change of decision resets s and returns all priors to
    uniform. The next frame's posterior uses the updated priors.

    With a GaussianModel the posterior is recomputed from the frame's
    features. Without one, the stream's confidences are treated as the
    uniform-prior posterior of a generative classifier and reweighted by
    the priors.
    """

    name = "plda"

    def __init__(
        self,
        config: SchemeConfig,
        catalog: ClassCatalog,
        model: Optional[GaussianModel] = None,
        generative: bool = True,
    ):
        super().__init__(config, catalog)
        if model is None and not generative:
            raise UnsupportedSchemeError(
                "plda needs a generative classifier: supply a Gaussian model or a generative stream"
            )
        if model is not None and model.n_classes != catalog.n_classes:
            raise UnsupportedSchemeError(
                f"model has {model.n_classes} classes, catalog has {catalog.n_classes}"
            )
        self.model = model
        self.requires = frozenset({"features"}) if model is not None else frozenset()
        self.reset()

    @property
    def priors(self) -> np.ndarray:
        return self._priors.copy()

    def reset(self) -> None:
        self._priors = np.full(self.n_classes, 1.0 / self.n_classes)
        self._streak = 0
        self._last: Optional[int] = None

    def process(self, tick: Tick) -> ProcessedDecision:
        self.check_tick(tick)
        if self.model is not None:
            scores = tick.features.values @ self.model.coef + self.model.intercept
        else:
            scores = _log_confidences(tick.point.confidence.confidences)
        confidences, decision = self._step(scores)
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=decision,
            adjusted_confidence=ConfidenceVector(confidences, tick.frame_index),
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        if self.model is None and not stream.generative:
            raise UnsupportedSchemeError("plda cannot reweight a stream from a discriminative classifier")
        if self.model is not None:
            scores = stream.features @ self.model.coef + self.model.intercept
        else:
            scores = _log_confidences(stream.confidences)
        n = len(stream)
        favored, other = prior_schedule(self.n_classes, self.config)
        boost = (favored - other).tolist()
        cap = len(boost) - 1
        top = np.argmax(scores, axis=1)
        top_score = scores[np.arange(n), top].tolist()
        top = top.tolist()

        # priors in force at each frame: favored class (-1 = uniform) and streak
        held = np.empty(n, dtype=np.int64)
        streak = np.empty(n, dtype=np.int64)
        decisions = np.empty(n, dtype=np.int64)
        last, s = -1, 0
        for i in range(n):
            held[i], streak[i] = last, s
            t = top[i]
            d = t
            if last >= 0 and t != last:
                boosted = scores[i, last] + boost[min(s, cap)]
                if boosted > top_score[i] or (boosted == top_score[i] and last < t):
                    d = last
            if d == last:
                s += 1
            else:
                last, s = d, 1
            decisions[i] = d + 1

        index = np.minimum(streak, cap)
        columns = np.arange(self.n_classes)[None, :]
        log_priors = np.where(columns == held[:, None], favored[index][:, None], other[index][:, None])
        adjusted = softmax(scores + log_priors, axis=1)
        adjusted = adjusted / adjusted.sum(axis=1, keepdims=True)
        return self._finish(stream, decisions, adjusted=adjusted)

    def _step(self, scores: np.ndarray):
        """Posterior under the current priors, then the prior update"""
        log_priors = np.log(self._priors / self._priors.sum())
        confidences = softmax(scores + log_priors)
        confidences = confidences / confidences.sum()
        decision = int(np.argmax(confidences)) + 1
        self._update(decision)
        return confidences, decision

    def _update(self, decision: int) -> None:
        if self._last is not None and decision != self._last:
            self._priors = np.full(self.n_classes, 1.0 / self.n_classes)
            self._streak = 0
        self._streak += 1
        candidate = self._priors[decision - 1] + self.config.b ** self._streak
        if candidate < self.config.p_max:
            self._priors[decision - 1] = candidate
        if self.config.renormalize:
            self._priors = self._priors / self._priors.sum()
        self._last = decision


def prior_schedule(n_classes: int, config: SchemeConfig, max_steps: int = 5000):
    """Normalized log-priors after s consecutive identical decisions

    Entry s holds the log-prior of the repeated class and of every other
    class; entry 0 is the uniform start. The table ends once an update no
    longer changes anything, after which the priors stay fixed.

    Returns:
        Tuple of (favored, other) arrays indexed by streak length
    """
    fav = oth = 1.0 / n_classes
    favs, oths = [fav], [oth]
    for s in range(1, max_steps + 1):
        step = config.b ** s
        new_fav = fav + step if fav + step < config.p_max else fav
        new_oth = oth
        if config.renormalize:
            total = new_fav + (n_classes - 1) * new_oth
            new_fav, new_oth = new_fav / total, new_oth / total
        favs.append(new_fav)
        oths.append(new_oth)
        if new_fav == fav and new_oth == oth and fav + step == fav:
            break
        fav, oth = new_fav, new_oth
    favs, oths = np.array(favs), np.array(oths)
    totals = favs + (n_classes - 1) * oths
    return np.log(favs / totals), np.log(oths / totals)


def dcir_threshold(l, config: SchemeConfig):
    """Th = Th_min + (Th_max - Th_min) · exp(-l / τ)

    Args:
        l: Frames since the last raw decision change (scalar or array)
        config: Scheme configuration holding th_min, th_max and tau

    Returns:
        Threshold with the same shape as ``l``
    """
    return config.th_min + (config.th_max - config.th_min) * np.exp(-np.asarray(l, dtype=np.float64) / config.tau)


class DecayingConfidenceRejectionProcessor(SchemeProcessor):
    """Confidence rejection whose threshold decays after each raw decision change

    The threshold starts at Th_max on a change of ŷ and decays toward Th_min
    with time constant τ; a frame is accepted when č ≥ threshold.
    """

    name = "dcir"

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        super().__init__(config, catalog)
        self.reset()

    def reset(self) -> None:
        self._last: Optional[int] = None
        self._elapsed = 0

    def process(self, tick: Tick) -> ProcessedDecision:
        point = tick.point
        if self._last is None or point.decision != self._last:
            self._elapsed = 0
        else:
            self._elapsed += 1
        self._last = point.decision
        threshold = float(dcir_threshold(np.array([self._elapsed]), self.config)[0])
        accepted = point.max_confidence >= threshold
        return ProcessedDecision(
            frame_index=tick.frame_index,
            decision=point.decision if accepted else self.nm_class,
            rejected=not accepted,
            effective_threshold=threshold,
        )

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        thresholds = dcir_threshold(frames_since_change(stream.decisions), self.config)
        accepted = stream.max_confidence >= thresholds
        decisions = np.where(accepted, stream.decisions, self.nm_class)
        return self._finish(stream, decisions, rejected=~accepted, thresholds=thresholds)


def _log_confidences(confidences: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(confidences)
