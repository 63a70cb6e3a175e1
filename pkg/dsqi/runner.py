# File: dsqi_bench/dsqi/runner.py
"""Scheme registry and the uniform driver over all schemes"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Sequence, Union

from classifiers.bank import ClassifierBank
from classifiers.gaussian import GaussianModel
from classifiers.one_class import OneClassSet
from core.exceptions import UsageError
from dsqi.common import SchemeProcessor
from dsqi.confidence_based import (
    AdaptiveWindowProcessor,
    BayesianFusionProcessor,
    ConfidenceRejectionProcessor,
    ConfidenceScalingProcessor,
    VarianceRejectionProcessor,
)
from dsqi.decision_based import (
    DecayingConfidenceRejectionProcessor,
    MajorityVoteProcessor,
    PriorAdjustedLdaProcessor,
)
from dsqi.feature_based import OnsetLockProcessor, OutlierDetectionProcessor
from models.scheme_config import SCHEME_NAMES, SchemeConfig
from models.stream_model import (
    ClassCatalog,
    DecisionStream,
    ProcessedDecision,
    ProcessedStream,
    Tick,
)

logger = logging.getLogger(__name__)


class PassThroughProcessor(SchemeProcessor):
    """Baseline that emits the raw decisions unchanged"""

    name = "none"

    def reset(self) -> None:
        pass

    def process(self, tick: Tick) -> ProcessedDecision:
        return ProcessedDecision(frame_index=tick.frame_index, decision=tick.point.decision)

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        return ProcessedStream.passthrough(stream)


@dataclass
class SchemeResources:
    """Trained artifacts and stream facts the schemes may need

    Attributes:
        catalog: Class ids and the NM class
        gaussian: LDA model for pLDA posterior recomputation
        occ: One-class detectors for OD
        bank: Per-frame-length classifiers for AW
        th_mav: Onset threshold for OL when the config leaves it unset
        generative: Whether the stream's confidences come from a generative classifier
    """
    catalog: ClassCatalog
    gaussian: Optional[GaussianModel] = None
    occ: Optional[OneClassSet] = None
    bank: Optional[ClassifierBank] = None
    th_mav: Optional[float] = None
    generative: bool = True


_FACTORIES: Dict[str, Callable[[SchemeConfig, SchemeResources], SchemeProcessor]] = {
    "none": lambda cfg, res: PassThroughProcessor(cfg, res.catalog),
    "mv": lambda cfg, res: MajorityVoteProcessor(cfg, res.catalog),
    "plda": lambda cfg, res: PriorAdjustedLdaProcessor(cfg, res.catalog, res.gaussian, res.generative),
    "cbr": lambda cfg, res: ConfidenceRejectionProcessor(cfg, res.catalog),
    "cs": lambda cfg, res: ConfidenceScalingProcessor(cfg, res.catalog),
    "bf": lambda cfg, res: BayesianFusionProcessor(cfg, res.catalog),
    "aw": lambda cfg, res: AdaptiveWindowProcessor(cfg, res.catalog, res.bank),
    "ol": lambda cfg, res: OnsetLockProcessor(
        cfg if cfg.th_mav is not None or res.th_mav is None else cfg.with_overrides(th_mav=res.th_mav),
        res.catalog,
    ),
    "od": lambda cfg, res: OutlierDetectionProcessor(cfg, res.catalog, res.occ),
    "dcir": lambda cfg, res: DecayingConfidenceRejectionProcessor(cfg, res.catalog),
    "vocir": lambda cfg, res: VarianceRejectionProcessor(cfg, res.catalog),
}


def registered_schemes() -> tuple:
    return SCHEME_NAMES


def build_processor(config: SchemeConfig, resources: SchemeResources) -> SchemeProcessor:
    """Instantiate the processor of a scheme

    Raises:
        UsageError: If the scheme is not registered
        ConfigurationError: If a trained artifact the scheme needs is missing
        UnsupportedSchemeError: If pLDA has no generative classifier
    """
    try:
        factory = _FACTORIES[config.scheme]
    except KeyError:
        raise UsageError(f"unknown scheme '{config.scheme}'") from None
    return factory(config, resources)


def run_scheme(
    config: SchemeConfig,
    stream: Union[DecisionStream, Sequence[Tick]],
    resources: Optional[SchemeResources] = None,
) -> ProcessedStream:
    """Run one scheme over a stream

    A DecisionStream takes the vectorized path; a sequence of ticks is fed
    one at a time through ``process``. Processor state is reset before and
    after the run.

    Args:
        config: Scheme and hyperparameters
        stream: Whole stream or ticks in frame order
        resources: Trained artifacts; defaults to a catalog inferred from
            the stream with NM = class 1

    Returns:
        ProcessedStream with one entry per input frame

    Raises:
        ConfigurationError: If the stream lacks a payload the scheme needs
    """
    if not isinstance(stream, DecisionStream):
        stream = list(stream)
    if resources is None:
        resources = SchemeResources(catalog=ClassCatalog(_class_count(stream)))
    if isinstance(stream, DecisionStream):
        resources = replace(resources, generative=resources.generative and stream.generative)
        processor = build_processor(config, resources)
        logger.info("Running scheme %s on %d frames", config.scheme, len(stream))
        return processor.process_stream(stream)
    processor = build_processor(config, resources)
    ticks = stream
    for tick in ticks:
        processor.check_tick(tick)
    logger.info("Running scheme %s on %d ticks", config.scheme, len(ticks))
    return processor.process_ticks(ticks)


def _class_count(stream) -> int:
    if isinstance(stream, DecisionStream):
        return stream.n_classes
    for tick in stream:
        return tick.point.confidence.n_classes
    raise UsageError("cannot infer the class count of an empty tick sequence")
