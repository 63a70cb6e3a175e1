# File: dsqi_bench/dsqi/common.py
"""Shared plumbing for the scheme processors"""

import logging
from typing import Optional

import numpy as np

from core.base import StreamProcessor
from core.exceptions import ArgumentError, ConfigurationError
from models.scheme_config import SchemeConfig
from models.stream_model import ClassCatalog, DecisionStream, ProcessedStream, Tick

logger = logging.getLogger(__name__)


class SchemeProcessor(StreamProcessor):
    """Base class holding the configuration and class catalog of a scheme

    Subclasses implement ``process`` and ``reset`` for the streaming path and
    ``_process_batch`` for the vectorized path.
    """

    def __init__(self, config: SchemeConfig, catalog: ClassCatalog):
        self.config = config
        self.catalog = catalog

    @property
    def nm_class(self) -> int:
        return self.catalog.nm_class

    @property
    def n_classes(self) -> int:
        return self.catalog.n_classes

    def process_stream(self, stream: DecisionStream) -> ProcessedStream:
        self.check_stream(stream)
        self.reset()
        try:
            return self._process_batch(stream)
        finally:
            self.reset()

    def _process_batch(self, stream: DecisionStream) -> ProcessedStream:
        return super().process_stream(stream)

    def check_stream(self, stream: DecisionStream) -> None:
        """Verify class count and payloads before a batch run

        Raises:
            ArgumentError: If the stream's class count differs from the catalog
            ConfigurationError: If a payload the scheme needs is missing
        """
        if stream.n_classes != self.n_classes:
            raise ArgumentError(
                f"stream has {stream.n_classes} classes, scheme '{self.name}' expects {self.n_classes}"
            )
        missing = self.requires - stream.payloads()
        if missing:
            raise ConfigurationError(
                f"scheme '{self.name}' needs {', '.join(sorted(missing))} which the stream does not carry"
            )

    def check_tick(self, tick: Tick) -> None:
        for payload, value in (("features", tick.features), ("mean_mav", tick.mean_mav),
                               ("signal", tick.samples)):
            if payload in self.requires and value is None:
                raise ConfigurationError(
                    f"scheme '{self.name}' needs {payload} on every tick (missing at frame {tick.frame_index})"
                )

    def _in_warmup(self, seen: int) -> bool:
        """True while fewer than m + 1 frames have been seen and warm-up emits NM"""
        return self.config.warmup == "nm" and seen < self.config.m + 1

    def _finish(
        self,
        stream: DecisionStream,
        decisions: np.ndarray,
        rejected: Optional[np.ndarray] = None,
        thresholds: Optional[np.ndarray] = None,
        adjusted: Optional[np.ndarray] = None,
        frame_length_ms: Optional[np.ndarray] = None,
    ) -> ProcessedStream:
        n = len(stream)
        return ProcessedStream(
            frame_index=stream.frame_index.copy(),
            decisions=decisions,
            rejected=np.zeros(n, dtype=bool) if rejected is None else rejected,
            thresholds=np.full(n, np.nan) if thresholds is None else thresholds,
            adjusted=adjusted,
            frame_length_ms=frame_length_ms,
        )
