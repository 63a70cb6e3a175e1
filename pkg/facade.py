# File: dsqi_bench/facade.py
"""Main facade class for synthetic decision-stream experiments"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from classifiers.bank import steady_frame_labels, train_bank
from classifiers.gaussian import train_gaussian
from classifiers.one_class import train_occ
from core.exceptions import ConfigurationError, TrainingError, UsageError
from dsqi.feature_based import ol_threshold
from dsqi.runner import SchemeResources, run_scheme
from evaluation.report import check_alignment, evaluate_stream
from features.extractors import mean_mav_batch
from features.windowing import frame_geometry, frame_sample_ends, frame_windows
from models.scheme_config import SchemeConfig
from models.stream_model import ClassCatalog, DecisionStream, ProcessedStream
from models.timeline import GroundTruthTimeline, MetricsReport
from parsers.config_parser import ConfigLoader
from parsers.stream_reader import (
    read_features_csv,
    read_processed_csv,
    read_signal,
    read_stream_csv,
    read_timeline_csv,
    read_values_csv,
)
from synthesis.config import GeneratorConfig
from synthesis.confidence import gen_rest_amplitudes, gen_synthetic_stream, gen_training_features
from synthesis.emg import gen_emg, gen_training_signal
from synthesis.timeline import gen_timeline
from writers.csv_writer import (
    summary_frame,
    write_features_csv,
    write_metrics_csv,
    write_processed_csv,
    write_stream_csv,
    write_summary_csv,
    write_timeline_csv,
    write_values_csv,
)
from writers.model_store import ModelSet, load_models, save_models

logger = logging.getLogger(__name__)

STREAM_FILE = "stream.csv"
TIMELINE_FILE = "timeline.csv"
TRAINING_FEATURES_FILE = "training_features.csv"
REST_FILE = "rest_mav.csv"
SIGNAL_FILE = "signal.npy"
TRAINING_SIGNAL_FILE = "training_signal.npy"
TRAINING_LABELS_FILE = "training_labels.npy"
PROCESSED_DIR = "processed"
PLOT_DIR = "plots"
METRICS_FILE = "metrics.csv"
SUMMARY_FILE = "summary.csv"


class DsqiPipeline:
    """Main facade over generation, training, scheme runs and evaluation

    This class orchestrates the pipeline:
    1. Synthesize a timeline with a confidence stream or raw signal
    2. Train the LDA, one-class detectors, AW bank and onset threshold
    3. Run schemes over a decision stream
    4. Evaluate processed streams against the timeline
    """

    def __init__(self, loader: Optional[ConfigLoader] = None):
        """Initialize pipeline

        Args:
            loader: Configuration; defaults to built-in values only
        """
        self.loader = loader if loader is not None else ConfigLoader()

    @property
    def nm_class(self) -> int:
        return int(self.loader.section("run")["nm_class"])

    @property
    def classifier_kind(self) -> str:
        return self.loader.section("run")["classifier_kind"]

    # ------------------------------------------------------------------
    # synth
    # ------------------------------------------------------------------

    def synthesize(self, cfg: GeneratorConfig, out_dir: str, emg: bool = False) -> Dict[str, object]:
        """Generate a trial plus training material into ``out_dir``

        Args:
            cfg: Generator configuration
            out_dir: Output directory
            emg: Write raw signals (.npy) instead of a confidence stream

        Returns:
            Summary counts and written paths
        """
        root = Path(out_dir)
        # 1. Timeline
        timeline = gen_timeline(cfg)
        write_timeline_csv(str(root / TIMELINE_FILE), timeline)
        summary: Dict[str, object] = {
            "frames": timeline.n_frames,
            "steady_segments": len(timeline.steady_segments()),
            "transitions": len(timeline.transitions()),
            "timeline": str(root / TIMELINE_FILE),
        }
        # 2. Trial data
        if emg:
            _save_array(root / SIGNAL_FILE, gen_emg(cfg, timeline))
            signal, labels = gen_training_signal(cfg)
            _save_array(root / TRAINING_SIGNAL_FILE, signal)
            _save_array(root / TRAINING_LABELS_FILE, labels)
            summary["signal"] = str(root / SIGNAL_FILE)
        else:
            stream = gen_synthetic_stream(cfg, timeline)
            write_stream_csv(str(root / STREAM_FILE), stream)
            features, labels = gen_training_features(cfg)
            write_features_csv(str(root / TRAINING_FEATURES_FILE), features, labels)
            write_values_csv(str(root / REST_FILE), "mean_mav", gen_rest_amplitudes(cfg))
            summary["stream"] = str(root / STREAM_FILE)
        logger.info("Synthesized %d frames with %d transitions", timeline.n_frames, summary["transitions"])
        return summary

    # ------------------------------------------------------------------
    # train
    # ------------------------------------------------------------------

    def train_from_features(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        rest_mav: Optional[np.ndarray] = None,
        n_classes: Optional[int] = None,
    ) -> ModelSet:
        """Train the LDA and one-class detectors on labeled feature vectors

        Raises:
            TrainingError: If a class is missing or training fails
        """
        regularization = self.loader.get_float("train", "regularization")
        quantile = self.loader.get_float("train", "occ_quantile")
        n_classes = self._check_classes(labels, n_classes)
        models = ModelSet(
            gaussian=train_gaussian(features, labels, regularization, n_classes=n_classes),
            occ=train_occ(features, labels, quantile, regularization),
        )
        if rest_mav is not None:
            models.th_mav = ol_threshold(rest_mav)
        return models

    def train_from_signal(self, signal: np.ndarray, sample_labels: np.ndarray,
                          cfg: Optional[GeneratorConfig] = None) -> ModelSet:
        """Train the AW bank, LDA, one-class detectors and onset threshold on a recording"""
        cfg = cfg if cfg is not None else self.loader.generator_config()
        aw = self.loader.scheme_config("aw")
        self._check_classes(sample_labels[sample_labels > 0], cfg.n_classes)
        lengths = aw.frame_lengths()
        if cfg.frame_length_ms not in lengths:
            lengths = tuple(sorted(set(lengths) | {cfg.frame_length_ms}))
        bank = train_bank(signal, sample_labels, lengths, cfg.increment_ms, cfg.sample_rate_hz,
                          self.loader.get_float("train", "regularization"), n_classes=cfg.n_classes)

        frame_samples, stride = frame_geometry(cfg.frame_length_ms, cfg.increment_ms, cfg.sample_rate_hz)
        windows = frame_windows(signal, frame_samples, stride)
        labels = steady_frame_labels(sample_labels, frame_samples, stride, windows.shape[0])
        keep = labels > 0
        extractor, classifier = bank.entries[cfg.frame_length_ms]
        features = extractor.extract_batch(windows[keep])
        models = ModelSet(
            gaussian=classifier.model,
            occ=train_occ(features, labels[keep], self.loader.get_float("train", "occ_quantile")),
            bank=bank,
        )
        rest = keep & (labels == cfg.nm_class)
        models.th_mav = ol_threshold(mean_mav_batch(windows[rest]))
        return models

    def train(
        self,
        out_dir: str,
        features_path: Optional[str] = None,
        rest_path: Optional[str] = None,
        signal_path: Optional[str] = None,
        labels_path: Optional[str] = None,
        n_classes: Optional[int] = None,
    ) -> ModelSet:
        """Train from files and save the models to ``out_dir``"""
        if signal_path is not None:
            if labels_path is None:
                raise ConfigurationError("training from a signal needs its per-sample labels")
            labels = np.asarray(read_signal(labels_path)[:, 0], dtype=np.int64)
            cfg = self.loader.generator_config(n_classes=n_classes)
            models = self.train_from_signal(read_signal(signal_path), labels, cfg)
        elif features_path is not None:
            features, labels = read_features_csv(features_path)
            rest = read_values_csv(rest_path, "mean_mav") if rest_path is not None else None
            models = self.train_from_features(features, labels, rest, n_classes)
        else:
            raise ConfigurationError("nothing to train on: give a features file or a signal")
        save_models(out_dir, models)
        return models

    # ------------------------------------------------------------------
    # run
    # ------------------------------------------------------------------

    def stream_from_signal(
        self,
        signal: np.ndarray,
        models: ModelSet,
        cfg: Optional[GeneratorConfig] = None,
        timeline: Optional[GroundTruthTimeline] = None,
    ) -> DecisionStream:
        """Frame a recording and classify it with the base-length bank entry"""
        if models.bank is None:
            raise ConfigurationError("classifying a signal needs a trained classifier bank")
        cfg = cfg if cfg is not None else self.loader.generator_config()
        frame_samples, stride = frame_geometry(cfg.frame_length_ms, cfg.increment_ms, cfg.sample_rate_hz)
        windows = frame_windows(signal, frame_samples, stride)
        extractor, classifier = models.bank.entries[cfg.frame_length_ms]
        features = extractor.extract_batch(windows)
        return DecisionStream(
            confidences=classifier.posterior_batch(features),
            true_class=None if timeline is None else timeline.frame_labels(),
            mean_mav=mean_mav_batch(windows),
            features=features,
            signal=signal,
            sample_ends=frame_sample_ends(windows.shape[0], frame_samples, stride),
            increment_ms=cfg.increment_ms,
            generative=classifier.is_generative,
        )

    def resources(self, stream: DecisionStream, models: ModelSet) -> SchemeResources:
        """Trained artifacts usable on this stream"""
        gaussian = models.gaussian
        if gaussian is not None and (stream.features is None or stream.features.shape[1] != gaussian.dimension):
            logger.info("Stream features do not fit the LDA; plda reweights stored confidences")
            gaussian = None
        return SchemeResources(
            catalog=ClassCatalog(stream.n_classes, self.nm_class),
            gaussian=gaussian,
            occ=models.occ or None,
            bank=models.bank,
            th_mav=models.th_mav,
            generative=stream.generative,
        )

    def run(
        self,
        stream: DecisionStream,
        schemes: Sequence[str],
        models: Optional[ModelSet] = None,
        configs: Optional[Mapping[str, SchemeConfig]] = None,
        skip_unavailable: bool = False,
    ) -> Dict[str, ProcessedStream]:
        """Run every requested scheme over one stream

        Args:
            stream: Raw decision stream
            schemes: Scheme names
            models: Trained artifacts
            configs: Explicit configurations replacing the loader's
            skip_unavailable: Log and skip schemes whose payload or trained
                artifact is missing instead of raising

        Returns:
            Scheme name -> processed stream, in request order

        Raises:
            ConfigurationError: If a scheme cannot run and skipping is off
        """
        resources = self.resources(stream, models if models is not None else ModelSet())
        results: Dict[str, ProcessedStream] = {}
        for scheme in schemes:
            config = (configs or {}).get(scheme) or self.loader.scheme_config(scheme, self.classifier_kind)
            try:
                results[scheme] = run_scheme(config, stream, resources)
            except ConfigurationError as e:
                if not skip_unavailable or isinstance(e, UsageError):
                    raise
                logger.warning("Skipping scheme %s: %s", scheme, e)
        return results

    def run_files(
        self,
        out_dir: str,
        schemes: Sequence[str],
        stream_path: Optional[str] = None,
        signal_path: Optional[str] = None,
        models_dir: Optional[str] = None,
        timeline_path: Optional[str] = None,
        skip_unavailable: bool = False,
    ) -> Dict[str, str]:
        """Run schemes on a stream (or a signal) file; one processed CSV per scheme"""
        models = load_models(models_dir) if models_dir is not None else ModelSet()
        timeline = read_timeline_csv(timeline_path) if timeline_path is not None else None
        if signal_path is not None:
            stream = self.stream_from_signal(read_signal(signal_path), models, timeline=timeline)
            write_stream_csv(str(Path(out_dir) / STREAM_FILE), _without_signal(stream))
        elif stream_path is not None:
            stream = read_stream_csv(stream_path, generative=self.classifier_kind == "generative")
        else:
            raise ConfigurationError("nothing to run on: give a stream file or a signal")
        written = {}
        for scheme, processed in self.run(stream, schemes, models, skip_unavailable=skip_unavailable).items():
            path = str(Path(out_dir) / PROCESSED_DIR / f"{scheme}.csv")
            write_processed_csv(path, _without_signal(stream), processed)
            written[scheme] = path
        return written

    # ------------------------------------------------------------------
    # eval
    # ------------------------------------------------------------------

    def evaluate(
        self,
        processed: Mapping[str, ProcessedStream],
        timeline: GroundTruthTimeline,
        increment_ms: float,
    ) -> Dict[str, MetricsReport]:
        """Metrics of every processed stream against one timeline"""
        return {
            scheme: evaluate_stream(stream, timeline, self.nm_class, increment_ms)
            for scheme, stream in processed.items()
        }

    def evaluate_files(
        self,
        processed_paths: Sequence[str],
        timeline_path: str,
        out_dir: str,
        plot: bool = False,
    ) -> pd.DataFrame:
        """Evaluate processed CSVs; writes metrics.csv, summary.csv and optional SVG plots"""
        timeline = read_timeline_csv(timeline_path)
        increment = self.loader.get_float("eval", "increment_ms")
        processed: Dict[str, ProcessedStream] = {}
        streams: Dict[str, DecisionStream] = {}
        for path in processed_paths:
            scheme = Path(path).stem
            processed[scheme] = read_processed_csv(path)
            check_alignment(processed[scheme].frame_index, timeline)
            if plot or increment is None:
                streams[scheme] = read_stream_csv(path)
        if increment is None:
            increment = next(iter(streams.values())).increment_ms if streams else 16.0
        reports = self.evaluate(processed, timeline, increment)
        write_metrics_csv(str(Path(out_dir) / METRICS_FILE), reports)
        summary = write_summary_csv(str(Path(out_dir) / SUMMARY_FILE), reports)
        if plot:
            from writers.plot_writer import plot_decision_stream

            for scheme, stream in streams.items():
                plot_decision_stream(str(Path(out_dir) / PLOT_DIR / f"{scheme}.svg"),
                                     stream, processed[scheme], timeline, title=scheme)
        return summary

    def compare(
        self,
        stream: DecisionStream,
        timeline: GroundTruthTimeline,
        schemes: Sequence[str],
        models: Optional[ModelSet] = None,
        out_dir: Optional[str] = None,
        skip_unavailable: bool = False,
    ) -> pd.DataFrame:
        """Run and evaluate several schemes; one summary row per scheme

        When ``out_dir`` is given, metrics.csv and summary.csv are written there.
        """
        check_alignment(stream.frame_index, timeline)
        processed = self.run(stream, schemes, models, skip_unavailable=skip_unavailable)
        reports = self.evaluate(processed, timeline, stream.increment_ms)
        if out_dir is None:
            return summary_frame(reports)
        write_metrics_csv(str(Path(out_dir) / METRICS_FILE), reports)
        return write_summary_csv(str(Path(out_dir) / SUMMARY_FILE), reports)

    def tune_threshold_to_ter(
        self,
        stream: DecisionStream,
        timeline: GroundTruthTimeline,
        target_ter: float,
        thresholds: Optional[Sequence[float]] = None,
        tolerance: float = 0.1,
    ) -> Tuple[float, MetricsReport]:
        """Sweep the CBR threshold for the steady TER closest to ``target_ter``

        Args:
            stream: Raw decision stream
            timeline: Ground truth
            target_ter: TER to match
            thresholds: Candidate thresholds (default 0.30 .. 0.999)
            tolerance: Relative TER mismatch accepted

        Returns:
            Tuple of the chosen threshold and its metrics

        Raises:
            ConfigurationError: If no candidate lands within the tolerance
        """
        if thresholds is None:
            thresholds = np.round(np.linspace(0.30, 0.999, 700), 6)
        catalog = ClassCatalog(stream.n_classes, self.nm_class)
        base = self.loader.scheme_config("cbr", self.classifier_kind)
        best: Optional[Tuple[float, float, MetricsReport]] = None
        for th in thresholds:
            processed = run_scheme(replace(base, th_rej=float(th)), stream, SchemeResources(catalog))
            report = evaluate_stream(processed, timeline, self.nm_class, stream.increment_ms)
            gap = abs(report.ter - target_ter)
            if best is None or gap < best[1]:
                best = (float(th), gap, report)
        th, gap, report = best
        if target_ter > 0 and gap > tolerance * target_ter:
            raise ConfigurationError(f"no CBR threshold reaches TER {target_ter:.4f} (closest {report.ter:.4f})")
        logger.info("CBR threshold %.4f gives TER %.4f (target %.4f)", th, report.ter, target_ter)
        return th, report

    @staticmethod
    def _check_classes(labels: np.ndarray, n_classes: Optional[int]) -> int:
        present = set(np.unique(labels).tolist())
        n_classes = n_classes if n_classes is not None else max(present)
        if n_classes < 2 or len(present) < 2:
            raise TrainingError(f"training data holds {len(present)} class(es); at least 2 are needed")
        for k in range(1, n_classes + 1):
            if k not in present:
                raise TrainingError(f"class {k} has no training samples")
        return n_classes


def _without_signal(stream: DecisionStream) -> DecisionStream:
    return replace(stream, signal=None, sample_ends=None)


def _save_array(path: Path, array: np.ndarray) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.save(path, array, allow_pickle=False)
    except OSError as e:
        raise ConfigurationError(f"cannot write {path}: {e.strerror}") from e
