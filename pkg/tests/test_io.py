"""Tests for CSV readers and writers, configuration loading and model persistence"""

import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest

from core.exceptions import ConfigurationError, ParseError, UsageError
from facade import DsqiPipeline
from models.stream_model import ProcessedStream
from models.timeline import MetricsReport
from parsers.config_parser import ConfigLoader, parse_override
from parsers.stream_reader import (
    read_features_csv,
    read_processed_csv,
    read_stream_csv,
    read_timeline_csv,
    read_values_csv,
)
from synthesis.confidence import gen_rest_amplitudes, gen_synthetic_stream, gen_training_features
from synthesis.timeline import gen_timeline
from writers.csv_writer import (
    fmt,
    write_features_csv,
    write_metrics_csv,
    write_processed_csv,
    write_stream_csv,
    write_timeline_csv,
    write_values_csv,
)
from writers.model_store import ModelSet, load_models, save_models
from writers.plot_writer import plot_decision_stream


@pytest.fixture
def trial(small_config):
    timeline = gen_timeline(small_config)
    return gen_synthetic_stream(small_config, timeline), timeline


@pytest.fixture
def pipeline_models(small_config):
    features, labels = gen_training_features(small_config)
    return DsqiPipeline().train_from_features(features, labels, gen_rest_amplitudes(small_config))


class TestStreamCsv:
    """Tests for confidence-stream files"""

    def test_round_trip(self, tmp_path, trial):
        stream, _ = trial
        path = str(tmp_path / "stream.csv")
        write_stream_csv(path, stream)
        restored = read_stream_csv(path)
        assert np.allclose(restored.confidences, stream.confidences, rtol=1e-8, atol=1e-12)
        assert np.array_equal(restored.decisions, stream.decisions)
        assert np.array_equal(restored.true_class, stream.true_class)
        assert np.allclose(restored.features, stream.features, rtol=1e-8)
        assert np.allclose(restored.mean_mav, stream.mean_mav, rtol=1e-8)
        assert restored.increment_ms == 16.0

    def test_header(self, tmp_path, trial):
        stream, _ = trial
        path = tmp_path / "stream.csv"
        write_stream_csv(str(path), stream)
        header = path.read_text().splitlines()[0].split(",")
        assert header[:7] == ["frame", "ts_ms", "true_class", "y_hat", "c_1", "c_2", "c_3"]
        assert header[7] == "mean_mav"
        assert header[-1] == "x_3"

    def test_bad_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("frame,ts_ms,true_class,y_hat,c_1,c_2\n0,0,1,1,0.9,0.1\n1,16,1,1,oops,0.1\n")
        with pytest.raises(ParseError, match=":3:") as info:
            read_stream_csv(str(path))
        assert info.value.line == 3

    def test_negative_confidence(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("frame,ts_ms,true_class,y_hat,c_1,c_2\n0,0,1,1,1.2,-0.2\n")
        with pytest.raises(ParseError):
            read_stream_csv(str(path))

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,c_1,c_2\n0,0.5,0.5\n")
        with pytest.raises(ParseError, match=":1:"):
            read_stream_csv(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            read_stream_csv(str(tmp_path / "absent.csv"))

    def test_nan_written_empty(self):
        assert fmt(float("nan")) == ""
        assert fmt(0.1) == "0.1"


class TestOtherFiles:
    """Tests for timeline, processed, feature and metric files"""

    def test_timeline_round_trip(self, tmp_path, trial):
        _, timeline = trial
        path = str(tmp_path / "timeline.csv")
        write_timeline_csv(path, timeline)
        assert read_timeline_csv(path) == timeline

    def test_timeline_gap(self, tmp_path):
        path = tmp_path / "timeline.csv"
        path.write_text(
            "kind,start_frame,end_frame,class,from_class,to_class\n"
            "steady,0,10,1,,\n"
            "transition,12,20,,1,2\n"
        )
        with pytest.raises(ParseError, match="contiguous"):
            read_timeline_csv(str(path))

    def test_processed_round_trip(self, tmp_path, trial):
        stream, _ = trial
        n = len(stream)
        thresholds = np.full(n, np.nan)
        thresholds[::2] = 0.75
        processed = ProcessedStream(stream.frame_index, stream.decisions, stream.max_confidence < 0.5, thresholds)
        path = str(tmp_path / "cbr.csv")
        write_processed_csv(path, stream, processed)
        restored = read_processed_csv(path)
        assert np.array_equal(restored.decisions, processed.decisions)
        assert np.array_equal(restored.rejected, processed.rejected)
        assert np.array_equal(np.isnan(restored.thresholds), np.isnan(thresholds))
        # processed files stay readable as streams
        assert len(read_stream_csv(path)) == n

    def test_processed_length_mismatch(self, tmp_path, trial):
        stream, _ = trial
        processed = ProcessedStream(np.arange(3), np.ones(3), np.zeros(3), np.zeros(3))
        with pytest.raises(ConfigurationError):
            write_processed_csv(str(tmp_path / "x.csv"), stream, processed)

    def test_features_and_values(self, tmp_path, small_config):
        features, labels = gen_training_features(small_config)
        write_features_csv(str(tmp_path / "f.csv"), features, labels)
        restored, restored_labels = read_features_csv(str(tmp_path / "f.csv"))
        assert np.array_equal(restored_labels, labels)
        assert np.allclose(restored, features, rtol=1e-8)
        write_values_csv(str(tmp_path / "v.csv"), "mean_mav", np.array([0.5, 0.25]))
        assert read_values_csv(str(tmp_path / "v.csv"), "mean_mav").tolist() == [0.5, 0.25]

    def test_metrics_table(self, tmp_path):
        reports = {"none": MetricsReport(ter=0.25, n_steady=3), "mv": MetricsReport(t_onset=48.0, n_transitions=2)}
        path = tmp_path / "metrics.csv"
        write_metrics_csv(str(path), reports)
        table = pd.read_csv(path)
        assert table["scheme"].tolist() == ["none", "none", "mv", "mv"]
        assert table["scope"].tolist() == ["steady", "transition"] * 2
        assert table.loc[0, "ter"] == pytest.approx(0.25)
        assert table.loc[3, "t_onset"] == pytest.approx(48.0)
        assert np.isnan(table.loc[1, "t_onset"])


class TestConfig:
    """Tests for the sectioned configuration loader"""

    @pytest.fixture
    def config_file(self, tmp_path):
        path = tmp_path / "dsqi.ini"
        path.write_text("[synth]\nn_classes = 3\n\n[cbr]\nth_rej = 0.9\n\n[run]\nschemes = none,cbr\n")
        return str(path)

    def test_file_values(self, config_file):
        loader = ConfigLoader(config_file)
        assert loader.generator_config().n_classes == 3
        assert loader.scheme_config("cbr").th_rej == 0.9
        assert loader.schemes() == ["none", "cbr"]

    def test_override_wins(self, config_file):
        loader = ConfigLoader(config_file, ["cbr.th_rej=0.8", "synth.seed=11"])
        assert loader.scheme_config("cbr").th_rej == 0.8
        assert loader.generator_config().seed == 11
        assert loader.generator_config(seed=5).seed == 5

    def test_discriminative_default(self):
        loader = ConfigLoader(overrides=["run.classifier_kind=discriminative"])
        assert loader.scheme_config("cbr").th_rej == 0.6

    @pytest.mark.parametrize("override", ["colour.x=1", "run.speed=3"])
    def test_unknown_section_or_key(self, override):
        with pytest.raises(UsageError):
            ConfigLoader(overrides=[override])

    def test_unknown_scheme_key(self):
        with pytest.raises(UsageError, match="tau2"):
            ConfigLoader(overrides=["dcir.tau2=3"]).scheme_config("dcir")

    def test_malformed_override(self):
        with pytest.raises(UsageError):
            parse_override("th_rej=0.5")

    def test_unknown_scheme(self):
        with pytest.raises(UsageError, match="xyz"):
            ConfigLoader().schemes("none,xyz")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ConfigLoader(str(tmp_path / "absent.ini"))


class TestModelStore:
    """Tests for JSON model persistence"""

    def test_identical_bytes(self, tmp_path, pipeline_models):
        save_models(str(tmp_path / "a"), pipeline_models)
        save_models(str(tmp_path / "b"), pipeline_models)
        for name in ("gaussian.json", "occ.json", "onset.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_load(self, tmp_path, pipeline_models):
        save_models(str(tmp_path), pipeline_models)
        loaded = load_models(str(tmp_path))
        assert loaded.gaussian.n_classes == 3
        assert sorted(loaded.occ) == [1, 2, 3]
        assert loaded.th_mav == pytest.approx(pipeline_models.th_mav)
        assert loaded.bank is None

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_models(str(tmp_path / "absent"))

    def test_corrupt_file(self, tmp_path):
        (tmp_path / "gaussian.json").write_text("{\n  broken")
        with pytest.raises(ParseError):
            load_models(str(tmp_path))

    def test_empty_set(self, tmp_path):
        save_models(str(tmp_path), ModelSet())
        assert list(tmp_path.iterdir()) == []


class TestPlot:
    """Tests for the SVG decision-stream plot"""

    def test_svg_parses(self, tmp_path, trial):
        stream, timeline = trial
        processed = ProcessedStream(stream.frame_index, stream.decisions,
                                    stream.max_confidence < 0.6, np.full(len(stream), np.nan))
        path = tmp_path / "plots" / "cbr.svg"
        plot_decision_stream(str(path), stream, processed, timeline, title="cbr")
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")

    def test_deterministic(self, tmp_path, trial):
        stream, timeline = trial
        processed = ProcessedStream(stream.frame_index, stream.decisions,
                                    np.zeros(len(stream), bool), np.full(len(stream), np.nan))
        for name in ("a.svg", "b.svg"):
            plot_decision_stream(str(tmp_path / name), stream, processed, timeline)
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
