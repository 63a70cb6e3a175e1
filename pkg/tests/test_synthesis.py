"""Tests for the synthetic timeline, confidence and signal generators"""

import numpy as np
import pytest

from core.exceptions import ArgumentError, UsageError
from features.extractors import mean_mav_batch
from features.windowing import frame_geometry, frame_windows, make_frames
from synthesis.config import GeneratorConfig
from synthesis.confidence import (
    gen_confidence_stream,
    gen_latent_features,
    gen_mean_mav,
    gen_rest_amplitudes,
    gen_synthetic_stream,
    gen_training_features,
    steady_blips,
    target_confidences,
)
from synthesis.emg import gen_emg, gen_training_signal
from synthesis.timeline import all_pairs_circuit, crossfade_weight, gen_timeline, schedule_classes


class TestGeneratorConfig:
    """Tests for generator configuration parsing and validation"""

    def test_defaults(self):
        cfg = GeneratorConfig()
        assert cfg.steady_frames == 188
        assert cfg.transition_frames == 31
        assert cfg.feature_dim == 7

    def test_from_strings(self):
        cfg = GeneratorConfig.from_dict(
            {"n_classes": "3", "schedule": "1,2,3", "volatility": "0.5", "blip_frames": "2"}
        )
        assert cfg.n_classes == 3
        assert cfg.schedule == (1, 2, 3)
        assert cfg.volatility == 0.5
        assert cfg.blip_frames == 2

    def test_unknown_key(self):
        with pytest.raises(UsageError, match="colour"):
            GeneratorConfig.from_dict({"colour": "red"})

    @pytest.mark.parametrize("overrides", [
        {"n_classes": 1}, {"nm_class": 9}, {"volatility": -1.0}, {"schedule": (1, 8)}, {"steady_ms": 0.0},
        {"blip_rate": 1.5}, {"blip_frames": 0}, {"blip_weight": 0.0},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ArgumentError):
            GeneratorConfig(**overrides)

    def test_default_profiles(self):
        profiles = GeneratorConfig(n_classes=3, n_channels=4).profiles()
        assert profiles.shape == (3, 4)
        assert np.all(profiles[0] == 0.01)
        assert profiles[1].max() == 1.0


class TestTimeline:
    """Tests for schedules and ground-truth timelines"""

    def test_all_pairs_k7(self):
        timeline = gen_timeline(GeneratorConfig())
        assert len(timeline.transitions()) == 42
        assert len(timeline.steady_segments()) == 43
        pairs = {(t.from_class, t.to_class) for t in timeline.transitions()}
        assert len(pairs) == 42

    def test_all_pairs_k3(self, small_config):
        assert len(gen_timeline(small_config).transitions()) == 6

    def test_circuit_starts_and_ends_at_rest(self):
        circuit = all_pairs_circuit(4, 1, np.random.default_rng(0))
        assert circuit[0] == circuit[-1] == 1
        assert len(circuit) == 13

    def test_single_class_schedule(self):
        timeline = gen_timeline(GeneratorConfig(n_classes=3, schedule=(1,)))
        assert len(timeline) == 1
        assert timeline.transitions() == []

    def test_rest_between(self):
        cfg = GeneratorConfig(n_classes=3, schedule=(2, 3), rest_between=True)
        assert schedule_classes(cfg) == [2, 1, 3]

    def test_repeated_class(self):
        with pytest.raises(ArgumentError, match="twice"):
            schedule_classes(GeneratorConfig(n_classes=3, schedule=(2, 2)))

    def test_crossfade_stays_inside(self):
        w = crossfade_weight(np.arange(10), 10)
        assert w[0] > 0 and w[-1] < 1
        assert np.all(np.diff(w) > 0)
        s = crossfade_weight(np.arange(10), 10, "sigmoid")
        assert np.all(np.diff(s) > 0)


class TestConfidenceStream:
    """Tests for synthetic confidence streams"""

    def test_deterministic(self, small_config):
        timeline = gen_timeline(small_config)
        first = gen_synthetic_stream(small_config, timeline)
        second = gen_synthetic_stream(small_config, timeline)
        assert np.array_equal(first.confidences, second.confidences)
        assert np.array_equal(first.features, second.features)
        assert np.array_equal(first.mean_mav, second.mean_mav)

    def test_seed_changes_stream(self, small_config):
        timeline = gen_timeline(small_config)
        first = gen_confidence_stream(small_config, timeline)
        second = gen_confidence_stream(small_config.with_overrides(seed=4), timeline)
        assert not np.array_equal(first.confidences, second.confidences)

    def test_unit_sum(self, small_config):
        stream = gen_confidence_stream(small_config, gen_timeline(small_config))
        assert np.allclose(stream.confidences.sum(axis=1), 1.0)
        assert np.all(stream.confidences >= 0)

    def test_labels_follow_timeline(self, small_config):
        timeline = gen_timeline(small_config)
        stream = gen_confidence_stream(small_config, timeline)
        assert np.array_equal(stream.true_class, timeline.frame_labels())

    def test_high_concentration_is_correct(self):
        cfg = GeneratorConfig(steady_concentration=1e4)
        timeline = gen_timeline(cfg)
        stream = gen_confidence_stream(cfg, timeline)
        steady = stream.true_class > 0
        assert np.mean(stream.decisions[steady] == stream.true_class[steady]) >= 0.999

    def test_zero_volatility_flips_once_per_transition(self):
        cfg = GeneratorConfig(volatility=0.0, steady_concentration=1e4)
        timeline = gen_timeline(cfg)
        stream = gen_confidence_stream(cfg, timeline)
        target, steady = target_confidences(cfg, timeline)
        assert np.allclose(stream.confidences[~steady], target[~steady])
        changes = np.count_nonzero(np.diff(stream.decisions))
        assert changes == len(timeline.transitions())

    def test_volatility_spreads_transitions(self, small_config):
        timeline = gen_timeline(small_config)
        target, steady = target_confidences(small_config, timeline)
        spread = []
        for volatility in (0.5, 4.0):
            cfg = small_config.with_overrides(volatility=volatility)
            confidences = gen_confidence_stream(cfg, timeline).confidences
            spread.append(np.abs(confidences[~steady] - target[~steady]).mean())
        assert spread[1] > spread[0]


class TestSteadyBlips:
    """Tests for steady-state error bursts"""

    def test_off_by_default(self, small_config):
        assert not steady_blips(small_config, gen_timeline(small_config)).any()

    def test_bursts_stay_inside_steady_segments(self, small_config):
        cfg = small_config.with_overrides(blip_rate=0.1, blip_frames=4)
        timeline = gen_timeline(cfg)
        blips = steady_blips(cfg, timeline)
        labels = timeline.frame_labels()
        assert blips.any()
        assert not blips[labels == 0].any()
        assert not np.any((blips > 0) & (blips == labels))
        assert blips.max() <= cfg.n_classes

    def test_high_concentration_shows_bursts(self):
        cfg = GeneratorConfig(steady_concentration=1e4, blip_rate=0.01)
        timeline = gen_timeline(cfg)
        stream = gen_confidence_stream(cfg, timeline)
        blips = steady_blips(cfg, timeline)
        steady = stream.true_class > 0
        expected = np.where(blips > 0, blips, stream.true_class)
        assert np.array_equal(stream.decisions[steady], expected[steady])
        assert np.mean(blips[steady] > 0) > 0.005

    def test_deterministic_and_isolated(self, small_config):
        cfg = small_config.with_overrides(blip_rate=0.05)
        timeline = gen_timeline(cfg)
        assert np.array_equal(steady_blips(cfg, timeline), steady_blips(cfg, timeline))
        # bursts use their own random stream
        assert np.array_equal(gen_mean_mav(cfg, timeline), gen_mean_mav(small_config, timeline))

    def test_features_shift_towards_burst_class(self, small_config):
        cfg = small_config.with_overrides(blip_rate=0.1, blip_weight=1.0, class_separation=50.0)
        timeline = gen_timeline(cfg)
        blips = steady_blips(cfg, timeline)
        features = gen_latent_features(cfg, timeline)
        shown = blips > 0
        assert shown.any()
        assert np.array_equal(np.argmax(features[shown], axis=1) + 1, blips[shown])


class TestFeaturesAndAmplitude:
    """Tests for latent features and amplitude envelopes"""

    def test_latent_shape(self, small_config):
        timeline = gen_timeline(small_config)
        assert gen_latent_features(small_config, timeline).shape == (timeline.n_frames, 3)

    def test_training_features(self, small_config):
        features, labels = gen_training_features(small_config)
        assert features.shape == (180, 3)
        assert np.bincount(labels).tolist() == [0, 60, 60, 60]
        assert np.argmax(features[labels == 2].mean(axis=0)) == 1

    def test_rest_amplitude_below_active(self, small_config):
        timeline = gen_timeline(small_config)
        mean_mav = gen_mean_mav(small_config, timeline)
        labels = timeline.frame_labels()
        rest = gen_rest_amplitudes(small_config)
        assert rest.shape == (60,)
        assert rest.max() < mean_mav[labels > 1].min()
        assert np.all(mean_mav >= 0)


class TestEmg:
    """Tests for the synthetic signal generator"""

    def test_frame_count_matches_timeline(self, small_config):
        timeline = gen_timeline(small_config)
        signal = gen_emg(small_config, timeline)
        assert signal.shape[1] == small_config.n_channels
        frames = make_frames(signal, small_config.frame_length_ms, small_config.increment_ms,
                             small_config.sample_rate_hz)
        assert len(frames) == timeline.n_frames

    def test_rest_frames_are_quiet(self, small_config):
        timeline = gen_timeline(small_config)
        signal = gen_emg(small_config, timeline)
        frame_samples, stride = frame_geometry(small_config.frame_length_ms, small_config.increment_ms,
                                               small_config.sample_rate_hz)
        amplitude = mean_mav_batch(frame_windows(signal, frame_samples, stride))
        rest, active = [], []
        for seg in timeline.steady_segments():
            # skip frames whose window still overlaps the previous segment
            inner = amplitude[seg.start_frame + 10:seg.end_frame]
            (rest if seg.class_id == small_config.nm_class else active).append(inner)
        assert np.concatenate(rest).max() < np.concatenate(active).min()

    def test_training_signal(self, small_config):
        signal, labels = gen_training_signal(small_config)
        assert signal.shape == (3 * 960, 6)
        assert labels.tolist()[::960] == [1, 2, 3]
