"""Tests for steady-state and transition metrics"""

import math

import numpy as np
import pytest

from core.exceptions import AlignmentError, ArgumentError
from evaluation.report import aggregate, check_alignment, evaluate_stream
from evaluation.steady import instability, steady_metrics
from evaluation.transitions import centered_majority, detect_bounds, transition_metrics, transition_results
from models.stream_model import ProcessedStream
from models.timeline import GroundTruthTimeline, MetricsReport, Segment


def ideal_decisions(timeline):
    """Held class in steady frames, target class from the first transition frame"""
    decisions = np.empty(timeline.n_frames, dtype=np.int64)
    for seg in timeline:
        value = seg.class_id if seg.class_id is not None else seg.to_class
        decisions[seg.start_frame:seg.end_frame] = value
    return decisions


def shift_right(decisions, q):
    shifted = np.empty_like(decisions)
    shifted[:q] = decisions[0]
    shifted[q:] = decisions[:decisions.size - q]
    return shifted


class TestSteadyMetrics:
    """Tests for AER, TER and INS"""

    def test_instability(self):
        assert instability(np.array([1, 1, 2, 2, 1])) == pytest.approx(0.5)
        assert instability(np.array([3])) == 0.0

    def test_perfect_stream(self, small_timeline):
        aer, ter, ins = steady_metrics(ideal_decisions(small_timeline), small_timeline, nm_class=1)
        assert (aer, ter, ins) == (0.0, 0.0, 0.0)

    def test_rejected_active_segment(self):
        timeline = GroundTruthTimeline([Segment.steady(0, 50, 2)])
        aer, ter, _ = steady_metrics(np.ones(50, dtype=int), timeline, nm_class=1)
        assert aer == 0.0
        assert ter == 1.0

    def test_five_wrong_frames(self):
        timeline = GroundTruthTimeline([Segment.steady(0, 100, 2)])
        decisions = np.full(100, 2)
        decisions[50:55] = 3
        aer, ter, ins = steady_metrics(decisions, timeline, nm_class=1)
        assert aer == pytest.approx(0.05)
        assert ter == pytest.approx(0.05)
        assert ins == pytest.approx(2 / 99)

    def test_rest_segments_excluded_from_aer(self):
        timeline = GroundTruthTimeline([
            Segment.steady(0, 20, 1), Segment.transition(20, 30, 1, 2), Segment.steady(30, 50, 2),
        ])
        aer, ter, _ = steady_metrics(np.full(50, 2), timeline, nm_class=1)
        assert aer == 0.0
        assert ter == pytest.approx(0.5)

    def test_active_errors_averaged_over_active_segments(self):
        timeline = GroundTruthTimeline([
            Segment.steady(0, 10, 1), Segment.transition(10, 12, 1, 2), Segment.steady(12, 22, 2),
            Segment.transition(22, 24, 2, 3), Segment.steady(24, 34, 3),
        ])
        decisions = ideal_decisions(timeline)
        decisions[12:14] = 3
        decisions[0:5] = 2
        aer, ter, _ = steady_metrics(decisions, timeline, nm_class=1)
        assert aer == pytest.approx(0.1)
        assert ter == pytest.approx((0.5 + 0.2 + 0.0) / 3)

    def test_rest_only_timeline_has_no_aer(self):
        timeline = GroundTruthTimeline([Segment.steady(0, 10, 1)])
        decisions = np.array([1] * 8 + [2] * 2)
        aer, ter, _ = steady_metrics(decisions, timeline, nm_class=1)
        assert math.isnan(aer)
        assert ter == pytest.approx(0.2)

    def test_segments_weigh_equally(self):
        timeline = GroundTruthTimeline([
            Segment.steady(0, 10, 2), Segment.transition(10, 12, 2, 3), Segment.steady(12, 112, 3),
        ])
        decisions = np.array([1] * 10 + [3] * 102)
        _, ter, _ = steady_metrics(decisions, timeline, nm_class=1)
        assert ter == pytest.approx(0.5)


class TestBounds:
    """Tests for transition bound detection"""

    @pytest.fixture
    def timeline(self):
        return GroundTruthTimeline([
            Segment.steady(0, 30, 2), Segment.transition(30, 50, 2, 3), Segment.steady(50, 80, 3),
        ])

    def test_centered_vote_suppresses_blips(self):
        decisions = np.array([2] * 10 + [3] + [2] * 10)
        assert centered_majority(decisions).tolist() == [2] * 21

    def test_instant_flip(self, timeline):
        decisions = ideal_decisions(timeline)
        offset, onset = detect_bounds(decisions, timeline, timeline.transitions()[0])
        assert (offset, onset) == (30, 50)

    def test_blip_does_not_trigger_offset(self, timeline):
        decisions = np.array([2] * 35 + [3] * 45)
        decisions[31] = 4
        offset, _ = detect_bounds(decisions, timeline, timeline.transitions()[0])
        # the 2/3 tie at frame 34 goes to the later class
        assert offset == 34

    def test_no_onset_is_excluded(self, timeline):
        decisions = np.array([2] * 30 + [1] * 50)
        metrics = transition_metrics(decisions, timeline, nm_class=1)
        assert metrics["n_transitions"] == 0
        assert metrics["n_excluded"] == 1
        assert math.isnan(metrics["t_onset"])

    def test_window_metrics(self, timeline):
        decisions = np.array([2] * 30 + [1] * 5 + [4] * 2 + [3] * 13 + [3] * 30)
        (result,) = transition_results(decisions, timeline, nm_class=1)
        assert (result.offset_frame, result.onset_frame) == (30, 50)
        assert result.pnm == pytest.approx(0.25)
        assert result.tce == pytest.approx(0.10)
        assert result.t_offset == 0.0
        assert result.t_onset == 0.0
        assert result.t_transition == pytest.approx(320.0)

    def test_all_rejected_window(self, timeline):
        decisions = np.array([2] * 30 + [1] * 20 + [3] * 30)
        (result,) = transition_results(decisions, timeline, nm_class=1)
        assert result.pnm == 1.0
        assert result.tce == 0.0

    def test_delays_in_milliseconds(self, timeline):
        decisions = np.array([2] * 33 + [3] * 47)
        (result,) = transition_results(decisions, timeline, nm_class=1, increment_ms=10.0)
        assert result.t_offset == pytest.approx(30.0)
        assert result.t_onset == 0.0

    def test_foreign_segment(self, timeline):
        with pytest.raises(ArgumentError):
            detect_bounds(np.full(80, 2), timeline, Segment.transition(5, 8, 2, 3))


class TestShiftMonotonicity:
    """Delaying a stream never shortens the measured delays"""

    @pytest.fixture
    def timeline(self):
        return GroundTruthTimeline([
            Segment.steady(0, 30, 1), Segment.transition(30, 40, 1, 2), Segment.steady(40, 70, 2),
            Segment.transition(70, 80, 2, 3), Segment.steady(80, 110, 3),
        ])

    @pytest.mark.parametrize("q", [1, 5, 10])
    def test_right_shift(self, timeline, q):
        base = ideal_decisions(timeline)
        before = transition_metrics(base, timeline, nm_class=1)
        after = transition_metrics(shift_right(base, q), timeline, nm_class=1)
        assert after["t_offset"] == pytest.approx(before["t_offset"] + q * 16.0)
        assert after["t_onset"] >= before["t_onset"]


class TestReport:
    """Tests for per-trial reports and aggregation"""

    def test_perfect_report(self, small_timeline):
        report = evaluate_stream(ideal_decisions(small_timeline), small_timeline, nm_class=1)
        assert report.aer == report.ter == report.steady_ins == 0.0
        assert report.tce == report.pnm == 0.0
        assert report.t_offset == 0.0 and report.t_onset == 0.0
        assert report.n_steady == 3
        assert report.n_transitions == 2

    def test_processed_stream_alignment(self, small_timeline):
        decisions = ideal_decisions(small_timeline)
        n = decisions.size
        frame_index = np.arange(n)
        frame_index[7] = 99
        processed = ProcessedStream(frame_index, decisions, np.zeros(n, bool), np.full(n, np.nan))
        with pytest.raises(AlignmentError, match="frame 7"):
            evaluate_stream(processed, small_timeline, nm_class=1)

    def test_length_mismatch(self, small_timeline):
        with pytest.raises(AlignmentError):
            check_alignment(np.arange(100), small_timeline)

    def test_mean_of_two(self):
        report = aggregate([MetricsReport(ter=0.1), MetricsReport(ter=0.3)])
        assert report.ter == pytest.approx(0.2)

    def test_nested_average(self):
        reports = [MetricsReport(ter=0.0), MetricsReport(ter=0.0), MetricsReport(ter=0.6)]
        assert aggregate(reports).ter == pytest.approx(0.2)
        assert aggregate(reports, grouping=["a", "a", "b"]).ter == pytest.approx(0.3)

    def test_nan_is_skipped_and_counts_sum(self):
        reports = [MetricsReport(t_onset=32.0, n_transitions=2), MetricsReport(n_transitions=0, n_excluded=1)]
        report = aggregate(reports)
        assert report.t_onset == pytest.approx(32.0)
        assert report.n_transitions == 2
        assert report.n_excluded == 1

    def test_empty_aggregate(self):
        with pytest.raises(ArgumentError):
            aggregate([])
