"""Epoch aggregation, the three-point event rule (with oracle), clips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sleepmon.events import (DetectorConfig, Event, clip_range, detect_events, epochize,
                             epoch_peaks, format_epochs_csv, format_event_log,
                             parse_event_log, record_clips, run_detector)
from sleepmon.scoring import ScoreSeries

from conftest import build_session


def detect_ref(counts):
    """Maximal-run characterization over zero-padded counts (oracle)."""
    c = [0] + [int(x) for x in counts] + [0]
    spans = []
    for s in range(1, len(c) - 1):
        if not c[s - 1] < c[s]:
            continue
        e = s
        while c[e] <= c[e + 1]:
            e += 1
        spans.append((s - 1, e - 1))
    maximal = [sp for sp in spans
               if not any(o != sp and o[0] <= sp[0] and sp[1] <= o[1] for o in spans)]
    return sorted(set(maximal))


class TestEpochize:
    def test_all_zero(self):
        series = np.zeros(90)
        assert np.array_equal(epochize(series, 0.5), [0, 0, 0])

    def test_all_above(self):
        series = np.full(60, 0.9)
        assert np.array_equal(epochize(series, 0.5), [30, 30])

    def test_mixed_second(self):
        series = np.concatenate([np.full(10, 0.3), np.zeros(20)])
        assert np.array_equal(epochize(series, 0.1), [10])

    def test_partial_final_second_dropped(self):
        series = np.full(75, 0.9)
        assert len(epochize(series, 0.5)) == 2

    def test_threshold_is_strict(self):
        series = np.full(30, 0.5)
        assert epochize(series, 0.5)[0] == 0

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        series = rng.uniform(0, 1, 300)
        lo = epochize(series, 0.2)
        hi = epochize(series, 0.6)
        assert np.all(hi <= lo)


class TestDetectEvents:
    def test_rise_plateau_fall(self):
        assert detect_events([0, 0, 2, 3, 3, 1, 0]) == [(2, 4)]

    def test_all_zero(self):
        assert detect_events([0, 0, 0]) == []

    def test_isolated_spike_is_length_one(self):
        assert detect_events([5]) == [(0, 0)]

    def test_back_to_back_events(self):
        assert detect_events([3, 1, 2, 0]) == [(0, 0), (2, 2)]

    def test_matches_oracle_on_random_sequences(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            counts = rng.integers(0, 31, size=rng.integers(1, 60))
            assert detect_events(counts) == detect_ref(counts)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 30), min_size=1, max_size=40))
    def test_matches_oracle_property(self, counts):
        assert detect_events(counts) == detect_ref(counts)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 30), min_size=1, max_size=60))
    def test_spans_disjoint_and_ordered(self, counts):
        spans = detect_events(counts)
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert s1 <= e1 < s2 <= e2


class TestClips:
    def test_motion_clip_with_margin(self):
        s = build_session(frame_count=450)
        assert record_clips("motion", 10, 12, s) == (270, 419)

    def test_noise_clip_with_margin(self):
        got = clip_range("noise", 5, 5, video_rate=30, audio_rate=16000,
                         frame_count=300, audio_samples=160000)
        assert got == (64000, 112000)

    def test_clamped_at_session_start(self):
        got = clip_range("motion", 0, 0, video_rate=30, audio_rate=16000,
                         frame_count=90, audio_samples=48000)
        assert got[0] == 0

    def test_clamped_at_session_end(self):
        got = clip_range("motion", 2, 2, video_rate=30, audio_rate=16000,
                         frame_count=90, audio_samples=48000)
        assert got == (30, 89)

    def test_span_outside_session_rejected(self):
        with pytest.raises(ValueError):
            clip_range("motion", 2, 3, video_rate=30, audio_rate=16000,
                       frame_count=90, audio_samples=48000)


class TestDetectorConfig:
    def test_threshold_range_checked(self):
        with pytest.raises(ValueError):
            DetectorConfig(thresholds={"depth": 0.0, "color": 0.05, "audio": 0.1})

    def test_defaults(self):
        cfg = DetectorConfig()
        assert cfg.thresholds["depth"] == 0.02
        assert cfg.burn_in_seconds == 10


class TestRunDetector:
    def _static(self, seconds=12):
        n = seconds * 30
        s = build_session(frame_count=n, width=12, height=10, roi=(1, 1, 8, 8))
        s.depth = np.full((n, 10, 12), 900, np.uint16)
        s.color = np.full((n, 10, 12, 3), 40, np.uint8)
        s.audio = np.zeros(s.manifest.min_audio_samples, np.int16)
        return s

    def test_static_session_has_no_events(self):
        res = run_detector(self._static())
        assert all(len(v) == 0 for v in res.events.values())

    def test_empty_session(self):
        s = build_session(frame_count=0)
        res = run_detector(s)
        assert all(len(v) == 0 for v in res.events.values())
        assert all(len(v) == 0 for v in res.epochs.values())

    def test_audio_perturbation_leaves_visual_events_alone(self):
        s1 = self._static(14)
        s2 = self._static(14)
        burst = np.zeros(s2.manifest.min_audio_samples, np.int16)
        burst[12 * 16000:13 * 16000] = 20000
        s2.audio = burst
        r1, r2 = run_detector(s1), run_detector(s2)
        assert len(r2.events["noise"]) == 1
        assert r1.events["motion"] == r2.events["motion"]
        assert r1.events["light"] == r2.events["light"]
        assert np.array_equal(r1.epochs["depth"], r2.epochs["depth"])

    def test_burn_in_zeroes_early_epochs(self):
        s = self._static(12)
        # loud audio during the burn-in window only
        loud = np.zeros(s.manifest.min_audio_samples, np.int16)
        loud[: 5 * 16000] = 20000
        s.audio = loud
        res = run_detector(s)
        assert len(res.events["noise"]) == 0
        assert np.all(res.epochs["audio"][:10] == 0)


class TestEpochPeaks:
    def test_peaks_are_per_second_maxima(self):
        values = np.zeros(60)
        values[10] = 0.5
        values[40] = 0.2
        peaks = epoch_peaks(ScoreSeries("depth", values))
        assert np.array_equal(peaks, [0.5, 0.2])


class TestEventLog:
    def test_format_golden(self):
        events = {"motion": [Event("motion", 2, 4, 0.125, 30, 179)],
                  "light": [], "noise": [Event("noise", 7, 7, 0.25, 96000, 144000)]}
        text = format_event_log(events)
        lines = text.splitlines()
        assert lines[0] == "channel,start_epoch,end_epoch,peak_score,clip_start,clip_end"
        assert lines[1] == "motion,2,4,0.125000,30,179"
        assert lines[2] == "noise,7,7,0.250000,96000,144000"

    def test_round_trip(self):
        events = {"motion": [Event("motion", 2, 4, 0.125, 30, 179)],
                  "light": [Event("light", 1, 1, 1.0, 0, 89)], "noise": []}
        parsed = parse_event_log(format_event_log(events))
        assert parsed["motion"] == events["motion"]
        assert parsed["light"] == events["light"]
        assert parsed["noise"] == []

    def test_epochs_csv(self):
        epochs = {"depth": np.array([0, 3]), "color": np.array([1, 0]),
                  "audio": np.array([30, 2])}
        assert format_epochs_csv(epochs).splitlines() == [
            "epoch,depth,color,audio", "0,0,1,30", "1,3,0,2"]
