"""Session format: manifests, raw streams, round trips, and error paths."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sleepmon.errors import (CorruptSessionError, InvalidDepthError,
                             ManifestMismatchError, RoiBoundsError)
from sleepmon.session import (MANIFEST_NAME, SessionManifest, crop_roi, load_session,
                              sessions_equal, write_session)

from conftest import build_session


class TestManifest:
    def test_defaults_match_sensor_geometry(self):
        man = SessionManifest()
        assert (man.depth_width, man.depth_height) == (640, 480)
        assert (man.video_rate, man.audio_rate) == (30, 16000)
        assert man.roi == (160, 65, 320, 350)

    def test_roi_must_fit_both_frames(self):
        with pytest.raises(ValueError):
            SessionManifest(roi=(630, 470, 320, 350))

    def test_rates_must_be_positive(self):
        with pytest.raises(ValueError):
            SessionManifest(video_rate=0)
        with pytest.raises(ValueError):
            SessionManifest(audio_rate=-1)

    def test_min_audio_samples_uses_floor(self):
        man = SessionManifest(frame_count=30)
        assert man.min_audio_samples == 30 * 16000 // 30


class TestRoundTrip:
    def test_write_then_load_is_identity(self, small_session, tmp_path):
        write_session(small_session, tmp_path / "s")
        again = load_session(tmp_path / "s")
        assert sessions_equal(small_session, again)

    def test_two_writes_are_byte_identical(self, small_session, tmp_path):
        write_session(small_session, tmp_path / "a")
        write_session(small_session, tmp_path / "b")
        for name in (MANIFEST_NAME, "depth.raw", "color.raw", "audio.raw"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_empty_session_round_trip(self, tmp_path):
        s = build_session(frame_count=0)
        write_session(s, tmp_path / "e")
        again = load_session(tmp_path / "e")
        assert again.manifest.frame_count == 0
        assert len(again.depth) == 0 and len(again.color) == 0
        assert sessions_equal(s, again)

    @settings(max_examples=25, deadline=None)
    @given(frame_count=st.integers(0, 4), width=st.integers(4, 10),
           height=st.integers(4, 10), seed=st.integers(0, 2 ** 16))
    def test_round_trip_property(self, tmp_path_factory, frame_count, width, height, seed):
        s = build_session(frame_count=frame_count, width=width, height=height,
                          roi=(0, 0, width, height), seed=seed)
        out = tmp_path_factory.mktemp("rt")
        write_session(s, out)
        assert sessions_equal(s, load_session(out))


class TestLoadErrors:
    def test_missing_stream_is_corrupt_session(self, small_session, tmp_path):
        write_session(small_session, tmp_path)
        (tmp_path / "color.raw").unlink()
        with pytest.raises(CorruptSessionError, match="corrupt session"):
            load_session(tmp_path)

    def test_missing_manifest_is_corrupt_session(self, tmp_path):
        with pytest.raises(CorruptSessionError, match="corrupt session"):
            load_session(tmp_path)

    def test_truncated_depth_is_manifest_mismatch(self, small_session, tmp_path):
        write_session(small_session, tmp_path)
        raw = (tmp_path / "depth.raw").read_bytes()
        (tmp_path / "depth.raw").write_bytes(raw[:-2])  # drop one sample
        with pytest.raises(ManifestMismatchError, match="manifest mismatch"):
            load_session(tmp_path)

    def test_out_of_range_depth_is_invalid_sample(self, small_session, tmp_path):
        write_session(small_session, tmp_path)
        raw = bytearray((tmp_path / "depth.raw").read_bytes())
        raw[0:2] = (2048).to_bytes(2, "little")
        (tmp_path / "depth.raw").write_bytes(bytes(raw))
        with pytest.raises(InvalidDepthError, match="invalid depth sample"):
            load_session(tmp_path)

    def test_short_audio_is_manifest_mismatch(self, small_session, tmp_path):
        write_session(small_session, tmp_path)
        raw = (tmp_path / "audio.raw").read_bytes()
        (tmp_path / "audio.raw").write_bytes(raw[:-4])
        with pytest.raises(ManifestMismatchError, match="manifest mismatch"):
            load_session(tmp_path)

    def test_unknown_manifest_key_is_corrupt(self, small_session, tmp_path):
        write_session(small_session, tmp_path)
        with open(tmp_path / MANIFEST_NAME, "a") as fh:
            fh.write("mystery=1\n")
        with pytest.raises(CorruptSessionError, match="corrupt session"):
            load_session(tmp_path)


class TestWriteValidation:
    def test_depth_over_range_rejected_before_io(self, tmp_path):
        s = build_session()
        s.depth[1, 2, 3] = 4000
        out = tmp_path / "bad"
        with pytest.raises(InvalidDepthError, match="invalid depth sample"):
            write_session(s, out)
        assert not (out / "depth.raw").exists()

    def test_frame_count_mismatch_rejected(self, tmp_path):
        s = build_session(frame_count=3)
        s.depth = s.depth[:2]
        with pytest.raises(ManifestMismatchError, match="manifest mismatch"):
            write_session(s, tmp_path / "bad")


class TestCropRoi:
    def test_full_frame_roi_is_identity(self):
        frame = np.arange(48, dtype=np.uint16).reshape(6, 8)
        out = crop_roi(frame, (0, 0, 8, 6))
        assert np.array_equal(out, frame)

    def test_standard_roi_indexing(self):
        frame = np.zeros((480, 640), np.uint16)
        frame[65, 160] = 1234
        out = crop_roi(frame, (160, 65, 320, 350))
        assert out.shape == (350, 320)
        assert out[0, 0] == 1234

    def test_out_of_bounds_roi(self):
        frame = np.zeros((480, 640), np.uint16)
        with pytest.raises(RoiBoundsError, match="roi out of range"):
            crop_roi(frame, (630, 470, 320, 350))

    def test_source_frame_unchanged(self):
        frame = np.ones((6, 8), np.uint16)
        out = crop_roi(frame, (1, 1, 3, 3))
        out[:] = 9
        assert frame.min() == frame.max() == 1
