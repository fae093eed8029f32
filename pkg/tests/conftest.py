import numpy as np
import pytest

from sleepmon.session import Session, SessionManifest


def build_session(frame_count=3, width=8, height=6, roi=(1, 1, 4, 4),
                  video_rate=30, audio_rate=16000, seed=0, audio=None):
    """Small deterministic in-memory session for format and pipeline tests."""
    rng = np.random.default_rng(seed)
    man = SessionManifest(
        depth_width=width, depth_height=height, color_width=width, color_height=height,
        video_rate=video_rate, audio_rate=audio_rate, frame_count=frame_count, roi=roi)
    depth = rng.integers(0, 2048, (frame_count, height, width), dtype=np.uint16)
    color = rng.integers(0, 256, (frame_count, height, width, 3), dtype=np.uint8)
    if audio is None:
        audio = rng.integers(-32768, 32768, man.min_audio_samples, dtype=np.int16)
    return Session(manifest=man, depth=depth, color=color, audio=np.asarray(audio, np.int16))


@pytest.fixture
def small_session():
    return build_session()
