import numpy as np
import pytest
from scipy.io import wavfile

from choreo.audio import AudioBuffer, MfccFrames, compute_mfcc
from choreo.dance import ACTION_ORDER
from choreo.features import MusicMatrix, music_matrix

SR = 22050


def make_click_track(bpm: float, duration_s: float = 10.0, sr: int = SR):
    """Click train plus its ground-truth click times."""
    signal = np.zeros(int(duration_s * sr))
    n = int(0.008 * sr)
    burst = np.sin(2 * np.pi * 1200 * np.arange(n) / sr) * np.exp(
        -np.arange(n) / (0.002 * sr)
    )
    interval = 60.0 / bpm
    truth = []
    k = 0
    while int(k * interval * sr) + n <= signal.size:
        start = int(k * interval * sr)
        signal[start : start + n] += 0.9 * burst
        truth.append(k * interval)
        k += 1
    audio = AudioBuffer(samples=np.clip(signal, -1, 1), sample_rate=sr)
    return audio, np.array(truth)


def make_repeated_clip(sr: int = SR) -> AudioBuffer:
    """A 5 s music-like segment concatenated twice (10 s total).

    The segment has its own internal note structure plus a click layer, so
    the music matrix shows clear blocks and a strong half-length repeat.
    """
    t = np.arange(sr // 2) / sr
    fade = np.minimum(1.0, np.minimum(t, t[::-1]) / 0.01)

    def note(freq, shape):
        tone = np.sin(2 * np.pi * freq * t)
        if shape:  # brighter timbre for contrast between sections
            tone = tone + 0.5 * np.sin(2 * np.pi * 2 * freq * t) + 0.25 * np.sin(
                2 * np.pi * 3 * freq * t
            )
        return 0.5 * fade * tone / (1.75 if shape else 1.0)

    melody = [
        (220.0, False), (330.0, True), (220.0, False), (330.0, True), (277.2, False),
        (277.2, False), (440.0, True), (220.0, False), (330.0, True), (440.0, True),
    ]
    clip = np.concatenate([note(f, s) for f, s in melody])

    n = int(0.008 * sr)
    burst = np.sin(2 * np.pi * 1500 * np.arange(n) / sr) * np.exp(
        -np.arange(n) / (0.002 * sr)
    )
    for k in range(10):
        start = k * sr // 2
        clip[start : start + n] += 0.35 * burst

    samples = np.clip(np.concatenate([clip, clip]), -1, 1)
    return AudioBuffer(samples=samples, sample_rate=sr)


def random_music(rng: np.random.Generator, m: int, dim: int = 6) -> MusicMatrix:
    frames = MfccFrames(
        frames=rng.normal(size=(m, dim)), hop_length=512, sample_rate=SR, n_coeffs=dim
    )
    return music_matrix(frames)


def random_actions(rng: np.random.Generator, n: int):
    return [ACTION_ORDER[i] for i in rng.integers(0, 3, n)]


def write_wav(path, samples: np.ndarray, sr: int = SR, dtype=np.int16):
    """Test WAVs via scipy's writer, independent of the package's reader."""
    if dtype == np.int16:
        data = (np.clip(samples, -1, 1) * 32767).astype(np.int16)
    elif dtype == np.float32:
        data = np.clip(samples, -1, 1).astype(np.float32)
    elif dtype == np.uint8:
        data = (np.clip(samples, -1, 1) * 127 + 128).round().astype(np.uint8)
    else:
        raise ValueError(f"unsupported dtype {dtype}")
    wavfile.write(str(path), sr, data)


@pytest.fixture(scope="session")
def repeated_clip() -> AudioBuffer:
    return make_repeated_clip()


@pytest.fixture(scope="session")
def repeated_clip_matrix(repeated_clip) -> MusicMatrix:
    return music_matrix(compute_mfcc(repeated_clip))


@pytest.fixture(scope="session")
def clip_wav_path(tmp_path_factory):
    """A 4 s melody-with-clicks WAV on disk for CLI tests."""
    sr = SR
    t = np.arange(4 * sr) / sr
    melody = np.zeros(4 * sr)
    for i, freq in enumerate([220, 330, 277, 440, 220, 330, 277, 440]):
        seg = slice(i * sr // 2, (i + 1) * sr // 2)
        melody[seg] = 0.5 * np.sin(2 * np.pi * freq * t[seg])
    n = int(0.008 * sr)
    burst = np.sin(2 * np.pi * 1200 * np.arange(n) / sr) * np.exp(
        -np.arange(n) / (0.002 * sr)
    )
    for k in range(8):
        start = k * sr // 2
        melody[start : start + n] += 0.4 * burst
    path = tmp_path_factory.mktemp("audio") / "clip.wav"
    write_wav(path, melody, sr)
    return path
