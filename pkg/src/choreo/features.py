"""Music structure features: the self-similarity matrix and beat times.

The music matrix is the optimization target for the dance search; beat
times only feed the beat-synced baselines. The tracker is a classical
chain: spectral-flux onset envelope, autocorrelation tempo estimate with
an octave prior, then dynamic-programming beat placement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .audio import AudioBuffer, MfccConfig, MfccFrames, log_mel_energies
from .errors import AudioTooShortError

TEMPO_MIN_BPM = 60.0
TEMPO_MAX_BPM = 180.0
MIN_BEAT_GAP_S = 0.1
_MIN_BEAT_AUDIO_S = 3.0


@dataclass(frozen=True, eq=False)
class MusicMatrix:
    """Frame-by-frame MFCC similarity, entry exp(-||mfcc_i - mfcc_j||)."""

    values: np.ndarray
    frame_hop_seconds: float

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)  # own private copy
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 2:
            raise ValueError("music matrix must be square with at least 2 frames")
        if self.frame_hop_seconds <= 0:
            raise ValueError("frame_hop_seconds must be positive")
        if not np.array_equal(values, values.T):
            raise ValueError("music matrix must be exactly symmetric")
        if not np.all(np.diag(values) == 1.0):
            raise ValueError("music matrix diagonal must be 1")
        if not (np.all(values > 0.0) and np.all(values <= 1.0)):
            raise ValueError("music matrix entries must lie in (0, 1]")

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class BeatTimes:
    """Detected beat instants (seconds) and the tempo estimate."""

    times: tuple[float, ...]
    tempo_bpm: float

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if self.tempo_bpm < 0:
            raise ValueError("tempo_bpm must be non-negative")
        for prev, cur in zip(self.times, self.times[1:]):
            if cur - prev < MIN_BEAT_GAP_S:
                raise ValueError(f"beat gap {cur - prev:.4f}s under the {MIN_BEAT_GAP_S}s floor")
        if self.times and self.times[0] < 0:
            raise ValueError("beat times must be non-negative")


def music_matrix(frames: MfccFrames) -> MusicMatrix:
    """Build the similarity matrix over MFCC frames; each pair computed once."""
    if frames.m < 2:
        raise ValueError(f"need at least 2 MFCC frames, got {frames.m}")
    distances = squareform(pdist(frames.frames))
    return MusicMatrix(values=np.exp(-distances), frame_hop_seconds=frames.hop_seconds)


def save_matrix_csv(matrix: MusicMatrix, path) -> None:
    np.savetxt(path, matrix.values, delimiter=",", fmt="%.12g")


def save_matrix_png(matrix: MusicMatrix, path) -> None:
    """Grayscale heatmap, row 0 at the top, similarity 1 rendered white."""
    from matplotlib import image as mpl_image

    mpl_image.imsave(str(path), matrix.values, cmap="gray", vmin=0.0, vmax=1.0)


def onset_envelope(audio: AudioBuffer, config: MfccConfig = MfccConfig()) -> np.ndarray:
    """Half-wave-rectified frame-to-frame rise of log-mel energy, summed over bands."""
    log_mel = log_mel_energies(audio, config)
    flux = np.maximum(np.diff(log_mel, axis=0), 0.0).sum(axis=1)
    return np.concatenate([[0.0], flux])


def detect_beats(audio: AudioBuffer, config: MfccConfig = MfccConfig()) -> BeatTimes:
    """Locate beats; silence yields no beats and tempo 0.

    Needs at least 3 s of audio for a usable tempo estimate.
    """
    if audio.duration_s < _MIN_BEAT_AUDIO_S:
        raise AudioTooShortError(
            f"beat detection needs >= {_MIN_BEAT_AUDIO_S:.0f}s of audio, "
            f"got {audio.duration_s:.2f}s"
        )
    envelope = onset_envelope(audio, config)
    if not np.any(envelope > 0.0):
        return BeatTimes(times=(), tempo_bpm=0.0)

    framerate = audio.sample_rate / config.hop_length
    tempo = _estimate_tempo(envelope, framerate)
    beat_frames = _place_beats(envelope, tempo, framerate)
    if beat_frames.size == 0:
        return BeatTimes(times=(), tempo_bpm=0.0)

    times = beat_frames * (config.hop_length / audio.sample_rate)
    if times.size >= 2:
        tempo = _tempo_from_intervals(np.diff(times), fallback=tempo)
    return BeatTimes(times=tuple(times.tolist()), tempo_bpm=float(tempo))


def beats_to_steps(beats: BeatTimes, n_steps: int, duration: float) -> set[int]:
    """Map beats onto the step grid: step s covers [s*d/n, (s+1)*d/n)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if duration <= 0:
        raise ValueError("duration must be positive")
    steps: set[int] = set()
    for t in beats.times:
        s = min(max(int(t * n_steps / duration), 0), n_steps - 1)
        # nudge across float rounding at window edges
        while s > 0 and t < s * duration / n_steps:
            s -= 1
        while s < n_steps - 1 and t >= (s + 1) * duration / n_steps:
            s += 1
        if s * duration / n_steps <= t < (s + 1) * duration / n_steps:
            steps.add(s)
    return steps


def _estimate_tempo(envelope: np.ndarray, framerate: float) -> float:
    midpoint = (TEMPO_MIN_BPM + TEMPO_MAX_BPM) / 2.0
    x = envelope - envelope.mean()
    ac = np.correlate(x, x, mode="full")[x.size - 1 :]
    lag_lo = max(1, int(np.ceil(60.0 * framerate / TEMPO_MAX_BPM)))
    lag_hi = min(ac.size - 1, int(np.floor(60.0 * framerate / TEMPO_MIN_BPM)))
    if lag_hi <= lag_lo:
        return midpoint
    lags = np.arange(lag_lo, lag_hi + 1)
    bpms = 60.0 * framerate / lags
    # log-normal preference around the range midpoint disambiguates octaves
    weight = np.exp(-0.5 * np.log2(bpms / midpoint) ** 2)
    best = int(lags[np.argmax(ac[lags] * weight)])
    lag = best + _parabolic_offset(ac, best)
    return float(np.clip(60.0 * framerate / lag, TEMPO_MIN_BPM, TEMPO_MAX_BPM))


def _parabolic_offset(values: np.ndarray, i: int) -> float:
    if i <= 0 or i >= values.size - 1:
        return 0.0
    a, b, c = values[i - 1], values[i], values[i + 1]
    denom = a - 2.0 * b + c
    if denom == 0.0:
        return 0.0
    return float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))


def _tempo_from_intervals(gaps: np.ndarray, fallback: float) -> float:
    median = np.median(gaps)
    if median <= 0:
        return fallback
    keep = gaps[(gaps >= 0.5 * median) & (gaps <= 1.5 * median)]
    if keep.size == 0:
        return fallback
    return float(60.0 / keep.mean())


def _place_beats(
    envelope: np.ndarray, bpm: float, framerate: float, tightness: float = 100.0
) -> np.ndarray:
    """Ellis-style DP: maximize onset strength under a spacing penalty."""
    std = envelope.std()
    if std == 0.0:
        return np.zeros(0, dtype=int)
    period = 60.0 * framerate / bpm

    half = max(1, int(round(period)))
    taps = np.arange(-half, half + 1, dtype=np.float64)
    smoothing = np.exp(-0.5 * (taps * 32.0 / period) ** 2)
    localscore = np.convolve(envelope / std, smoothing, mode="same")

    prange = np.arange(-int(round(2 * period)), -int(round(period / 2)) + 1)
    txcost = -tightness * np.log(-prange / period) ** 2

    backlink = np.full(localscore.size, -1, dtype=int)
    cumscore = np.zeros_like(localscore)
    score_floor = 0.01 * localscore.max()
    first_beat = True
    for i, score in enumerate(localscore):
        candidates = txcost.copy()
        sources = i + prange
        valid = sources >= 0
        candidates[valid] += cumscore[sources[valid]]
        best = int(np.argmax(candidates))
        cumscore[i] = score + candidates[best]
        if first_beat and score < score_floor:
            backlink[i] = -1
        else:
            backlink[i] = sources[best] if valid[best] else -1
            first_beat = False

    # final beat: the last strong local maximum of the cumulative score
    padded = np.pad(cumscore, 1, mode="edge")
    is_max = (cumscore > padded[:-2]) & (cumscore >= padded[2:])
    if not np.any(is_max):
        return np.zeros(0, dtype=int)
    median_max = np.median(cumscore[is_max])
    strong = np.flatnonzero(is_max & (cumscore * 2 > median_max))
    if strong.size == 0:
        return np.zeros(0, dtype=int)

    beats = [int(strong[-1])]
    while backlink[beats[-1]] >= 0:
        beats.append(int(backlink[beats[-1]]))
    beats = np.array(beats[::-1], dtype=int)

    # drop weak leading/trailing placements
    strengths = np.convolve(localscore[beats], np.hanning(5), mode="same")
    threshold = 0.5 * np.sqrt(np.mean(strengths**2))
    solid = np.flatnonzero(strengths > threshold)
    if solid.size == 0:
        return np.zeros(0, dtype=int)
    return beats[solid[0] : solid[-1] + 1]
