"""WAV decoding, resampling and MFCC extraction.

The analysis front end: files are decoded to mono float buffers at a fixed
rate, then framed into mel-frequency cepstral coefficients. Everything
downstream (similarity matrices, beat tracking) is built on these frames.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np
from scipy.fft import dct, rfft
from scipy.signal import resample_poly
from scipy.signal.windows import hann

from .errors import (
    AudioDecodeError,
    AudioTooShortError,
    EmptyAudioError,
    UnsupportedAudioError,
)

DEFAULT_SAMPLE_RATE = 22050

_FORMAT_PCM = 0x0001
_FORMAT_IEEE_FLOAT = 0x0003
_FORMAT_EXTENSIBLE = 0xFFFE

# Kaiser beta 8.6 gives ~86 dB stopband attenuation, comfortably under the
# -60 dB aliasing budget the resampler is held to.
_RESAMPLE_WINDOW = ("kaiser", 8.6)


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono PCM signal with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)  # own private copy
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("audio buffer needs a non-empty 1-D sample array")
        if not np.all(np.isfinite(samples)):
            raise ValueError("audio buffer contains non-finite samples")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class MfccConfig:
    """Constants of the STFT → mel → cepstrum pipeline."""

    n_fft: int = 2048
    hop_length: int = 512
    n_mels: int = 128
    n_coeffs: int = 20
    fmin: float = 0.0
    fmax: float | None = None  # None -> Nyquist
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.hop_length < 1 or self.n_fft < self.hop_length:
            raise ValueError("need n_fft >= hop_length >= 1")
        if not 1 <= self.n_coeffs <= self.n_mels:
            raise ValueError("need 1 <= n_coeffs <= n_mels")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


@dataclass(frozen=True, eq=False)
class MfccFrames:
    """MFCC vectors, one row per analysis frame."""

    frames: np.ndarray  # shape (m, n_coeffs)
    hop_length: int
    sample_rate: int
    n_coeffs: int

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)  # own private copy
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2 or frames.shape[1] != self.n_coeffs:
            raise ValueError("frames must be a (m, n_coeffs) array")
        if not np.all(np.isfinite(frames)):
            raise ValueError("MFCC frames contain non-finite values")

    @property
    def m(self) -> int:
        return self.frames.shape[0]

    @property
    def hop_seconds(self) -> float:
        return self.hop_length / self.sample_rate


def load_audio(path, target_rate: int = DEFAULT_SAMPLE_RATE) -> AudioBuffer:
    """Decode a PCM WAV file into a mono buffer at ``target_rate``.

    Stereo is downmixed by channel averaging; mismatched rates go through a
    band-limited polyphase resampler. Supports 8/16/24/32-bit integer and
    32-bit float encodings.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    raw = Path(path).read_bytes()
    samples, rate = _parse_wav(raw, str(path))
    samples = resample(samples, rate, target_rate)
    return AudioBuffer(samples=samples, sample_rate=target_rate, source_path=str(path))


def resample(samples: np.ndarray, rate: int, target_rate: int) -> np.ndarray:
    """Windowed-sinc rate conversion; the identity when rates already match."""
    samples = np.asarray(samples, dtype=np.float64)
    if rate == target_rate:
        return samples
    g = gcd(rate, target_rate)
    out = resample_poly(samples, target_rate // g, rate // g, window=_RESAMPLE_WINDOW)
    # filter ringing can overshoot full scale by a hair
    return np.clip(out, -1.0, 1.0)


def _parse_wav(data: bytes, path: str) -> tuple[np.ndarray, int]:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioDecodeError(f"{path}: not a RIFF/WAVE file")
    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioDecodeError(f"{path}: truncated fmt chunk")
            fmt = list(struct.unpack_from("<HHIIHH", body, 0))
            if fmt[0] == _FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise AudioDecodeError(f"{path}: truncated extensible fmt chunk")
                (fmt[0],) = struct.unpack_from("<H", body, 24)
        elif chunk_id == b"data":
            if len(body) < size:
                raise AudioDecodeError(f"{path}: data chunk shorter than declared")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or payload is None:
        raise AudioDecodeError(f"{path}: missing fmt or data chunk")

    format_tag, channels, rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedAudioError(
            f"{path}: {channels} channels (only mono and stereo are supported)"
        )
    if rate <= 0:
        raise AudioDecodeError(f"{path}: invalid sample rate {rate}")

    if format_tag == _FORMAT_PCM and bits in (8, 16, 24, 32):
        flat = _decode_int_pcm(payload, bits)
    elif format_tag == _FORMAT_IEEE_FLOAT and bits == 32:
        count = len(payload) // 4
        flat = np.frombuffer(payload[: 4 * count], dtype="<f4").astype(np.float64)
        flat = np.clip(flat, -1.0, 1.0)
    else:
        raise UnsupportedAudioError(
            f"{path}: format tag {format_tag} at {bits} bits is not supported"
        )

    usable = (flat.size // channels) * channels
    if usable == 0:
        raise EmptyAudioError(f"{path}: audio stream holds no samples")
    mono = flat[:usable].reshape(-1, channels).mean(axis=1)
    return mono, rate


def _decode_int_pcm(payload: bytes, bits: int) -> np.ndarray:
    # integer full scale maps symmetrically: x / 2^(bits-1)
    if bits == 8:
        x = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        return (x - 128.0) / 128.0
    if bits == 16:
        count = len(payload) // 2
        return np.frombuffer(payload[: 2 * count], dtype="<i2").astype(np.float64) / 2.0**15
    if bits == 32:
        count = len(payload) // 4
        return np.frombuffer(payload[: 4 * count], dtype="<i4").astype(np.float64) / 2.0**31
    # 24-bit: sign-extend three little-endian bytes
    count = len(payload) // 3
    b = np.frombuffer(payload[: 3 * count], dtype=np.uint8).reshape(-1, 3).astype(np.int64)
    x = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
    x = np.where(x >= 1 << 23, x - (1 << 24), x).astype(np.float64)
    return x / 2.0**23


def _hz_to_mel(freq: np.ndarray) -> np.ndarray:
    # Slaney scale: linear under 1 kHz, logarithmic above
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    freq = np.asarray(freq, dtype=np.float64)
    return np.where(
        freq < min_log_hz,
        freq / f_sp,
        min_log_mel + np.log(np.maximum(freq, min_log_hz) / min_log_hz) / logstep,
    )


def _mel_to_hz(mels: np.ndarray) -> np.ndarray:
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    mels = np.asarray(mels, dtype=np.float64)
    return np.where(
        mels < min_log_mel,
        f_sp * mels,
        min_log_hz * np.exp(logstep * (mels - min_log_mel)),
    )


def mel_filterbank(
    sample_rate: int, n_fft: int, n_mels: int, fmin: float = 0.0, fmax: float | None = None
) -> np.ndarray:
    """Triangular Slaney-style filterbank, area-normalized, (n_mels, n_fft//2+1)."""
    if fmax is None:
        fmax = sample_rate / 2.0
    edges = _mel_to_hz(np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2))
    fft_freqs = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)

    lower = (fft_freqs[None, :] - edges[:-2, None]) / (edges[1:-1] - edges[:-2])[:, None]
    upper = (edges[2:, None] - fft_freqs[None, :]) / (edges[2:] - edges[1:-1])[:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))

    # normalize each triangle to unit area so band energies are comparable
    enorm = 2.0 / (edges[2:] - edges[:-2])
    return weights * enorm[:, None]


def power_spectrogram(samples: np.ndarray, n_fft: int, hop_length: int) -> np.ndarray:
    """Center-padded Hann STFT power, shape (1 + len//hop, n_fft//2 + 1)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < n_fft:
        raise AudioTooShortError(
            f"need at least {n_fft} samples (one analysis window), got {samples.size}"
        )
    pad = n_fft // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = 1 + (padded.size - n_fft) // hop_length
    shape = (n_frames, n_fft)
    strides = (hop_length * padded.strides[0], padded.strides[0])
    frames = np.lib.stride_tricks.as_strided(padded, shape=shape, strides=strides)
    windowed = frames * hann(n_fft, sym=False)
    spectrum = rfft(windowed, axis=1)
    return np.abs(spectrum) ** 2


def log_mel_energies(audio: AudioBuffer, config: MfccConfig = MfccConfig()) -> np.ndarray:
    """Natural-log mel band energies per frame, shape (m, n_mels)."""
    power = power_spectrogram(audio.samples, config.n_fft, config.hop_length)
    bank = mel_filterbank(
        audio.sample_rate, config.n_fft, config.n_mels, config.fmin, config.fmax
    )
    return np.log(power @ bank.T + config.log_floor)


def compute_mfcc(audio: AudioBuffer, config: MfccConfig = MfccConfig()) -> MfccFrames:
    """Extract MFCC frames: STFT power -> mel energies -> log -> DCT-II (ortho)."""
    log_mel = log_mel_energies(audio, config)
    coeffs = dct(log_mel, type=2, norm="ortho", axis=1)[:, : config.n_coeffs]
    return MfccFrames(
        frames=coeffs,
        hop_length=config.hop_length,
        sample_rate=audio.sample_rate,
        n_coeffs=config.n_coeffs,
    )
