"""Exception types shared across the package."""


class ChoreoError(Exception):
    """Base class for every error this package raises on bad input data."""


class AudioDecodeError(ChoreoError):
    """The file could not be parsed as a RIFF/WAVE container."""


class UnsupportedAudioError(ChoreoError):
    """The WAV file uses an encoding this package does not decode."""


class EmptyAudioError(ChoreoError):
    """The audio stream holds no samples."""


class AudioTooShortError(ChoreoError):
    """The audio is too short for the requested analysis."""


class TraceError(ChoreoError):
    """A dance trace is malformed or violates its invariants."""
