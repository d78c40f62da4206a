"""The alignment objective: Pearson correlation of vectorized matrices.

A dance prefix of L steps is compared against the top-left share of the
music matrix sized proportionally to L/N, after nearest-neighbor
upsampling of the dance matrix to that size. Both matrices are vectorized
whole (diagonal included, row-major).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dance import DanceSequence, matrix_values, upsample_values
from .features import MusicMatrix

NEG_INF = float("-inf")


@dataclass(frozen=True)
class AlignmentScore:
    """Correlation of a dance prefix with its portion of the music.

    ``pearson`` is None (undefined) exactly when either vectorized matrix
    has zero variance, e.g. the action matrix of an all-Stay dance. Every
    search orders undefined below any defined score.
    """

    pearson: float | None
    l_steps: int
    m_frames: int

    @property
    def value(self) -> float:
        return NEG_INF if self.pearson is None else self.pearson


def pearson(x, y) -> float | None:
    """Plain Pearson r; None when either side has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("pearson expects 1-D vectors")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("pearson needs at least 2 points")
    centered, sumsq = centered_stats(x)
    return pearson_against_centered(centered, sumsq, y)


def centered_stats(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Mean-centered copy and its sum of squares."""
    centered = x - x.mean()
    return centered, float(centered @ centered)


def pearson_against_centered(
    x_centered: np.ndarray, x_sumsq: float, y: np.ndarray
) -> float | None:
    """Correlation against a pre-centered vector.

    Performance path for scoring many candidates against one fixed music
    window; bitwise identical to :func:`pearson` on the same inputs.
    """
    y_centered = y - y.mean()
    y_sumsq = float(y_centered @ y_centered)
    if x_sumsq == 0.0 or y_sumsq == 0.0:
        return None
    r = float(x_centered @ y_centered) / math.sqrt(x_sumsq * y_sumsq)
    return min(1.0, max(-1.0, r))


def music_window(l_steps: int, n_steps: int, m_frames: int) -> int:
    """Music submatrix size for an L-step prefix: round(L*M/N), floor 2.

    Round-half-up in exact integer arithmetic.
    """
    return max(2, (2 * l_steps * m_frames + n_steps) // (2 * n_steps))


def alignment_score(
    music: MusicMatrix,
    seq: DanceSequence,
    representation: str,
    prefix_len: int | None = None,
) -> AlignmentScore:
    """Score the first ``prefix_len`` steps of ``seq`` against the music."""
    l = len(seq) if prefix_len is None else prefix_len
    if not 1 <= l <= len(seq):
        raise ValueError(f"prefix length {l} outside 1..{len(seq)}")
    if music.m < l:
        raise ValueError(f"music matrix has {music.m} frames, fewer than {l} steps")
    return score_arrays(
        music.values,
        seq.states,
        seq.actions,
        seq.config.k_states,
        representation,
        l,
        seq.config.n_steps,
    )


def score_arrays(
    music_values: np.ndarray,
    states,
    actions,
    k_states: int,
    representation: str,
    l_steps: int,
    n_steps: int,
) -> AlignmentScore:
    """Array-level scoring core shared by the public API and the searches."""
    m = music_window(l_steps, n_steps, music_values.shape[0])
    window = music_values[:m, :m].ravel()
    dance = matrix_values(states[:l_steps], actions[:l_steps], k_states, representation)
    upsampled = upsample_values(dance, m).ravel()
    centered, sumsq = centered_stats(window)
    r = pearson_against_centered(centered, sumsq, upsampled)
    return AlignmentScore(pearson=r, l_steps=l_steps, m_frames=m)
