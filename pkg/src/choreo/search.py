"""Greedy chunked search over action sequences, plus an exhaustive oracle.

The greedy search commits ``chunk_size`` actions at a time: every chunk is
chosen by enumerating all 3^chunk extensions of the committed prefix and
scoring the *whole* grown prefix against its proportional music window.
Ties break lexicographically (Down < Stay < Up, earliest step most
significant), which makes results reproducible everywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .dance import (
    ACTION_ORDER,
    REPRESENTATIONS,
    Action,
    AgentConfig,
    DanceSequence,
    apply_actions,
    clamp_state,
    matrix_values,
    upsample_values,
)
from .features import MusicMatrix
from .objective import (
    NEG_INF,
    AlignmentScore,
    alignment_score,
    centered_stats,
    music_window,
    pearson_against_centered,
)

EXHAUSTIVE_LIMIT = 10**7


@dataclass(frozen=True)
class SearchConfig:
    agent: AgentConfig
    representation: str = "action"
    chunk_size: int = 5

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")


def greedy_chunked_search(
    music: MusicMatrix, cfg: SearchConfig
) -> tuple[DanceSequence, AlignmentScore]:
    """Single-beam search: fix the best chunk, then grow by the next chunk.

    A final partial chunk (when N is not a multiple of chunk_size) is
    enumerated over 3^remainder. Cost is linear in N for fixed chunk size.
    """
    agent = cfg.agent
    n = agent.n_steps
    if music.m < n:
        raise ValueError(
            f"music matrix has {music.m} frames; need at least one per dance step ({n})"
        )

    committed_actions: list[Action] = []
    committed_states: list[int] = []
    pos = 0
    while pos < n:
        chunk = min(cfg.chunk_size, n - pos)
        base_state = committed_states[-1] if committed_states else agent.start_state
        best_actions, _ = _best_extension(
            music, cfg, committed_actions, committed_states, base_state, chunk, n
        )
        last = committed_states[-1] if committed_states else agent.start_state
        for action in best_actions:
            last = clamp_state(last + int(action), agent.k_states)
            committed_states.append(last)
        committed_actions.extend(best_actions)
        pos += chunk

    seq = apply_actions(agent, committed_actions)
    return seq, alignment_score(music, seq, cfg.representation)


def exhaustive_search(
    music: MusicMatrix, cfg: SearchConfig, n_steps: int | None = None
) -> tuple[DanceSequence, AlignmentScore]:
    """Global argmax over all 3^N sequences; the oracle for the greedy search."""
    agent = cfg.agent if n_steps is None else replace(cfg.agent, n_steps=n_steps)
    n = agent.n_steps
    if 3**n > EXHAUSTIVE_LIMIT:
        raise ValueError(f"3^{n} sequences exceed the exhaustive-search guard")
    if music.m < n:
        raise ValueError(
            f"music matrix has {music.m} frames; need at least one per dance step ({n})"
        )

    whole_cfg = SearchConfig(agent=agent, representation=cfg.representation, chunk_size=n)
    best_actions, _ = _best_extension(music, whole_cfg, [], [], agent.start_state, n, n)
    seq = apply_actions(agent, best_actions)
    return seq, alignment_score(music, seq, cfg.representation)


def _best_extension(
    music: MusicMatrix,
    cfg: SearchConfig,
    prefix_actions: list[Action],
    prefix_states: list[int],
    base_state: int,
    chunk: int,
    n_steps: int,
) -> tuple[tuple[Action, ...], float]:
    """Argmax over all 3^chunk extensions, scored on the full grown prefix.

    Candidates are generated in lexicographic action order, and only a
    strictly better score displaces the incumbent, so ties resolve to the
    lexicographically smallest extension.
    """
    agent = cfg.agent
    l = len(prefix_actions) + chunk
    m = music_window(l, n_steps, music.m)
    window = music.values[:m, :m].ravel()
    window_centered, window_sumsq = centered_stats(window)

    best: tuple[Action, ...] | None = None
    best_value = NEG_INF
    for candidate in itertools.product(ACTION_ORDER, repeat=chunk):
        states = list(prefix_states)
        state = base_state
        for action in candidate:
            state = clamp_state(state + int(action), agent.k_states)
            states.append(state)
        actions = prefix_actions + list(candidate)
        dance = matrix_values(states, actions, agent.k_states, cfg.representation)
        upsampled = upsample_values(dance, m).ravel()
        r = pearson_against_centered(window_centered, window_sumsq, upsampled)
        value = NEG_INF if r is None else r
        if best is None or value > best_value:
            best = candidate
            best_value = value
    assert best is not None
    return best, best_value
