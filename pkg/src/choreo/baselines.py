"""The four reference dance generators the searched dances compare against.

Sequential walkers sweep the state space back and forth (ping-pong);
random walkers draw uniformly from the in-bounds actions. "Synced"
variants move only on steps that carry a beat.
"""

from __future__ import annotations

from enum import Enum
from typing import AbstractSet

from .dance import Action, AgentConfig, DanceSequence, apply_actions

RNG_ALGORITHM = "splitmix64"

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Tiny portable PRNG (Steele, Lea & Flood 2014 constants).

    Used instead of a library generator so seeded traces reproduce
    bit-for-bit on any platform and runtime version.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def pick(self, options):
        return options[self.next_u64() % len(options)]


class BaselineKind(Enum):
    SYNC_SEQ = "sync-seq"
    UNSYNC_SEQ = "unsync-seq"
    SYNC_RANDOM = "sync-random"
    UNSYNC_RANDOM = "unsync-random"

    @property
    def synced(self) -> bool:
        return self in (BaselineKind.SYNC_SEQ, BaselineKind.SYNC_RANDOM)

    @property
    def random(self) -> bool:
        return self in (BaselineKind.SYNC_RANDOM, BaselineKind.UNSYNC_RANDOM)


def allowed_actions(state: int, k_states: int) -> tuple[Action, ...]:
    """In-bounds moves at ``state``, ascending; boundaries lose one option.

    Unlike the search (which proposes freely and clamps), baselines never
    propose an out-of-bounds move.
    """
    options = []
    if state > 0:
        options.append(Action.DOWN)
    options.append(Action.STAY)
    if state < k_states - 1:
        options.append(Action.UP)
    return tuple(options)


def generate_baseline(
    kind: BaselineKind,
    agent: AgentConfig,
    beat_steps: AbstractSet[int] = frozenset(),
    seed: int = 0,
) -> DanceSequence:
    """Produce one baseline dance; identical inputs give identical output."""
    rng = SplitMix64(seed)
    actions: list[Action] = []
    state = agent.start_state
    direction = 1  # sequential walkers head up first
    for step in range(agent.n_steps):
        moves = not kind.synced or step in beat_steps
        if kind.random:
            action = rng.pick(allowed_actions(state, agent.k_states)) if moves else Action.STAY
        elif moves:
            if direction > 0 and state == agent.k_states - 1:
                direction = -1
            elif direction < 0 and state == 0:
                direction = 1
            action = Action(direction)
        else:
            action = Action.STAY
        actions.append(action)
        state += int(action)
    return apply_actions(agent, actions)
