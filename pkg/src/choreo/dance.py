"""The discrete dance agent: trajectories and their similarity matrices.

An agent holds one ordinal state out of K and moves down/stays/moves up
once per step. Three similarity views of a trajectory exist: by state
distance, by action equality, and their average.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np


class Action(IntEnum):
    DOWN = -1
    STAY = 0
    UP = 1


# canonical ordering; also the tie-break order used by the searches
ACTION_ORDER = (Action.DOWN, Action.STAY, Action.UP)

ACTION_SYMBOLS = {Action.DOWN: "D", Action.STAY: "S", Action.UP: "U"}
SYMBOL_TO_ACTION = {symbol: action for action, symbol in ACTION_SYMBOLS.items()}

REPRESENTATIONS = ("state", "action", "state_action")


@dataclass(frozen=True)
class AgentConfig:
    """State-space geometry: K states, N steps, and where the agent starts.

    ``start_state`` defaults to the middle of the state space (floor(K/2)).
    """

    k_states: int
    n_steps: int
    start_state: int | None = None

    def __post_init__(self):
        if self.k_states < 2:
            raise ValueError("k_states must be >= 2")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.start_state is None:
            object.__setattr__(self, "start_state", self.k_states // 2)
        if not 0 <= self.start_state < self.k_states:
            raise ValueError(
                f"start_state {self.start_state} outside [0, {self.k_states - 1}]"
            )


def clamp_state(state: int, k_states: int) -> int:
    return min(max(state, 0), k_states - 1)


def walk_states(config: AgentConfig, actions: Sequence[Action]) -> list[int]:
    """Run the clamp recurrence; boundary-crossing actions leave the state put."""
    states = []
    state = config.start_state
    for action in actions:
        state = clamp_state(state + int(action), config.k_states)
        states.append(state)
    return states


@dataclass(frozen=True)
class DanceSequence:
    """Actions taken and the state after each one (lengths match)."""

    actions: tuple[Action, ...]
    states: tuple[int, ...]
    config: AgentConfig

    def __post_init__(self):
        if len(self.actions) == 0:
            raise ValueError("a dance needs at least one action")
        if len(self.actions) != len(self.states):
            raise ValueError("actions and states must have equal length")
        expected = walk_states(self.config, self.actions)
        for t, (got, want) in enumerate(zip(self.states, expected)):
            if got != want:
                raise ValueError(
                    f"states[{t}] = {got} inconsistent with the action sequence "
                    f"(expected {want})"
                )

    def __len__(self) -> int:
        return len(self.actions)


def apply_actions(config: AgentConfig, actions: Iterable[Action]) -> DanceSequence:
    """Build the trajectory for ``actions``, clamping at the state bounds.

    The recorded action is the one proposed, even when clamping absorbed it;
    the action matrix therefore distinguishes a clamped Up from a Stay.
    """
    acts = tuple(Action(a) for a in actions)
    if not acts:
        raise ValueError("need at least one action")
    return DanceSequence(actions=acts, states=tuple(walk_states(config, acts)), config=config)


@dataclass(frozen=True, eq=False)
class DanceMatrix:
    """Similarity of an L-step trajectory prefix under one representation."""

    values: np.ndarray
    representation: str

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)  # own private copy
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("dance matrix must be square")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")

    @property
    def l(self) -> int:
        return self.values.shape[0]


def matrix_values(
    states: Sequence[int], actions: Sequence[int], k_states: int, representation: str
) -> np.ndarray:
    """Raw similarity matrix over the given trajectory arrays."""
    if representation == "state":
        return _state_similarity(states, k_states)
    if representation == "action":
        return _action_similarity(actions)
    if representation == "state_action":
        return 0.5 * (_state_similarity(states, k_states) + _action_similarity(actions))
    raise ValueError(f"unknown representation {representation!r}")


def _state_similarity(states: Sequence[int], k_states: int) -> np.ndarray:
    s = np.asarray(states, dtype=np.float64)
    return 1.0 - np.abs(s[:, None] - s[None, :]) / (k_states - 1)


def _action_similarity(actions: Sequence[int]) -> np.ndarray:
    a = np.asarray(actions, dtype=np.int64)
    return (a[:, None] == a[None, :]).astype(np.float64)


def dance_matrix(
    seq: DanceSequence, representation: str, prefix_len: int | None = None
) -> DanceMatrix:
    """Similarity matrix of the first ``prefix_len`` steps (all steps if None)."""
    l = len(seq) if prefix_len is None else prefix_len
    if not 1 <= l <= len(seq):
        raise ValueError(f"prefix length {l} outside 1..{len(seq)}")
    values = matrix_values(
        seq.states[:l], seq.actions[:l], seq.config.k_states, representation
    )
    return DanceMatrix(values=values, representation=representation)


def upsample_nearest(dance: DanceMatrix, target: int) -> np.ndarray:
    """Nearest-neighbor expansion of an L x L matrix to target x target."""
    return upsample_values(dance.values, target)


def upsample_values(values: np.ndarray, target: int) -> np.ndarray:
    l = values.shape[0]
    if target < l:
        raise ValueError(f"target size {target} smaller than source size {l}")
    idx = np.minimum(np.arange(target) * l // target, l - 1)
    return values[np.ix_(idx, idx)]
