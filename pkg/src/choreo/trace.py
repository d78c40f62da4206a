"""Serialized dance traces: the JSON interchange format.

A trace binds the audio a dance was made for, the agent parameters, the
action/state trajectory, and (when computed) the alignment score and beat
times. Reading re-validates the state recurrence so a trace can never
smuggle an impossible trajectory into the renderer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .dance import (
    ACTION_SYMBOLS,
    REPRESENTATIONS,
    SYMBOL_TO_ACTION,
    AgentConfig,
    DanceSequence,
    walk_states,
)
from .errors import TraceError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AudioInfo:
    path: str
    duration_s: float
    sample_rate: int


@dataclass(frozen=True)
class TraceParams:
    k_states: int
    n_steps: int
    start_state: int
    approach: str
    representation: str | None = None
    seed: int | None = None
    rng: str | None = None


@dataclass(frozen=True)
class DanceTrace:
    audio: AudioInfo
    params: TraceParams
    actions: tuple[str, ...]
    states: tuple[int, ...]
    score: float | None = None
    beats_s: tuple[float, ...] | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        _validate(self)

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            k_states=self.params.k_states,
            n_steps=self.params.n_steps,
            start_state=self.params.start_state,
        )

    def to_sequence(self) -> DanceSequence:
        actions = tuple(SYMBOL_TO_ACTION[s] for s in self.actions)
        return DanceSequence(actions=actions, states=self.states, config=self.agent_config())


def _validate(trace: DanceTrace) -> None:
    p = trace.params
    if trace.schema_version != SCHEMA_VERSION:
        raise TraceError(f"unsupported schema version {trace.schema_version}")
    if p.k_states < 2 or p.n_steps < 1 or not 0 <= p.start_state < p.k_states:
        raise TraceError("invalid agent parameters in trace")
    if p.representation is not None and p.representation not in REPRESENTATIONS:
        raise TraceError(f"unknown representation {p.representation!r}")
    if len(trace.actions) != p.n_steps or len(trace.states) != p.n_steps:
        raise TraceError(
            f"trace must carry exactly N={p.n_steps} actions and states, "
            f"got {len(trace.actions)} and {len(trace.states)}"
        )
    for t, symbol in enumerate(trace.actions):
        if symbol not in SYMBOL_TO_ACTION:
            raise TraceError(f"actions[{t}] = {symbol!r} is not one of D/S/U")
    config = AgentConfig(p.k_states, p.n_steps, p.start_state)
    expected = walk_states(config, [SYMBOL_TO_ACTION[s] for s in trace.actions])
    for t, (got, want) in enumerate(zip(trace.states, expected)):
        if got != want:
            raise TraceError(
                f"states[{t}] = {got} inconsistent with the action sequence "
                f"(expected {want})"
            )
    if trace.beats_s is not None:
        for prev, cur in zip(trace.beats_s, trace.beats_s[1:]):
            if cur <= prev:
                raise TraceError("beats_s must be strictly increasing")


def trace_from_sequence(
    seq: DanceSequence,
    audio: AudioInfo,
    approach: str,
    representation: str | None = None,
    score: float | None = None,
    seed: int | None = None,
    rng: str | None = None,
    beats_s=None,
) -> DanceTrace:
    if len(seq) != seq.config.n_steps:
        raise ValueError("traces require a full-length sequence (len == n_steps)")
    params = TraceParams(
        k_states=seq.config.k_states,
        n_steps=seq.config.n_steps,
        start_state=seq.config.start_state,
        approach=approach,
        representation=representation,
        seed=seed,
        rng=rng,
    )
    return DanceTrace(
        audio=audio,
        params=params,
        actions=tuple(ACTION_SYMBOLS[a] for a in seq.actions),
        states=tuple(seq.states),
        score=score,
        beats_s=None if beats_s is None else tuple(float(t) for t in beats_s),
    )


def trace_to_dict(trace: DanceTrace) -> dict:
    p = trace.params
    return {
        "schema_version": trace.schema_version,
        "audio": {
            "path": trace.audio.path,
            "duration_s": trace.audio.duration_s,
            "sample_rate": trace.audio.sample_rate,
        },
        "params": {
            "K": p.k_states,
            "N": p.n_steps,
            "start_state": p.start_state,
            "approach": p.approach,
            "representation": p.representation,
            "seed": p.seed,
            "rng": p.rng,
        },
        "actions": list(trace.actions),
        "states": [int(s) for s in trace.states],
        "score": trace.score,
        "beats_s": None if trace.beats_s is None else list(trace.beats_s),
    }


def trace_from_dict(payload: dict) -> DanceTrace:
    try:
        version = payload["schema_version"]
        if version != SCHEMA_VERSION:
            raise TraceError(f"unsupported schema version {version!r}")
        audio_raw = payload["audio"]
        params_raw = payload["params"]
        audio = AudioInfo(
            path=str(audio_raw["path"]),
            duration_s=float(audio_raw["duration_s"]),
            sample_rate=int(audio_raw["sample_rate"]),
        )
        seed = params_raw.get("seed")
        representation = params_raw.get("representation")
        rng = params_raw.get("rng")
        params = TraceParams(
            k_states=int(params_raw["K"]),
            n_steps=int(params_raw["N"]),
            start_state=int(params_raw["start_state"]),
            approach=str(params_raw["approach"]),
            representation=None if representation is None else str(representation),
            seed=None if seed is None else int(seed),
            rng=None if rng is None else str(rng),
        )
        score = payload["score"]
        beats = payload.get("beats_s")
        return DanceTrace(
            audio=audio,
            params=params,
            actions=tuple(str(a) for a in payload["actions"]),
            states=tuple(int(s) for s in payload["states"]),
            score=None if score is None else float(score),
            beats_s=None if beats is None else tuple(float(t) for t in beats),
            schema_version=int(version),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceError(f"invalid trace payload: {exc}") from exc


def write_trace(trace: DanceTrace, path) -> None:
    """Serialize deterministically: sorted keys, fixed indentation."""
    text = json.dumps(trace_to_dict(trace), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def read_trace(path) -> DanceTrace:
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise TraceError(f"{path}: trace must be a JSON object")
    return trace_from_dict(payload)
