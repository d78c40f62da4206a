"""Rasterize dance traces: still frames, PNG dumps, animated GIFs.

Three visualizations share one movement parameter: a dot on a 1-D grid of
slots, a disc whose radius pulses with the state, and a stick figure whose
arm and leg angles interpolate between two extreme poses. Frames are held
constant within a dance step; the agent occupies discrete states, so
there is no tweening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .gif import build_gif
from .trace import DanceTrace

VIS_KINDS = ("grid_dot", "pulse_disc", "stick_figure")

_BG = (0, 0, 0)
_FG = (255, 255, 255)
_RAIL = (96, 96, 96)


@dataclass(frozen=True)
class Visualization:
    kind: str
    width: int = 320
    height: int = 240
    fps: float = 20.0

    def __post_init__(self):
        if self.kind not in VIS_KINDS:
            raise ValueError(f"unknown visualization {self.kind!r}")
        if self.width < 64 or self.height < 64:
            raise ValueError("canvas must be at least 64x64 pixels")
        if self.fps <= 0:
            raise ValueError("fps must be positive")


def step_frame_counts(n_steps: int, total_frames: int) -> list[int]:
    """Distribute frames over steps; run lengths differ by at most one."""
    return [
        (s + 1) * total_frames // n_steps - s * total_frames // n_steps
        for s in range(n_steps)
    ]


def render_frames(trace: DanceTrace, vis: Visualization) -> list[Image.Image]:
    """One raster per video frame; total frames = round(duration * fps)."""
    total = round(trace.audio.duration_s * vis.fps)
    counts = step_frame_counts(trace.params.n_steps, total)
    cache: dict[int, Image.Image] = {}
    frames: list[Image.Image] = []
    for state, count in zip(trace.states, counts):
        if count == 0:
            continue
        if state not in cache:
            cache[state] = _draw_state(state, trace.params.k_states, vis)
        frames.extend([cache[state]] * count)
    return frames


def encode_gif(frames: list[Image.Image], fps: float, path) -> None:
    """Write an animated GIF with a delay of round(100/fps) cs on every frame."""
    if not frames:
        raise ValueError("need at least one frame")
    size = frames[0].size
    if any(f.size != size for f in frames):
        raise ValueError("all frames must share the same dimensions")
    delay_cs = int(round(100.0 / fps))
    indexed, palette = _index_frames(frames)
    data = build_gif(size[0], size[1], palette, indexed, delay_cs)
    Path(path).write_bytes(data)


def write_frames(frames: list[Image.Image], directory) -> list[Path]:
    """Dump frames as PNGs laid out as frame_%06d.png."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        out = directory / f"frame_{i:06d}.png"
        frame.save(out, format="PNG")
        paths.append(out)
    return paths


def _index_frames(
    frames: list[Image.Image],
) -> tuple[list[np.ndarray], list[tuple[int, int, int]]]:
    """Quantize frames against one shared palette built in first-seen order."""
    palette: dict[int, int] = {}
    by_identity: dict[int, np.ndarray] = {}
    indexed = []
    for frame in frames:
        key = id(frame)  # renders reuse one Image per held state
        if key not in by_identity:
            rgb = np.asarray(frame.convert("RGB"), dtype=np.int64)
            packed = (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]
            unique = np.unique(packed)
            for color in unique.tolist():
                palette.setdefault(color, len(palette))
            if len(palette) > 256:
                raise ValueError("frames use more than 256 distinct colors")
            lut = np.array([palette[c] for c in unique.tolist()], dtype=np.uint8)
            by_identity[key] = lut[np.searchsorted(unique, packed)]
        indexed.append(by_identity[key])
    rgb_palette = [((c >> 16) & 0xFF, (c >> 8) & 0xFF, c & 0xFF) for c in palette]
    return indexed, rgb_palette


def _draw_state(state: int, k_states: int, vis: Visualization) -> Image.Image:
    image = Image.new("RGB", (vis.width, vis.height), _BG)
    draw = ImageDraw.Draw(image)
    fraction = state / (k_states - 1)
    if vis.kind == "grid_dot":
        _draw_grid_dot(draw, state, k_states, vis.width, vis.height)
    elif vis.kind == "pulse_disc":
        _draw_pulse_disc(draw, fraction, vis.width, vis.height)
    else:
        _draw_stick_figure(draw, fraction, vis.width, vis.height)
    return image


def disc_radius(fraction: float, width: int, height: int) -> float:
    """Radius grows linearly from r_min to r_max with the state fraction."""
    r_min = 0.05 * min(width, height)
    r_max = 0.45 * min(width, height)
    return r_min + fraction * (r_max - r_min)


def grid_slot_center(state: int, k_states: int, width: int) -> float:
    return (state + 0.5) * width / k_states


def _draw_grid_dot(draw: ImageDraw.ImageDraw, state: int, k: int, w: int, h: int) -> None:
    y = h // 2
    draw.line([(0, y), (w - 1, y)], fill=_RAIL, width=1)
    for slot in range(k):
        x = int(grid_slot_center(slot, k, w))
        draw.line([(x, y - 3), (x, y + 3)], fill=_RAIL, width=1)
    cx = grid_slot_center(state, k, w)
    radius = max(3.0, min(0.45 * w / k, 0.2 * h))
    draw.ellipse([cx - radius, y - radius, cx + radius, y + radius], fill=_FG)


def _draw_pulse_disc(draw: ImageDraw.ImageDraw, fraction: float, w: int, h: int) -> None:
    radius = disc_radius(fraction, w, h)
    cx, cy = w / 2, h / 2
    draw.ellipse([cx - radius, cy - radius, cx + radius, cy + radius], fill=_FG)


def _draw_stick_figure(draw: ImageDraw.ImageDraw, fraction: float, w: int, h: int) -> None:
    # five segments: torso, two arms, two legs; the head circle is decoration
    cx = w / 2
    top = 0.30 * h
    shoulder_y = 0.38 * h
    hip_y = 0.62 * h
    arm_len = 0.16 * min(w, h)
    leg_len = 0.28 * min(w, h)
    stroke = max(2, min(w, h) // 48)

    arm_angle = math.radians(-60.0 + 120.0 * fraction)  # about the shoulder
    leg_angle = math.radians(25.0 * fraction)  # spread from vertical

    draw.line([(cx, top), (cx, hip_y)], fill=_FG, width=stroke)
    for side in (-1, 1):
        ax = cx + side * arm_len * math.cos(arm_angle)
        ay = shoulder_y - arm_len * math.sin(arm_angle)
        draw.line([(cx, shoulder_y), (ax, ay)], fill=_FG, width=stroke)
        lx = cx + side * leg_len * math.sin(leg_angle)
        ly = hip_y + leg_len * math.cos(leg_angle)
        draw.line([(cx, hip_y), (lx, ly)], fill=_FG, width=stroke)
    head_r = 0.06 * h
    draw.ellipse([cx - head_r, top - 2 * head_r, cx + head_r, top], outline=_FG, width=stroke)
