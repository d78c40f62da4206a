"""Minimal GIF89a writer with exact per-frame delays.

Off-the-shelf encoders merge identical consecutive frames into one longer
delay. Dance renders hold a pose for several frames at a time, and the
format contract here is one image block per frame with a fixed delay, so
the LZW encoding is done by hand.
"""

from __future__ import annotations

import struct

import numpy as np

_MAX_CODE = 4096
_MAX_BITS = 12


def build_gif(
    width: int,
    height: int,
    palette: list[tuple[int, int, int]],
    frames: list[np.ndarray],
    delay_cs: int,
    loop: bool = True,
) -> bytes:
    """Assemble a complete GIF: one image block per frame, shared palette.

    ``frames`` are (height, width) arrays of palette indices.
    """
    if not frames:
        raise ValueError("need at least one frame")
    if len(palette) > 256:
        raise ValueError(f"{len(palette)} colors exceed the 256-entry GIF palette")
    if len(palette) < 2:
        palette = list(palette) + [(0, 0, 0)] * (2 - len(palette))

    bits = _table_bits(len(palette))
    parts = [b"GIF89a"]
    flags = 0x80 | ((bits - 1) << 4) | (bits - 1)  # global table, size 2^bits
    parts.append(struct.pack("<HHBBB", width, height, flags, 0, 0))
    table = bytearray()
    for r, g, b in palette:
        table += bytes((r, g, b))
    table += b"\x00\x00\x00" * ((1 << bits) - len(palette))
    parts.append(bytes(table))

    if loop:
        parts.append(b"\x21\xff\x0bNETSCAPE2.0\x03\x01\x00\x00\x00")

    for frame in frames:
        if frame.shape != (height, width):
            raise ValueError("frame shape does not match the GIF dimensions")
        # graphic control: disposal 1 (leave in place), no transparency
        parts.append(struct.pack("<BBBBHBB", 0x21, 0xF9, 4, 0b100, delay_cs, 0, 0))
        parts.append(struct.pack("<BHHHHB", 0x2C, 0, 0, width, height, 0))
        parts.append(_lzw_blocks(frame.ravel().tolist(), max(2, bits)))

    parts.append(b"\x3b")
    return b"".join(parts)


def _table_bits(n_colors: int) -> int:
    bits = 1
    while (1 << bits) < n_colors:
        bits += 1
    return bits


def _lzw_blocks(indices: list[int], min_code_size: int) -> bytes:
    """LZW-compress one frame and pack it into <=255-byte sub-blocks."""
    clear = 1 << min_code_size
    eoi = clear + 1

    out = bytearray()
    acc = 0
    nbits = 0
    code_size = min_code_size + 1

    def emit(code: int) -> None:
        nonlocal acc, nbits
        acc |= code << nbits
        nbits += code_size
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8

    table: dict[tuple[int, int], int] = {}
    next_code = eoi + 1

    emit(clear)
    prev = indices[0]
    for symbol in indices[1:]:
        key = (prev, symbol)
        code = table.get(key)
        if code is not None:
            prev = code
            continue
        emit(prev)
        if next_code < _MAX_CODE:
            table[key] = next_code
            # widen once the just-assigned code no longer fits
            if next_code == (1 << code_size) and code_size < _MAX_BITS:
                code_size += 1
            next_code += 1
        else:
            emit(clear)
            table.clear()
            next_code = eoi + 1
            code_size = min_code_size + 1
        prev = symbol
    emit(prev)
    emit(eoi)
    if nbits:
        out.append(acc & 0xFF)

    blocks = bytearray([min_code_size])
    for start in range(0, len(out), 255):
        chunk = out[start : start + 255]
        blocks.append(len(chunk))
        blocks += chunk
    blocks.append(0)
    return bytes(blocks)
