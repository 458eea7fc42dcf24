"""Deterministic text-to-PNG rasterization for SMIL export.

SMIL players disagree on text formatting, so text objects are shipped as
images. This default rasterizer is typographically minimal on purpose: a
solid background, a one-pixel frame in the text color, and the content
stored in a ``tEXt`` metadata chunk instead of rendered glyphs. Identical
inputs produce identical bytes, which is what the bundle tests rely on; a
real typographic rasterizer can be injected in its place.
"""

from __future__ import annotations

import struct
import zlib

from .errors import DegenerateBox
from .model import TextPayload

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
TEXT_CHUNK_KEYWORD = b"medex:text"

_BACKGROUND = (255, 255, 255)


def _chunk(kind: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + kind
        + payload
        + struct.pack(">I", zlib.crc32(kind + payload))
    )


def _latin1_escaped(text: str) -> bytes:
    # tEXt is Latin-1 by definition; anything outside is escaped, not dropped
    out = []
    for ch in text:
        code = ord(ch)
        if code < 256:
            out.append(ch)
        elif code <= 0xFFFF:
            out.append("\\u%04x" % code)
        else:
            out.append("\\U%08x" % code)
    return "".join(out).encode("latin-1")


def default_rasterize(payload: TextPayload, width_px: int, height_px: int) -> bytes:
    """Produce an 8-bit RGB PNG of exactly width_px x height_px."""
    if width_px <= 0 or height_px <= 0:
        raise DegenerateBox(
            f"cannot rasterize into a {width_px}x{height_px} box"
        )
    border = bytes(payload.color_rgb)
    fill = bytes(_BACKGROUND)

    edge_row = b"\x00" + border * width_px
    if width_px > 2:
        inner_row = b"\x00" + border + fill * (width_px - 2) + border
    else:
        inner_row = edge_row
    rows = [edge_row]
    if height_px > 2:
        rows.extend([inner_row] * (height_px - 2))
    if height_px > 1:
        rows.append(edge_row)

    header = struct.pack(">IIBBBBB", width_px, height_px, 8, 2, 0, 0, 0)
    return b"".join(
        [
            PNG_SIGNATURE,
            _chunk(b"IHDR", header),
            _chunk(b"tEXt", TEXT_CHUNK_KEYWORD + b"\x00" + _latin1_escaped(payload.content)),
            _chunk(b"IDAT", zlib.compress(b"".join(rows), 9)),
            _chunk(b"IEND", b""),
        ]
    )
