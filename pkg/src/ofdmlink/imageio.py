"""Grayscale images as bit payloads, plus a binary PGM (P5) container.

Pixels are 8-bit and serialized MSB-first so the bit stream feeds the
modem without any extra framing.  The PGM writer emits the exact header
``P5\\n<width> <height>\\n255\\n`` followed by raw pixel bytes; the
reader additionally tolerates arbitrary header whitespace and ``#``
comments, as the format allows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GrayImage",
    "image_to_bits",
    "bits_to_image",
    "read_pgm",
    "write_pgm",
]

_WHITESPACE = b" \t\r\n\x0b\x0c"


@dataclass
class GrayImage:
    """8-bit grayscale image, pixels row-major."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} != "
                f"({self.height}, {self.width})"
            )

    def __eq__(self, other):
        return (
            isinstance(other, GrayImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


def image_to_bits(img: GrayImage) -> np.ndarray:
    """Serialize pixels to bits, MSB of each byte first."""
    if img.width == 0 or img.height == 0:
        raise ValueError("empty image")
    return np.unpackbits(img.pixels.ravel())


def bits_to_image(bits, width: int, height: int) -> GrayImage:
    """Inverse of :func:`image_to_bits`."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size != width * height * 8:
        raise ValueError(
            f"bit count {bits.size} != {width}x{height}x8 = {width * height * 8}"
        )
    return GrayImage(width, height, np.packbits(bits).reshape(height, width))


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        byte = data[pos : pos + 1]
        if byte == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
        elif byte in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos : pos + 1] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise ValueError("bad PGM header: truncated before pixel data")
    return data[start:pos], pos


def read_pgm(data: bytes) -> GrayImage:
    """Parse a binary PGM (P5, maxval 255) from bytes."""
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise ValueError(f"bad PGM magic {magic!r}, expected b'P5'")
    fields = []
    for _ in range(3):
        token, pos = _next_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise ValueError(f"bad PGM header field {token!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ValueError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise ValueError(f"unsupported PGM maxval {maxval} (only 255)")
    pos += 1  # single whitespace byte separating header from raster
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise ValueError(
            f"truncated PGM raster: {len(raster)} of {width * height} bytes"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(width, height, pixels.copy())


def write_pgm(img: GrayImage) -> bytes:
    """Serialize to binary PGM with the canonical one-line-per-field header."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()
