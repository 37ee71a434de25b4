"""Bit-to-symbol mapping for BPSK, DBPSK, QPSK, 16QAM and 64QAM.

Every constellation is normalized to unit average symbol energy so that
noise calibration is identical across schemes.  Mapping conventions,
fixed here so results are reproducible:

* BPSK: bit 1 -> +1, bit 0 -> -1 (phase 0 for a one, phase pi for a zero).
* DBPSK: differentially encoded bits mapped onto the BPSK points; the
  encode/decode pair lives here too, the link layer composes them.
* QPSK/16QAM/64QAM: square constellations, Gray coded per axis.  The
  first half of each bit group selects the in-phase level, the second
  half the quadrature level; the all-zero pattern selects the most
  positive level on each axis (so QPSK maps 00 -> (+1+1j)/sqrt(2)).

Demapping is hard-decision minimum Euclidean distance with ties broken
toward the lowest symbol label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModulationScheme",
    "BPSK",
    "DBPSK",
    "QPSK",
    "QAM16",
    "QAM64",
    "SCHEMES",
    "constellation",
    "map_bits",
    "demap_symbols",
    "dbpsk_encode",
    "dbpsk_decode",
]


@dataclass(frozen=True)
class ModulationScheme:
    """A constellation family and its bit-group size."""

    name: str
    bits_per_symbol: int
    differential: bool = False


BPSK = ModulationScheme("bpsk", 1)
DBPSK = ModulationScheme("dbpsk", 1, differential=True)
QPSK = ModulationScheme("qpsk", 2)
QAM16 = ModulationScheme("16qam", 4)
QAM64 = ModulationScheme("64qam", 6)

SCHEMES = {s.name: s for s in (BPSK, DBPSK, QPSK, QAM16, QAM64)}


def _gray_decode(code: int) -> int:
    """Index of ``code`` in the reflected Gray sequence g(i) = i ^ (i >> 1)."""
    index = 0
    while code:
        index ^= code
        code >>= 1
    return index


def _gray_axis_levels(n_bits: int) -> np.ndarray:
    """Unnormalized amplitude levels of one axis, indexed by bit pattern.

    Adjacent levels differ in exactly one bit; the all-zero pattern sits
    on the most positive level.  For one bit this is {0 -> +1, 1 -> -1}.
    """
    count = 1 << n_bits
    levels = np.empty(count)
    for pattern in range(count):
        levels[pattern] = (count - 1) - 2 * _gray_decode(pattern)
    return levels


def _build_axes(scheme: ModulationScheme) -> tuple[np.ndarray, np.ndarray | None]:
    """Per-axis level tables (label order, unit-energy scaled)."""
    k = scheme.bits_per_symbol
    if k == 1:
        # BPSK keeps its own sign convention: label 0 -> -1, label 1 -> +1.
        return np.array([-1.0, 1.0]), None
    half = k // 2
    i_levels = _gray_axis_levels(half)
    q_levels = _gray_axis_levels(half)
    mean_energy = np.mean(i_levels**2) + np.mean(q_levels**2)
    scale = np.sqrt(mean_energy)
    return i_levels / scale, q_levels / scale


_AXES: dict[str, tuple[np.ndarray, np.ndarray | None]] = {}
_POINTS: dict[str, np.ndarray] = {}


def _axes(scheme: ModulationScheme) -> tuple[np.ndarray, np.ndarray | None]:
    if scheme.name not in _AXES:
        _AXES[scheme.name] = _build_axes(scheme)
    return _AXES[scheme.name]


def constellation(scheme: ModulationScheme) -> np.ndarray:
    """Constellation points indexed by symbol label (unit average energy)."""
    if scheme.name not in _POINTS:
        i_levels, q_levels = _axes(scheme)
        if q_levels is None:
            points = i_levels.astype(complex)
        else:
            # label = (i bits << half) | q bits
            points = (i_levels[:, None] + 1j * q_levels[None, :]).ravel()
        points.setflags(write=False)
        _POINTS[scheme.name] = points
    return _POINTS[scheme.name]


def _as_bits(bits) -> np.ndarray:
    out = np.asarray(bits, dtype=np.uint8)
    if out.ndim != 1:
        out = out.ravel()
    if out.size and out.max() > 1:
        raise ValueError("bit stream contains values outside {0, 1}")
    return out


def map_bits(bits, scheme: ModulationScheme) -> np.ndarray:
    """Map a bit stream to constellation symbols, MSB of each group first.

    The bit count must be a multiple of ``scheme.bits_per_symbol``;
    padding is the caller's job.
    """
    bits = _as_bits(bits)
    k = scheme.bits_per_symbol
    if bits.size % k:
        raise ValueError(
            f"bit count {bits.size} is not a multiple of {k} ({scheme.name})"
        )
    groups = bits.reshape(-1, k).astype(np.int64)
    labels = groups @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))
    return constellation(scheme)[labels]


def demap_symbols(symbols, scheme: ModulationScheme) -> np.ndarray:
    """Hard-decision demap to the nearest constellation point.

    Decides each axis independently, which on a square constellation is
    exactly the minimum-distance rule; distance ties resolve to the
    lowest symbol label.
    """
    symbols = np.asarray(symbols, dtype=complex).ravel()
    i_levels, q_levels = _axes(scheme)
    k = scheme.bits_per_symbol
    i_idx = np.argmin(np.abs(symbols.real[:, None] - i_levels[None, :]), axis=1)
    if q_levels is None:
        labels = i_idx
    else:
        q_idx = np.argmin(np.abs(symbols.imag[:, None] - q_levels[None, :]), axis=1)
        labels = (i_idx << (k // 2)) | q_idx
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def dbpsk_encode(bits) -> np.ndarray:
    """Differential encode: out[i] = out[i-1] XOR in[i], reference bit 0."""
    bits = _as_bits(bits)
    return (np.cumsum(bits, dtype=np.int64) & 1).astype(np.uint8)


def dbpsk_decode(bits) -> np.ndarray:
    """Differential decode: out[i] = in[i] XOR in[i-1], reference bit 0."""
    bits = _as_bits(bits)
    prev = np.empty_like(bits)
    if bits.size:
        prev[0] = 0
        prev[1:] = bits[:-1]
    return bits ^ prev
