"""OFDM framing: unitary DFT/IDFT, cyclic prefix, block pilot insertion.

A frame is a grid of OFDM symbols over ``n_subcarriers`` tones.  Every
``pilot_period``-th symbol (positions 0, P, 2P, ...) is an all-pilot
block carrying ``pilot_value`` on every tone; the remaining symbols
carry mapped data tones in natural subcarrier order.  Both transform
directions carry the 1/sqrt(N) factor, so the pair is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modem import ModulationScheme, map_bits

__all__ = [
    "OfdmConfig",
    "OfdmFrame",
    "dft",
    "add_cyclic_prefix",
    "remove_cyclic_prefix",
    "build_frame",
    "frame_to_samples",
    "samples_to_frame",
]


@dataclass(frozen=True)
class OfdmConfig:
    """Static shape of the OFDM grid."""

    n_subcarriers: int = 64
    cp_len: int = 16
    pilot_period: int = 8
    pilot_value: complex = 1 + 0j

    def __post_init__(self):
        n = self.n_subcarriers
        if n < 1 or n & (n - 1):
            raise ValueError(f"n_subcarriers: {n} is not a power of two")
        if not 0 < self.cp_len <= n:
            raise ValueError(f"cp_len: {self.cp_len} not in (0, {n}]")
        if self.pilot_period < 1:
            raise ValueError(f"pilot_period: {self.pilot_period} must be >= 1")
        if self.pilot_value == 0:
            raise ValueError("pilot_value: must be nonzero")

    @property
    def symbol_len(self) -> int:
        """Time samples per OFDM symbol including the cyclic prefix."""
        return self.n_subcarriers + self.cp_len


@dataclass
class OfdmFrame:
    """Frequency-domain OFDM frame: tone grid plus pilot layout."""

    tones: np.ndarray  # (n_symbols, n_subcarriers) complex
    pilot_mask: np.ndarray  # (n_symbols,) bool, True on all-pilot blocks
    pad_bits: int = 0  # zero bits appended to fill the last data symbol

    @property
    def n_symbols(self) -> int:
        return self.tones.shape[0]

    def data_tones(self) -> np.ndarray:
        """Data-symbol rows of the grid, pilot blocks removed."""
        return self.tones[~self.pilot_mask]


def dft(values, inverse: bool = False) -> np.ndarray:
    """Unitary DFT along the last axis (1/sqrt(N) in both directions).

    ``inverse=True`` maps tones X(k) to time samples x(n); the forward
    direction maps time samples back to tones.  The length must be a
    power of two.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"transform length {n} is not a power of two")
    if inverse:
        return np.fft.ifft(values, norm="ortho")
    return np.fft.fft(values, norm="ortho")


def add_cyclic_prefix(samples, cp_len: int) -> np.ndarray:
    """Prepend the last ``cp_len`` time samples of each symbol."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[-1]
    if not 0 < cp_len <= n:
        raise ValueError(f"cyclic prefix length {cp_len} not in (0, {n}]")
    return np.concatenate([samples[..., n - cp_len :], samples], axis=-1)


def remove_cyclic_prefix(samples, cp_len: int) -> np.ndarray:
    """Drop the first ``cp_len`` samples of each symbol."""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape[-1] <= cp_len:
        raise ValueError(
            f"symbol of {samples.shape[-1]} samples too short for cp_len={cp_len}"
        )
    return samples[..., cp_len:]


def _frame_length(n_data_symbols: int, pilot_period: int) -> int:
    """Total symbol count once pilots are inserted every P-th position."""
    if n_data_symbols == 0:
        return 1  # a lone pilot block
    if pilot_period == 1:
        raise ValueError("pilot_period: 1 leaves no data positions in the frame")
    per_period = pilot_period - 1
    full, rem = divmod(n_data_symbols, per_period)
    return full * pilot_period + (1 + rem if rem else 0)


def build_frame(bits, scheme: ModulationScheme, cfg: OfdmConfig) -> OfdmFrame:
    """Pack a bit stream into a pilot-interleaved frequency-domain frame.

    Bits are zero-padded to fill the last data symbol; the pad count is
    recorded so the receiver can strip it after demapping.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    n = cfg.n_subcarriers
    per_symbol = scheme.bits_per_symbol * n
    pad_bits = (-bits.size) % per_symbol
    if pad_bits:
        bits = np.concatenate([bits, np.zeros(pad_bits, dtype=np.uint8)])
    n_data = bits.size // per_symbol

    total = _frame_length(n_data, cfg.pilot_period)
    pilot_mask = (np.arange(total) % cfg.pilot_period) == 0
    tones = np.empty((total, n), dtype=complex)
    tones[pilot_mask] = cfg.pilot_value
    if n_data:
        tones[~pilot_mask] = map_bits(bits, scheme).reshape(n_data, n)
    return OfdmFrame(tones, pilot_mask, pad_bits)


def frame_to_samples(frame: OfdmFrame, cfg: OfdmConfig) -> np.ndarray:
    """IDFT each symbol, add the cyclic prefix, concatenate in order."""
    time = dft(frame.tones, inverse=True)
    return add_cyclic_prefix(time, cfg.cp_len).ravel()


def samples_to_frame(samples, cfg: OfdmConfig, n_symbols: int) -> OfdmFrame:
    """Inverse of :func:`frame_to_samples`: split, strip CP, DFT.

    ``pad_bits`` is unknown on the receive side and set to zero; the
    transmitter's frame carries the authoritative count.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size != n_symbols * cfg.symbol_len:
        raise ValueError(
            f"sample count {samples.size} != {n_symbols} symbols "
            f"x {cfg.symbol_len} samples"
        )
    blocks = samples.reshape(n_symbols, cfg.symbol_len)
    tones = dft(remove_cyclic_prefix(blocks, cfg.cp_len))
    pilot_mask = (np.arange(n_symbols) % cfg.pilot_period) == 0
    return OfdmFrame(tones, pilot_mask, 0)
