"""BER accounting, closed-form BPSK reference curves, scatter capture."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BerRecord",
    "ber",
    "qfunc",
    "theory_bpsk_awgn",
    "theory_bpsk_rayleigh",
    "scatter_capture",
]


@dataclass(frozen=True)
class BerRecord:
    """Error count at one Eb/N0 point."""

    snr_db: float
    bits_total: int
    bits_error: int

    def __post_init__(self):
        if self.bits_total <= 0:
            raise ValueError("bits_total must be positive")
        if not 0 <= self.bits_error <= self.bits_total:
            raise ValueError("bits_error outside [0, bits_total]")

    @property
    def ber(self) -> float:
        return self.bits_error / self.bits_total


def ber(tx, rx, snr_db: float = float("nan")) -> BerRecord:
    """Count disagreeing positions between two equal-length bit streams."""
    tx = np.asarray(tx, dtype=np.uint8).ravel()
    rx = np.asarray(rx, dtype=np.uint8).ravel()
    if tx.size != rx.size:
        raise ValueError(f"bit stream lengths differ: {tx.size} vs {rx.size}")
    if tx.size == 0:
        raise ValueError("empty bit streams")
    return BerRecord(snr_db, tx.size, int(np.count_nonzero(tx != rx)))


def qfunc(x: float) -> float:
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def theory_bpsk_awgn(ebn0_db: float) -> float:
    """Ideal coherent BPSK bit error rate over AWGN, Q(sqrt(2*gamma))."""
    gamma = 10.0 ** (ebn0_db / 10.0)
    return qfunc(math.sqrt(2.0 * gamma))


def theory_bpsk_rayleigh(ebn0_db: float) -> float:
    """Ideal coherent BPSK bit error rate over flat Rayleigh fading."""
    gamma = 10.0 ** (ebn0_db / 10.0)
    return 0.5 * (1.0 - math.sqrt(gamma / (1.0 + gamma)))


def scatter_capture(tones, max_points: int) -> np.ndarray:
    """First ``max_points`` tones as (re, im) rows, for external plotting."""
    if max_points <= 0:
        raise ValueError("max_points must be positive")
    tones = np.asarray(tones, dtype=complex).ravel()[:max_points]
    return np.column_stack([tones.real, tones.imag])
