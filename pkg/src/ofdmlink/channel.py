"""Propagation models: AWGN, flat Rayleigh, tapped-delay multipath.

Noise is calibrated to a requested Eb/N0 assuming unit-energy symbols:
Es/N0 = k * Eb/N0 for k bits per symbol, and the per-sample complex
noise variance is 2*sigma^2 = 1/(k * 10^(ebn0_db/10)).  Cyclic-prefix
and pilot overhead are deliberately not charged, which is what makes
the measured AWGN curve land on the ideal BPSK reference.

All randomness flows through an explicit ``numpy.random.Generator`` so
identical seeds reproduce identical sample streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modem import ModulationScheme
from .ofdm import OfdmConfig

__all__ = [
    "ChannelModel",
    "ChannelRealization",
    "DEFAULT_MULTIPATH_TAPS",
    "AWGN",
    "RAYLEIGH_FLAT",
    "MULTIPATH",
    "CHANNEL_KINDS",
    "noise_sigma",
    "apply_awgn",
    "draw_realization",
    "propagate",
]

AWGN = "awgn"
RAYLEIGH_FLAT = "rayleigh"
MULTIPATH = "multipath"
CHANNEL_KINDS = (AWGN, RAYLEIGH_FLAT, MULTIPATH)

# (delay in samples, tap power in dB); normalized to unit total power when
# realizations are drawn.  Fits comfortably inside the default 16-sample CP
# and is frequency selective across 64 tones.
DEFAULT_MULTIPATH_TAPS = ((0, 0.0), (4, -3.0), (8, -6.0))


@dataclass(frozen=True)
class ChannelModel:
    """Propagation medium descriptor.

    ``block_fading=True`` redraws the channel for every frame; ``False``
    holds a single realization for the whole run.
    """

    kind: str = AWGN
    taps: tuple[tuple[int, float], ...] = DEFAULT_MULTIPATH_TAPS
    block_fading: bool = True

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"channel kind: {self.kind!r} not one of {CHANNEL_KINDS}")
        if self.kind == MULTIPATH:
            if not self.taps:
                raise ValueError("taps: multipath channel needs at least one tap")
            delays = [d for d, _ in self.taps]
            if min(delays) < 0:
                raise ValueError("taps: delays must be non-negative")
            if len(set(delays)) != len(delays):
                raise ValueError("taps: duplicate delays")

    @property
    def fades(self) -> bool:
        return self.kind != AWGN


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn channel: impulse response and its per-tone gains."""

    h_time: np.ndarray  # complex taps, index = delay in samples
    h_freq: np.ndarray  # (n_subcarriers,) complex, N-point transform of h_time


def noise_sigma(ebn0_db: float, scheme: ModulationScheme) -> float:
    """Per-real-dimension noise standard deviation for a target Eb/N0."""
    gamma = 10.0 ** (ebn0_db / 10.0)
    return np.sqrt(1.0 / (2.0 * scheme.bits_per_symbol * gamma))


def ebn0_from_symbol_snr(snr_db: float, scheme: ModulationScheme) -> float:
    """Eb/N0 equivalent to a per-symbol SNR (Es/N0) for this scheme.

    Useful when comparing schemes against a shared noise floor instead
    of a shared energy-per-bit budget.
    """
    return snr_db - 10.0 * np.log10(scheme.bits_per_symbol)


def apply_awgn(samples, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise, std sigma per axis."""
    samples = np.asarray(samples, dtype=complex)
    if sigma < 0:
        raise ValueError(f"sigma: {sigma} must be >= 0")
    if sigma == 0:
        return samples
    noise = rng.standard_normal((2, samples.size))
    return samples + sigma * (noise[0] + 1j * noise[1]).reshape(samples.shape)


def _tap_weights(taps) -> tuple[np.ndarray, np.ndarray]:
    delays = np.array([d for d, _ in taps], dtype=int)
    linear = 10.0 ** (np.array([p for _, p in taps]) / 10.0)
    return delays, linear / linear.sum()


def draw_realization(
    model: ChannelModel, cfg: OfdmConfig, rng: np.random.Generator
) -> ChannelRealization:
    """Draw one channel realization; tap delays must fit inside the CP."""
    if model.kind == AWGN:
        h = np.ones(1, dtype=complex)
    elif model.kind == RAYLEIGH_FLAT:
        g = rng.standard_normal(2)
        h = np.array([(g[0] + 1j * g[1]) / np.sqrt(2.0)])
    else:
        delays, weights = _tap_weights(model.taps)
        if delays.max() > cfg.cp_len:
            raise ValueError(
                f"taps: max delay {delays.max()} exceeds cp_len {cfg.cp_len}"
            )
        h = np.zeros(delays.max() + 1, dtype=complex)
        g = rng.standard_normal((delays.size, 2))
        h[delays] = np.sqrt(weights) * (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)
    h_freq = np.fft.fft(h, n=cfg.n_subcarriers)
    return ChannelRealization(h, h_freq)


def propagate(
    samples, realization: ChannelRealization, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Convolve with the impulse response (same-length output), add noise."""
    samples = np.asarray(samples, dtype=complex)
    h = realization.h_time
    if h.size == 1:
        faded = samples * h[0]
    else:
        faded = np.convolve(samples, h)[: samples.size]
    return apply_awgn(faded, sigma, rng)
