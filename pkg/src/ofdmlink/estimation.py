"""Block-pilot least-squares channel estimation with a forgetting factor.

Each pilot block updates two per-tone accumulators with exponential
weights (forgetting factor ``lam`` in (0, 1]):

    corr  <- lam * conj(pilot_tx) * pilot_rx + (1 - lam) * corr
    power <- lam * |pilot_tx|^2            + (1 - lam) * power

and the channel estimate is their ratio, h_est = corr / power.  The
conjugate form makes the ratio the true per-tone LS estimate for any
complex pilot (for real unit pilots it coincides with the plain
product).  One noiseless update recovers the channel exactly for any
``lam``; smaller ``lam`` averages pilot noise harder, ``lam = 1`` keeps
only the latest pilot.

Equalization divides each received tone by its estimate; tones in a
deep fade (|h_est| below ``fade_eps``) are passed through unscaled and
flagged instead of being amplified to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import OfdmConfig, OfdmFrame

__all__ = [
    "FADE_EPS",
    "EstimatorState",
    "EqualizedSymbol",
    "new_state",
    "ls_update",
    "equalize",
    "estimate_and_equalize_frame",
]

FADE_EPS = 1e-12


@dataclass
class EstimatorState:
    """Per-tone accumulators of the forgetting-factor LS estimator."""

    corr: np.ndarray  # weighted sum of conj(pilot_tx) * pilot_rx, per tone
    power: np.ndarray  # weighted sum of |pilot_tx|^2, per tone (real, >= 0)
    lam: float  # forgetting factor in (0, 1]
    n_updates: int = 0
    h_est: np.ndarray | None = None  # corr / power after the first update


@dataclass
class EqualizedSymbol:
    """Equalized tones plus the per-tone deep-fade flags."""

    tones: np.ndarray
    fade_flags: np.ndarray


def new_state(n_subcarriers: int, lam: float = 0.9) -> EstimatorState:
    if not 0 < lam <= 1:
        raise ValueError(f"forgetting factor {lam} not in (0, 1]")
    return EstimatorState(
        corr=np.zeros(n_subcarriers, dtype=complex),
        power=np.zeros(n_subcarriers),
        lam=lam,
    )


def ls_update(state: EstimatorState, pilot_tx, pilot_rx) -> EstimatorState:
    """Fold one pilot block into the estimate (updates state in place)."""
    pilot_tx = np.asarray(pilot_tx, dtype=complex)
    pilot_rx = np.asarray(pilot_rx, dtype=complex)
    if np.any(pilot_tx == 0):
        raise ValueError("pilot_tx contains a zero tone")
    lam = state.lam
    state.corr = lam * np.conj(pilot_tx) * pilot_rx + (1 - lam) * state.corr
    state.power = lam * np.abs(pilot_tx) ** 2 + (1 - lam) * state.power
    state.h_est = state.corr / state.power
    state.n_updates += 1
    return state


def equalize(rx_tones, state: EstimatorState, fade_eps: float = FADE_EPS) -> EqualizedSymbol:
    """Divide received tones (..., N) by the current channel estimate."""
    if state.n_updates == 0:
        raise ValueError("estimator has no pilot update yet")
    rx_tones = np.asarray(rx_tones, dtype=complex)
    fade_flags = np.abs(state.h_est) < fade_eps
    divisor = np.where(fade_flags, 1.0, state.h_est)
    return EqualizedSymbol(rx_tones / divisor, fade_flags)


def estimate_and_equalize_frame(
    frame: OfdmFrame, cfg: OfdmConfig, state: EstimatorState
) -> tuple[np.ndarray, EstimatorState]:
    """Walk a received frame: pilots update the state, data gets equalized.

    Returns the equalized data tones in frame order, shape
    (n_data_symbols, n_subcarriers), along with the updated state.
    """
    expected = (np.arange(frame.n_symbols) % cfg.pilot_period) == 0
    if not np.array_equal(frame.pilot_mask, expected):
        raise ValueError("frame pilot_mask inconsistent with pilot_period")
    pilot_tx = np.full(cfg.n_subcarriers, cfg.pilot_value, dtype=complex)

    blocks = []
    i = 0
    while i < frame.n_symbols:
        if frame.pilot_mask[i]:
            ls_update(state, pilot_tx, frame.tones[i])
            i += 1
            continue
        if state.n_updates == 0:
            raise ValueError("data symbol before any pilot block")
        j = i
        while j < frame.n_symbols and not frame.pilot_mask[j]:
            j += 1
        blocks.append(equalize(frame.tones[i:j], state).tones)
        i = j

    if blocks:
        data = np.concatenate(blocks, axis=0)
    else:
        data = np.empty((0, cfg.n_subcarriers), dtype=complex)
    return data, state
