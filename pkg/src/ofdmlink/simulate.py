"""End-to-end link pipeline and deterministic Monte-Carlo BER sweeps.

One frame travels: bits -> (differential encode) -> constellation
mapping -> pilot-interleaved OFDM frame -> IDFT + cyclic prefix ->
channel -> CP removal + DFT -> equalization -> hard demap ->
(differential decode) -> bits.

Equalization modes:

* ``"on"``      pilot-driven forgetting-factor LS estimate,
* ``"off"``     received data tones demapped raw,
* ``"perfect"`` genie equalization with the true per-tone gains
                (reproduces the ideal coherent fading reference).

Every Eb/N0 point draws from its own RNG stream derived as
``seed + 0x9E3779B97F4A7C15 * point_index`` (mod 2^64), so sweeps give
identical results whether points run serially or in parallel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (
    MULTIPATH,
    ChannelModel,
    ChannelRealization,
    apply_awgn,
    draw_realization,
    noise_sigma,
    propagate,
)
from .estimation import FADE_EPS, EstimatorState, estimate_and_equalize_frame, new_state
from .imageio import GrayImage, bits_to_image, image_to_bits
from .metrics import BerRecord
from .modem import ModulationScheme, dbpsk_decode, dbpsk_encode, demap_symbols
from .ofdm import OfdmConfig, build_frame, frame_to_samples, samples_to_frame

__all__ = [
    "ESTIMATION_MODES",
    "SEED_STRIDE",
    "RunConfig",
    "stream_seed",
    "run_point",
    "run_sweep",
    "run_image",
]

ESTIMATION_MODES = ("off", "on", "perfect")

# Per-point RNG stream splitting rule; parallel and serial sweeps agree.
SEED_STRIDE = 0x9E3779B97F4A7C15


def stream_seed(seed: int, point_index: int) -> int:
    return (seed + SEED_STRIDE * point_index) % (1 << 64)


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation run depends on."""

    scheme: ModulationScheme
    channel: ChannelModel
    snr_db: tuple[float, ...] = (0.0,)
    estimation: str = "on"
    forgetting: float = 0.9
    pilot_period: int = 8
    n_subcarriers: int = 64
    cp_len: int = 16
    bit_budget: int = 2_000_000
    frame_data_symbols: int | None = None  # default: pilot_period - 1
    seed: int = 0
    reset_estimator_per_frame: bool = True

    def ofdm(self) -> OfdmConfig:
        return OfdmConfig(self.n_subcarriers, self.cp_len, self.pilot_period)

    def validate(self) -> None:
        """Fail fast with the offending field named, before any output."""
        self.ofdm()  # n_subcarriers / cp_len / pilot_period invariants
        if self.pilot_period < 2:
            raise ValueError("pilot_period: must be >= 2 to leave room for data")
        if self.estimation not in ESTIMATION_MODES:
            raise ValueError(
                f"estimation: {self.estimation!r} not one of {ESTIMATION_MODES}"
            )
        if not 0 < self.forgetting <= 1:
            raise ValueError(f"forgetting: {self.forgetting} not in (0, 1]")
        if self.bit_budget < 1:
            raise ValueError(f"bit_budget: {self.bit_budget} must be positive")
        if self.frame_data_symbols is not None and self.frame_data_symbols < 1:
            raise ValueError("frame_data_symbols: must be >= 1")
        if not self.snr_db:
            raise ValueError("snr_db: at least one Eb/N0 point required")
        if self.seed < 0:
            raise ValueError(f"seed: {self.seed} must be non-negative")
        if self.channel.kind == MULTIPATH:
            max_delay = max(d for d, _ in self.channel.taps)
            if max_delay > self.cp_len:
                raise ValueError(
                    f"taps: max delay {max_delay} exceeds cp_len {self.cp_len}"
                )

    @property
    def bits_per_frame(self) -> int:
        data_symbols = self.frame_data_symbols or (self.pilot_period - 1)
        return data_symbols * self.scheme.bits_per_symbol * self.n_subcarriers


def _genie_equalize(tones: np.ndarray, h_freq: np.ndarray) -> np.ndarray:
    """Divide by the true per-tone gains, skipping deep fades."""
    divisor = np.where(np.abs(h_freq) < FADE_EPS, 1.0, h_freq)
    return tones / divisor


def _run_frame(
    bits: np.ndarray,
    scheme: ModulationScheme,
    ofdm_cfg: OfdmConfig,
    estimation: str,
    sigma: float,
    rng: np.random.Generator,
    state: EstimatorState | None,
    realization: ChannelRealization,
) -> np.ndarray:
    coded = dbpsk_encode(bits) if scheme.differential else bits
    frame = build_frame(coded, scheme, ofdm_cfg)
    tx = frame_to_samples(frame, ofdm_cfg)
    rx = propagate(tx, realization, sigma, rng)
    rx_frame = samples_to_frame(rx, ofdm_cfg, frame.n_symbols)

    if estimation == "on":
        data, _ = estimate_and_equalize_frame(rx_frame, ofdm_cfg, state)
    elif estimation == "perfect":
        data = _genie_equalize(rx_frame.data_tones(), realization.h_freq)
    else:
        data = rx_frame.data_tones()

    hat = demap_symbols(data.ravel(), scheme)[: coded.size]
    return dbpsk_decode(hat) if scheme.differential else hat


def run_point(cfg: RunConfig, snr_db: float, point_index: int = 0) -> BerRecord:
    """Monte-Carlo BER at one Eb/N0 point, on its own RNG stream.

    The channel is redrawn per frame when block fading is on; the
    estimator resets whenever a fresh realization is drawn (unless
    ``reset_estimator_per_frame`` is off, in which case stale history
    decays at the forgetting rate).
    """
    rng = np.random.default_rng(stream_seed(cfg.seed, point_index))
    scheme = cfg.scheme
    ofdm_cfg = cfg.ofdm()
    sigma = noise_sigma(snr_db, scheme)
    frame_bits = cfg.bits_per_frame

    total = 0
    errors = 0
    realization = None
    state: EstimatorState | None = None
    while total < cfg.bit_budget:
        n = min(frame_bits, cfg.bit_budget - total)
        bits = rng.integers(0, 2, size=n, dtype=np.uint8)
        if realization is None or (cfg.channel.fades and cfg.channel.block_fading):
            realization = draw_realization(cfg.channel, ofdm_cfg, rng)
            if cfg.reset_estimator_per_frame:
                state = None
        if cfg.estimation == "on" and state is None:
            state = new_state(cfg.n_subcarriers, cfg.forgetting)
        rx_bits = _run_frame(
            bits, scheme, ofdm_cfg, cfg.estimation, sigma, rng, state, realization
        )
        errors += int(np.count_nonzero(bits ^ rx_bits))
        total += n
    return BerRecord(snr_db, total, errors)


def run_sweep(cfg: RunConfig, jobs: int = 1) -> list[BerRecord]:
    """All configured Eb/N0 points, output ordered by snr_db.

    Points are independent RNG streams, so ``jobs > 1`` changes only
    wall time, never results.
    """
    cfg.validate()
    points = list(enumerate(cfg.snr_db))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda p: run_point(cfg, p[1], p[0]), points))
    else:
        records = [run_point(cfg, snr, i) for i, snr in points]
    records.sort(key=lambda r: r.snr_db)
    return records


def run_image(
    img: GrayImage,
    cfg: RunConfig,
    snr_db: float,
    scatter_max: int = 0,
    chunk_symbols: int = 4096,
) -> tuple[GrayImage, BerRecord, np.ndarray]:
    """Send one image through the link over a single channel realization.

    Processes the frame in chunks of whole pilot periods to bound
    memory; chunking changes neither the transmitted symbol sequence
    nor the noise stream.  Returns the decoded image, its BerRecord,
    and up to ``scatter_max`` equalized data tones as (re, im) rows.
    """
    cfg.validate()
    rng = np.random.default_rng(stream_seed(cfg.seed, 0))
    scheme = cfg.scheme
    ofdm_cfg = cfg.ofdm()
    sigma = noise_sigma(snr_db, scheme)

    bits = image_to_bits(img)
    coded = dbpsk_encode(bits) if scheme.differential else bits

    realization = draw_realization(cfg.channel, ofdm_cfg, rng)
    state = new_state(cfg.n_subcarriers, cfg.forgetting)
    h = realization.h_time

    bits_per_data_symbol = scheme.bits_per_symbol * cfg.n_subcarriers
    periods = max(1, chunk_symbols // cfg.pilot_period)
    chunk_bits = periods * (cfg.pilot_period - 1) * bits_per_data_symbol

    decoded_chunks = []
    scatter: list[np.ndarray] = []
    captured = 0
    carry = np.zeros(0, dtype=complex)
    for start in range(0, coded.size, chunk_bits):
        frame = build_frame(coded[start : start + chunk_bits], scheme, ofdm_cfg)
        tx = frame_to_samples(frame, ofdm_cfg)
        if h.size == 1:
            faded = tx * h[0]
        else:
            full = np.convolve(tx, h)
            faded = full[: tx.size]
            faded[: carry.size] += carry  # convolution tail of the previous chunk
            carry = full[tx.size :]
        rx = apply_awgn(faded, sigma, rng)
        rx_frame = samples_to_frame(rx, ofdm_cfg, frame.n_symbols)

        if cfg.estimation == "on":
            data, _ = estimate_and_equalize_frame(rx_frame, ofdm_cfg, state)
        elif cfg.estimation == "perfect":
            data = _genie_equalize(rx_frame.data_tones(), realization.h_freq)
        else:
            data = rx_frame.data_tones()

        flat = data.ravel()
        if captured < scatter_max:
            take = flat[: scatter_max - captured]
            scatter.append(np.column_stack([take.real, take.imag]))
            captured += take.size
        decoded_chunks.append(demap_symbols(flat, scheme))

    hat = np.concatenate(decoded_chunks)[: coded.size]
    if scheme.differential:
        hat = dbpsk_decode(hat)
    record = BerRecord(snr_db, bits.size, int(np.count_nonzero(bits ^ hat)))
    decoded = bits_to_image(hat, img.width, img.height)
    points = np.concatenate(scatter) if scatter else np.empty((0, 2))
    return decoded, record, points
