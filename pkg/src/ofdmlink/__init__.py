"""OFDM link-level simulator.

Bit streams and grayscale images travel over BPSK/DBPSK/QPSK/16QAM/64QAM
constellations on a 64-tone OFDM grid with a cyclic prefix, through AWGN,
flat Rayleigh or tapped-delay multipath channels, with block-pilot
least-squares channel estimation smoothed by a forgetting factor.  All
simulations are deterministic for a fixed seed.
"""

from .channel import (
    DEFAULT_MULTIPATH_TAPS,
    ChannelModel,
    ChannelRealization,
    apply_awgn,
    draw_realization,
    ebn0_from_symbol_snr,
    noise_sigma,
    propagate,
)
from .estimation import (
    EqualizedSymbol,
    EstimatorState,
    equalize,
    estimate_and_equalize_frame,
    ls_update,
    new_state,
)
from .imageio import GrayImage, bits_to_image, image_to_bits, read_pgm, write_pgm
from .metrics import (
    BerRecord,
    ber,
    qfunc,
    scatter_capture,
    theory_bpsk_awgn,
    theory_bpsk_rayleigh,
)
from .modem import (
    BPSK,
    DBPSK,
    QAM16,
    QAM64,
    QPSK,
    SCHEMES,
    ModulationScheme,
    constellation,
    dbpsk_decode,
    dbpsk_encode,
    demap_symbols,
    map_bits,
)
from .ofdm import (
    OfdmConfig,
    OfdmFrame,
    add_cyclic_prefix,
    build_frame,
    dft,
    frame_to_samples,
    remove_cyclic_prefix,
    samples_to_frame,
)
from .simulate import RunConfig, run_image, run_point, run_sweep, stream_seed

__version__ = "0.1.0"
