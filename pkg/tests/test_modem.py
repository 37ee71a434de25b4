"""Constellation mapping, hard demapping and differential coding."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdmlink.modem import (
    BPSK,
    DBPSK,
    QAM16,
    QAM64,
    QPSK,
    SCHEMES,
    constellation,
    dbpsk_decode,
    dbpsk_encode,
    demap_symbols,
    map_bits,
)

ALL_SCHEMES = list(SCHEMES.values())


def brute_force_demap(symbols, scheme):
    """Independent oracle: argmin over all points, first (lowest) label wins."""
    points = constellation(scheme)
    symbols = np.asarray(symbols, dtype=complex).ravel()
    labels = np.argmin(np.abs(symbols[:, None] - points[None, :]), axis=1)
    k = scheme.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


@pytest.mark.parametrize("scheme", ALL_SCHEMES, ids=lambda s: s.name)
class TestConstellation:
    def test_size(self, scheme):
        assert len(constellation(scheme)) == 2**scheme.bits_per_symbol

    def test_unit_average_energy(self, scheme):
        points = constellation(scheme)
        assert abs(np.mean(np.abs(points) ** 2) - 1.0) < 1e-12

    def test_points_distinct(self, scheme):
        points = constellation(scheme)
        assert len(np.unique(points)) == len(points)

    def test_exhaustive_roundtrip(self, scheme):
        k = scheme.bits_per_symbol
        for pattern in itertools.product((0, 1), repeat=k):
            bits = np.array(pattern, dtype=np.uint8)
            out = demap_symbols(map_bits(bits, scheme), scheme)
            np.testing.assert_array_equal(out, bits)

    def test_demap_matches_brute_force_on_noisy_samples(self, scheme):
        rng = np.random.default_rng(90 + scheme.bits_per_symbol)
        n = 10_000
        labels = rng.integers(0, 2**scheme.bits_per_symbol, n)
        noise = 0.4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        received = constellation(scheme)[labels] + noise
        np.testing.assert_array_equal(
            demap_symbols(received, scheme), brute_force_demap(received, scheme)
        )


@pytest.mark.parametrize("scheme", [QPSK, QAM16, QAM64], ids=lambda s: s.name)
def test_gray_property_axis_neighbours_differ_in_one_bit(scheme):
    points = constellation(scheme)
    k = scheme.bits_per_symbol
    # walk each row (fixed Q) and each column (fixed I) in level order
    for axis in ("real", "imag"):
        coords = getattr(points, axis)
        other = points.imag if axis == "real" else points.real
        for fixed in np.unique(other.round(12)):
            line = np.where(np.isclose(other, fixed))[0]
            line = line[np.argsort(coords[line])]
            for a, b in zip(line[:-1], line[1:]):
                assert bin(int(a) ^ int(b)).count("1") == 1, (
                    f"labels {a} and {b} adjacent on {axis} differ in >1 bit"
                )
    assert len(points) == 2**k


class TestMapExamples:
    def test_bpsk_phase_convention(self):
        assert map_bits([1], BPSK)[0] == 1 + 0j
        assert map_bits([0], BPSK)[0] == -1 + 0j

    def test_qpsk_all_zero_group(self):
        np.testing.assert_allclose(
            map_bits([0, 0], QPSK)[0], (1 + 1j) / np.sqrt(2), rtol=0, atol=1e-15
        )

    def test_16qam_levels(self):
        levels = np.unique(np.abs(constellation(QAM16).real))
        np.testing.assert_allclose(levels * np.sqrt(10), [1.0, 3.0], atol=1e-12)

    def test_64qam_levels(self):
        levels = np.unique(np.abs(constellation(QAM64).real))
        np.testing.assert_allclose(levels * np.sqrt(42), [1, 3, 5, 7], atol=1e-12)

    def test_length_must_be_multiple_of_group(self):
        with pytest.raises(ValueError, match="multiple"):
            map_bits([0, 1, 0], QPSK)

    def test_rejects_non_binary_values(self):
        with pytest.raises(ValueError, match="outside"):
            map_bits([0, 2], QPSK)

    def test_empty_stream_maps_to_no_symbols(self):
        assert map_bits([], QAM64).size == 0


class TestDemapExamples:
    def test_bpsk_noisy_sample(self):
        np.testing.assert_array_equal(demap_symbols([0.3 - 0.1j], BPSK), [1])

    def test_qpsk_origin_tie_breaks_to_label_zero(self):
        np.testing.assert_array_equal(demap_symbols([0 + 0j], QPSK), [0, 0])

    def test_bpsk_origin_tie_breaks_to_label_zero(self):
        np.testing.assert_array_equal(demap_symbols([0 + 0j], BPSK), [0])

    def test_16qam_axis_midpoint_ties_match_brute_force(self):
        # exact midpoints between level pairs, both axes
        mids = np.array([0.0, 2.0, -2.0]) / np.sqrt(10)
        grid = (mids[:, None] + 1j * mids[None, :]).ravel()
        np.testing.assert_array_equal(
            demap_symbols(grid, QAM16), brute_force_demap(grid, QAM16)
        )


class TestDifferential:
    def test_all_zero_identity(self):
        np.testing.assert_array_equal(dbpsk_encode([0, 0, 0]), [0, 0, 0])
        np.testing.assert_array_equal(dbpsk_decode([0, 0, 0]), [0, 0, 0])

    def test_ones_pattern(self):
        np.testing.assert_array_equal(dbpsk_encode([1, 1, 1]), [1, 0, 1])
        np.testing.assert_array_equal(dbpsk_decode([1, 0, 1]), [1, 1, 1])

    def test_decode_inverts_encode_for_all_byte_patterns(self):
        for value in range(256):
            bits = np.array([(value >> i) & 1 for i in range(8)], dtype=np.uint8)
            np.testing.assert_array_equal(dbpsk_decode(dbpsk_encode(bits)), bits)

    def test_random_roundtrip(self):
        rng = np.random.default_rng(5)
        bits = rng.integers(0, 2, 64, dtype=np.uint8)
        np.testing.assert_array_equal(dbpsk_decode(dbpsk_encode(bits)), bits)

    def test_empty(self):
        assert dbpsk_encode([]).size == 0
        assert dbpsk_decode([]).size == 0

    def test_dbpsk_uses_bpsk_points(self):
        np.testing.assert_array_equal(constellation(DBPSK), constellation(BPSK))


@settings(max_examples=40, deadline=None)
@given(
    data=st.data(),
    name=st.sampled_from(sorted(SCHEMES)),
)
def test_roundtrip_property(data, name):
    scheme = SCHEMES[name]
    n_symbols = data.draw(st.integers(min_value=0, max_value=40))
    bits = data.draw(
        st.lists(
            st.integers(0, 1),
            min_size=n_symbols * scheme.bits_per_symbol,
            max_size=n_symbols * scheme.bits_per_symbol,
        )
    )
    bits = np.array(bits, dtype=np.uint8)
    np.testing.assert_array_equal(demap_symbols(map_bits(bits, scheme), scheme), bits)
