"""Image/bit conversion and the PGM container."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdmlink.imageio import (
    GrayImage,
    bits_to_image,
    image_to_bits,
    read_pgm,
    write_pgm,
)


def make_image(rng, width, height):
    return GrayImage(width, height, rng.integers(0, 256, (height, width), dtype=np.uint8))


class TestBitConversion:
    def test_single_pixel_msb_first(self):
        img = GrayImage(1, 1, np.array([[0xA5]], dtype=np.uint8))
        np.testing.assert_array_equal(image_to_bits(img), [1, 0, 1, 0, 0, 1, 0, 1])

    def test_bit_count_for_paper_sized_image(self):
        img = GrayImage(1024, 768, np.zeros((768, 1024), dtype=np.uint8))
        assert image_to_bits(img).size == 6_291_456

    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        img = make_image(rng, 17, 9)
        assert bits_to_image(image_to_bits(img), 17, 9) == img

    def test_all_zero_bits(self):
        img = bits_to_image(np.zeros(2 * 3 * 8, dtype=np.uint8), 2, 3)
        assert np.all(img.pixels == 0)

    def test_all_one_bits(self):
        img = bits_to_image(np.ones(2 * 2 * 8, dtype=np.uint8), 2, 2)
        assert np.all(img.pixels == 255)

    def test_empty_image_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            image_to_bits(GrayImage(0, 0, np.zeros((0, 0), dtype=np.uint8)))

    def test_bit_count_checked(self):
        with pytest.raises(ValueError, match="bit count"):
            bits_to_image(np.zeros(7, dtype=np.uint8), 1, 1)

    @settings(max_examples=25, deadline=None)
    @given(
        width=st.integers(1, 64),
        height=st.integers(1, 64),
        seed=st.integers(0, 2**31),
    )
    def test_roundtrip_property(self, width, height, seed):
        img = make_image(np.random.default_rng(seed), width, height)
        assert bits_to_image(image_to_bits(img), width, height) == img


class TestPgm:
    def test_writer_emits_canonical_bytes(self):
        img = GrayImage(2, 1, np.array([[0, 255]], dtype=np.uint8))
        assert write_pgm(img) == b"P5\n2 1\n255\n\x00\xff"

    def test_read_write_roundtrip(self):
        rng = np.random.default_rng(1)
        img = make_image(rng, 13, 7)
        assert read_pgm(write_pgm(img)) == img

    def test_rewrite_normalizes_header_whitespace(self):
        raw = b"P5 # comment\n# another comment\n 3\t2 \n255\n" + bytes(range(6))
        img = read_pgm(raw)
        assert (img.width, img.height) == (3, 2)
        assert write_pgm(img) == b"P5\n3 2\n255\n" + bytes(range(6))

    def test_bad_magic(self):
        with pytest.raises(ValueError, match="magic"):
            read_pgm(b"P6\n1 1\n255\n\x00")

    def test_unsupported_maxval(self):
        with pytest.raises(ValueError, match="maxval"):
            read_pgm(b"P5\n1 1\n65535\n\x00\x00")

    def test_truncated_raster(self):
        with pytest.raises(ValueError, match="truncated"):
            read_pgm(b"P5\n4 4\n255\n\x00\x00")

    def test_bad_header_field(self):
        with pytest.raises(ValueError, match="header"):
            read_pgm(b"P5\nwide 1\n255\n\x00")

    def test_bad_dimensions(self):
        with pytest.raises(ValueError, match="dimensions"):
            read_pgm(b"P5\n0 1\n255\n")

    def test_pixels_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            GrayImage(2, 2, np.zeros((1, 2), dtype=np.uint8))
