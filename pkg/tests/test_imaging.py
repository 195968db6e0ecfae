"""core imaging: decode, resize, grayscale, HSV, crop."""

import numpy as np
import pytest

from docid import imaging
from docid.errors import DecodeError, IoError, OutOfBounds
from docid.imaging import Image


def _png(tmp_path, arr, name="img.png"):
    path = tmp_path / name
    imaging.save_image(Image(arr), path)
    return path


class TestLoadImage:
    def test_white_pixel_png(self, tmp_path):
        path = _png(tmp_path, np.full((1, 1, 3), 255, dtype=np.uint8))
        img = imaging.load_image(path)
        assert (img.width, img.height, img.channels) == (1, 1, "rgb")
        assert img.pixels.tolist() == [255, 255, 255]

    def test_black_2x2_png(self, tmp_path):
        path = _png(tmp_path, np.zeros((2, 2, 3), dtype=np.uint8))
        img = imaging.load_image(path)
        assert img.pixels.tolist() == [0] * 12

    def test_gray_png_expanded_to_rgb(self, tmp_path):
        path = _png(tmp_path, np.full((3, 3), 7, dtype=np.uint8))
        img = imaging.load_image(path)
        assert img.channels == "rgb"
        assert np.all(img.data == 7)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            imaging.load_image(tmp_path / "nope.png")

    def test_truncated_jpeg(self, tmp_path):
        from PIL import Image as PilImage
        rng = np.random.default_rng(3)
        arr = rng.integers(0, 256, (64, 64, 3), dtype=np.uint8)
        full = tmp_path / "full.jpg"
        PilImage.fromarray(arr).save(full, format="JPEG")
        data = full.read_bytes()
        broken = tmp_path / "broken.jpg"
        broken.write_bytes(data[: len(data) // 2])
        with pytest.raises(DecodeError):
            imaging.load_image(broken)

    def test_not_an_image(self, tmp_path):
        path = tmp_path / "junk.png"
        path.write_bytes(b"definitely not a png")
        with pytest.raises(DecodeError):
            imaging.load_image(path)


class TestResize:
    def test_identity_is_exact(self, gradient_gray):
        out = imaging.resize(gradient_gray, 32, 32)
        assert np.array_equal(out.data, gradient_gray.data)

    def test_checkerboard_to_single_pixel(self):
        img = Image(np.array([[0, 255], [255, 0]], dtype=np.uint8))
        out = imaging.resize(img, 1, 1)
        # mean 127.5 rounds half away from zero
        assert out.pixels.tolist() == [128]

    def test_exact_halving_is_block_mean(self):
        rng = np.random.default_rng(5)
        arr = rng.integers(0, 256, (16, 12), dtype=np.uint8)
        out = imaging.resize(Image(arr), 6, 8)
        # independent oracle: brute-force 2x2 block mean with the same
        # half-away-from-zero rounding
        expect = np.zeros((8, 6), dtype=np.uint8)
        a = arr.astype(np.float64)
        for y in range(8):
            for x in range(6):
                m = a[2 * y:2 * y + 2, 2 * x:2 * x + 2].mean()
                expect[y, x] = int(np.floor(m + 0.5))
        assert np.array_equal(out.data, expect)

    def test_rgb_halving(self):
        rng = np.random.default_rng(6)
        arr = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        out = imaging.resize(Image(arr), 4, 4)
        a = arr.astype(np.float64)
        blocks = a.reshape(4, 2, 4, 2, 3).mean(axis=(1, 3))
        assert np.array_equal(out.data, np.floor(blocks + 0.5).astype(np.uint8))

    def test_bad_target(self, white_rgb):
        with pytest.raises(ValueError):
            imaging.resize(white_rgb, 0, 4)


class TestGrayscale:
    @pytest.mark.parametrize("rgb,luma", [
        ((255, 255, 255), 255),
        ((255, 0, 0), 76),    # round(0.299 * 255)
        ((0, 255, 0), 150),   # round(0.587 * 255)
        ((0, 0, 255), 29),
    ])
    def test_luma_anchors(self, rgb, luma):
        img = Image(np.array([[rgb]], dtype=np.uint8))
        assert imaging.to_grayscale(img).pixels.tolist() == [luma]

    def test_idempotent_on_gray_content(self):
        rng = np.random.default_rng(1)
        v = rng.integers(0, 256, (5, 5), dtype=np.uint8)
        rgb = Image(np.stack([v, v, v], axis=2))
        once = imaging.to_grayscale(rgb)
        assert np.array_equal(once.data, v)
        assert imaging.to_grayscale(once) is once


class TestRgbToHsv:
    def test_primary_red(self):
        px = imaging.rgb_to_hsv(255, 0, 0)
        assert (px.hue, px.saturation, px.value) == (0.0, 100.0, 100.0)

    def test_black(self):
        px = imaging.rgb_to_hsv(0, 0, 0)
        assert (px.hue, px.saturation, px.value) == (0.0, 0.0, 0.0)

    def test_olive(self):
        px = imaging.rgb_to_hsv(128, 128, 0)
        assert px.hue == pytest.approx(60.0)
        assert px.saturation == pytest.approx(100.0)
        assert px.value == pytest.approx(50.196, abs=1e-3)

    def test_hue_range_and_achromatic_rule(self):
        rng = np.random.default_rng(2)
        rgb = rng.integers(0, 256, (500, 3), dtype=np.uint8)
        hsv = imaging.rgb_to_hsv_array(rgb)
        assert np.all(hsv[:, 0] >= 0) and np.all(hsv[:, 0] < 360)
        assert np.all(hsv[:, 1:] >= 0) and np.all(hsv[:, 1:] <= 100)
        gray = imaging.rgb_to_hsv_array(np.array([[9, 9, 9]], dtype=np.uint8))
        assert gray[0, 0] == 0.0

    def test_round_trip_on_lattice(self):
        # reference inverse, test-only oracle
        def hsv_to_rgb(h, s, v):
            s /= 100.0
            v /= 100.0
            c = v * s
            hp = h / 60.0
            x = c * (1 - abs(hp % 2 - 1))
            r, g, b = [(c, x, 0), (x, c, 0), (0, c, x),
                       (0, x, c), (x, 0, c), (c, 0, x)][int(hp) % 6]
            m = v - c
            return tuple(int(round((t + m) * 255)) for t in (r, g, b))

        vals = np.linspace(0, 255, 17).round().astype(np.uint8)
        grid = np.stack(np.meshgrid(vals, vals, vals, indexing="ij"),
                        axis=-1).reshape(-1, 3)
        hsv = imaging.rgb_to_hsv_array(grid)
        for (r, g, b), (h, s, v) in zip(grid.tolist(), hsv.tolist()):
            rr, gg, bb = hsv_to_rgb(h, s, v)
            assert abs(rr - r) <= 1 and abs(gg - g) <= 1 and abs(bb - b) <= 1


class TestCrop:
    def test_full_crop_is_identity(self, gradient_gray):
        out = imaging.crop(gradient_gray, 0, 0, 32, 32)
        assert np.array_equal(out.data, gradient_gray.data)

    def test_single_pixel(self):
        arr = np.arange(16, dtype=np.uint8).reshape(4, 4)
        out = imaging.crop(Image(arr), 2, 1, 1, 1)
        assert out.pixels.tolist() == [arr[1, 2]]

    def test_out_of_bounds(self, gradient_gray):
        with pytest.raises(OutOfBounds):
            imaging.crop(gradient_gray, 1, 0, 32, 32)


class TestRotate:
    def test_rotate_360_center_preserved(self, gradient_gray):
        out = imaging.rotate(gradient_gray, 360.0)
        center = gradient_gray.data[8:24, 8:24]
        assert np.allclose(out.data[8:24, 8:24], center, atol=1)

    def test_rotate_90_exact_square(self):
        arr = np.arange(9, dtype=np.uint8).reshape(3, 3)
        out = imaging.rotate(Image(arr), 90.0)
        assert np.array_equal(out.data, np.rot90(arr, -1).astype(np.uint8)) or \
            np.array_equal(out.data, np.rot90(arr, 1).astype(np.uint8))


class TestImageInvariants:
    def test_pixel_length(self, white_rgb):
        assert len(white_rgb.pixels) == 8 * 8 * 3

    def test_immutable(self, white_rgb):
        with pytest.raises(ValueError):
            white_rgb.data[0, 0, 0] = 1

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            Image(np.zeros((4, 4, 2), dtype=np.uint8))
