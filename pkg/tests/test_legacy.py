"""HOG, color-name histograms, SP3 and cosine classification."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from docid import legacy
from docid.errors import ImageTooSmall, ZeroVector
from docid.imaging import Image
from docid.legacy import (
    CentroidNamer,
    ColorCentroids,
    FuzzyNamer,
    classify_similarity,
    color_histogram,
    color_name_centroid,
    combine_blocks,
    compute_hog,
    cosine_similarity,
    sp3,
)


def gray(arr):
    return Image(np.asarray(arr, dtype=np.uint8))


class TestHog:
    def test_constant_image_all_zero(self):
        vec = compute_hog(gray(np.full((32, 32), 90)))
        assert vec.shape == ((3 * 3) * 2 * 2 * 9,)
        assert np.all(vec == 0.0)

    def test_vertical_edge_energy_in_bin0(self):
        # columns 0..15 dark, 16..31 bright: horizontal gradient only
        arr = np.zeros((32, 32))
        arr[:, 16:] = 200
        vec = compute_hog(gray(arr)).reshape(3, 3, 2, 2, 9)
        energy = vec.sum(axis=(2, 3))  # per block, per bin
        # all gradient energy sits in orientation bin 0
        assert energy[:, :, 0].sum() > 0
        assert energy[:, :, 1:].sum() == pytest.approx(0.0, abs=1e-12)
        # only blocks touching the center columns carry energy
        assert energy[:, 1, 0].sum() > 0

    def test_hand_computed_cell(self):
        # one bright column inside an otherwise flat 16x16 image
        arr = np.zeros((16, 16))
        arr[:, 8] = 100
        vec = compute_hog(gray(arr))
        # central differences: dx = +50 at col 7, -50 at col 9; both map to
        # orientation 0 mod pi, i.e. unsigned bin 0. Col 7 lies in the left
        # cell, col 9 in the right one: each cell holds 8 rows of magnitude
        # 50, and the single 2x2 block L2-normalizes the four cells.
        expect_cell = 8 * 50.0
        norm = np.sqrt(4 * expect_cell ** 2 + legacy._HOG_EPS ** 2)
        got = vec.reshape(2, 2, 9)
        assert got[0, 0, 0] == pytest.approx(expect_cell / norm)
        assert got[1, 1, 0] == pytest.approx(expect_cell / norm)
        assert got[:, :, 1:].sum() == pytest.approx(0.0, abs=1e-12)

    def test_rotation_sensitivity(self):
        rng = np.random.default_rng(8)
        arr = rng.integers(0, 256, (64, 64), dtype=np.uint8)
        # diagonal stripes make orientation content directional
        yy, xx = np.mgrid[0:64, 0:64]
        arr = ((np.sin((xx + 2 * yy) / 3.0) + 1) * 120).astype(np.uint8)
        a = compute_hog(gray(arr))
        b = compute_hog(gray(np.rot90(arr).copy()))
        assert cosine_similarity(a, b) < 0.9

    def test_intensity_shift_invariance(self):
        rng = np.random.default_rng(9)
        arr = rng.integers(40, 160, (32, 32), dtype=np.uint8)
        a = compute_hog(gray(arr))
        b = compute_hog(gray(arr + 40))  # no saturation: max 199
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_too_small(self):
        with pytest.raises(ImageTooSmall):
            compute_hog(gray(np.zeros((8, 8))))

    def test_rgb_rejected(self):
        with pytest.raises(ValueError):
            compute_hog(Image(np.zeros((32, 32, 3), dtype=np.uint8)))


class TestCosine:
    def test_self_similarity(self):
        v = np.array([1.0, 2.0, 3.0])
        assert cosine_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_similarity([1, 0], [0, 1]) == pytest.approx(0.0)

    def test_hand_value(self):
        # 32 / (sqrt(14) * sqrt(77))
        assert cosine_similarity([1, 2, 3], [4, 5, 6]) == pytest.approx(
            0.974632, abs=1e-6)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine_similarity([0, 0], [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cosine_similarity([1], [1, 2])


class TestCentroidNaming:
    def test_exact_centroid(self):
        cents = ColorCentroids.default()
        for name, value in zip(cents.names, cents.values):
            assert color_name_centroid(value, cents) == name

    def test_black_anchor(self):
        assert color_name_centroid((0, 0, 0), ColorCentroids.default()) == "black"

    def test_tie_breaks_to_list_order(self):
        cents = ColorCentroids(("first", "second"),
                               np.array([[0, 0, 0], [0, 0, 100]]))
        assert color_name_centroid((0, 0, 50), cents) == "first"

    def test_from_csv(self, tmp_path):
        path = tmp_path / "cents.csv"
        path.write_text("name,r,g,b\nred,255,0,0\nblue,0,0,255\n")
        cents = ColorCentroids.from_file(path)
        assert cents.names == ("red", "blue")
        assert color_name_centroid((250, 10, 10), cents) == "red"


class TestColorHistogram:
    def test_solid_red(self):
        img = Image(np.zeros((4, 4, 3), dtype=np.uint8) + [255, 0, 0])
        hist = color_histogram(img, CentroidNamer())
        names = CentroidNamer().names
        assert hist[names.index("red")] == 1.0
        assert hist.sum() == pytest.approx(1.0, abs=1e-9)

    def test_half_red_half_blue(self):
        arr = np.zeros((2, 2, 3), dtype=np.uint8)
        arr[:, 0] = (255, 0, 0)
        arr[:, 1] = (0, 0, 255)
        hist = color_histogram(Image(arr), CentroidNamer())
        names = CentroidNamer().names
        assert hist[names.index("red")] == 0.5
        assert hist[names.index("blue")] == 0.5

    def test_fuzzy_namer_15_colors(self):
        img = Image(np.zeros((4, 4, 3), dtype=np.uint8) + [255, 0, 0])
        namer = FuzzyNamer()
        hist = color_histogram(img, namer)
        assert len(hist) == 15
        assert hist[namer.names.index("red")] == 1.0

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    @settings(max_examples=30, deadline=None)
    def test_histogram_sums_to_one(self, r, g, b):
        arr = np.zeros((3, 5, 3), dtype=np.uint8) + [r, g, b]
        hist = color_histogram(Image(arr), CentroidNamer())
        assert hist.sum() == pytest.approx(1.0, abs=1e-9)


class TestSp3:
    def test_solid_color_all_cells_identical(self):
        img = Image(np.zeros((8, 8, 3), dtype=np.uint8) + [0, 0, 255])
        cells = sp3(img, CentroidNamer())
        assert cells.shape == (21, 11)
        assert np.allclose(cells, cells[0])

    def test_left_red_right_blue(self):
        arr = np.zeros((8, 8, 3), dtype=np.uint8)
        arr[:, :4] = (255, 0, 0)
        arr[:, 4:] = (0, 0, 255)
        namer = CentroidNamer()
        cells = sp3(Image(arr), namer)
        ri = namer.names.index("red")
        bi = namer.names.index("blue")
        assert cells[0, ri] == 0.5 and cells[0, bi] == 0.5
        # quadrant order is row-major: cells 1 and 3 are the left half
        assert cells[1, ri] == 1.0
        assert cells[3, ri] == 1.0
        assert cells[2, bi] == 1.0

    def test_cell_count_is_21(self, white_rgb):
        assert sp3(white_rgb, CentroidNamer()).shape[0] == 21

    def test_odd_split_leading_region_gets_extra(self):
        # 5 columns: left quadrant takes 3, right takes 2
        arr = np.zeros((4, 5, 3), dtype=np.uint8)
        arr[:, :3] = (255, 0, 0)
        arr[:, 3:] = (0, 0, 255)
        namer = CentroidNamer()
        cells = sp3(Image(arr), namer)
        assert cells[1, namer.names.index("red")] == 1.0
        assert cells[2, namer.names.index("blue")] == 1.0

    def test_quadrants_recombine_to_whole(self):
        rng = np.random.default_rng(11)
        arr = rng.integers(0, 256, (12, 16, 3), dtype=np.uint8)
        namer = CentroidNamer()
        cells = sp3(Image(arr), namer)
        weights = []
        ys = [0, 6, 12]
        xs = [0, 8, 16]
        for i in range(2):
            for j in range(2):
                weights.append((ys[i + 1] - ys[i]) * (xs[j + 1] - xs[j]))
        weights = np.array(weights, dtype=np.float64)
        recombined = (cells[1:5] * weights[:, None]).sum(axis=0) / weights.sum()
        np.testing.assert_allclose(recombined, cells[0], atol=1e-9)

    def test_too_small(self):
        with pytest.raises(ImageTooSmall):
            sp3(Image(np.zeros((2, 2, 3), dtype=np.uint8)), CentroidNamer())


class TestClassifySimilarity:
    def test_exact_source_ranks_first(self):
        rng = np.random.default_rng(12)
        sources = [(i, rng.random(20)) for i in range(4)]
        ranked = classify_similarity(sources[2][1], sources)
        assert ranked[0][0] == 2
        assert ranked[0][1] == pytest.approx(1.0)

    def test_orthogonal_two_class(self):
        ranked = classify_similarity(
            np.array([1.0, 0.0]), [(0, np.array([1.0, 0.0])),
                                   (1, np.array([0.0, 1.0]))])
        assert [c for c, _ in ranked] == [0, 1]
        assert ranked[0][1] == pytest.approx(1.0)
        assert ranked[1][1] == pytest.approx(0.0)

    def test_scale_invariance_of_ranking(self):
        rng = np.random.default_rng(13)
        sources = [(i, rng.random(10)) for i in range(5)]
        sample = rng.random(10)
        r1 = [c for c, _ in classify_similarity(sample, sources)]
        r2 = [c for c, _ in classify_similarity(37.0 * sample, sources)]
        assert r1 == r2

    def test_combine_blocks_weight(self):
        hog = np.ones(4)
        color = np.ones(6)
        vec = combine_blocks(hog, color, color_weight=2.0)
        assert vec.shape == (10,)
        assert np.all(vec[4:] == 2.0)

    def test_zero_vector_propagates(self):
        with pytest.raises(ZeroVector):
            classify_similarity(np.zeros(3), [(0, np.ones(3))])
