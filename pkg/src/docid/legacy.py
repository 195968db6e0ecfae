"""Comparable baseline classifiers: HOG, color-name histograms, SP3.

These are the earlier strategies kept alongside the keypoint/text fusion
pipeline: a HOG descriptor classified by cosine similarity, optionally
concatenated with color-name distribution vectors (centroid or fuzzy
naming) and their three-level spatial pyramid (SP3).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import ImageTooSmall, SchemaError, ZeroVector
from .fuzzy import color_names as fuzzy_color_names, detect_colors
from .imaging import GRAY, Image, rgb_to_hsv_array

HOG_CELL = 8
HOG_BINS = 9
HOG_BLOCK = 2
_HOG_EPS = 1e-6

SP3_CELLS = 21


def compute_hog(img: Image, cell: int = HOG_CELL, bins: int = HOG_BINS,
                block: int = HOG_BLOCK) -> np.ndarray:
    """Histogram-of-oriented-gradients vector (Dalal-Triggs defaults).

    Unsigned orientations in 9 bins per 8x8 cell, 2x2-cell blocks with
    stride one cell, L2 block normalization. Trailing pixels beyond the
    last full cell are ignored.
    """
    if img.channels != GRAY:
        raise ValueError("compute_hog expects a grayscale image")
    g = img.data.astype(np.float64)
    h, w = g.shape
    n_cy, n_cx = h // cell, w // cell
    if n_cy < block or n_cx < block:
        raise ImageTooSmall(f"{w}x{h} too small for {block}x{block} blocks of {cell}px cells")
    g = g[:n_cy * cell, :n_cx * cell]

    dy = np.empty_like(g)
    dx = np.empty_like(g)
    dy[1:-1, :] = (g[2:, :] - g[:-2, :]) / 2.0
    dy[0, :] = g[1, :] - g[0, :]
    dy[-1, :] = g[-1, :] - g[-2, :]
    dx[:, 1:-1] = (g[:, 2:] - g[:, :-2]) / 2.0
    dx[:, 0] = g[:, 1] - g[:, 0]
    dx[:, -1] = g[:, -1] - g[:, -2]

    mag = np.sqrt(dx * dx + dy * dy)
    theta = np.arctan2(dy, dx) % np.pi  # unsigned
    t = theta / (np.pi / bins)  # bin centers at i * 20 degrees
    i0 = np.floor(t).astype(np.int64)
    frac = t - i0
    i0 %= bins
    i1 = (i0 + 1) % bins

    cy = np.arange(n_cy * cell) // cell
    cx = np.arange(n_cx * cell) // cell
    cell_idx = cy[:, None] * n_cx + cx[None, :]
    hist = np.zeros(n_cy * n_cx * bins)
    np.add.at(hist, (cell_idx * bins + i0).ravel(), (mag * (1.0 - frac)).ravel())
    np.add.at(hist, (cell_idx * bins + i1).ravel(), (mag * frac).ravel())
    hist = hist.reshape(n_cy, n_cx, bins)

    out = []
    for by in range(n_cy - block + 1):
        for bx in range(n_cx - block + 1):
            v = hist[by:by + block, bx:bx + block, :].ravel()
            out.append(v / np.sqrt(v @ v + _HOG_EPS ** 2))
    return np.concatenate(out)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|); raises ZeroVector on a zero operand."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    na = np.sqrt(a @ a)
    nb = np.sqrt(b @ b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float((a @ b) / (na * nb))


# -- color naming --------------------------------------------------------------

DEFAULT_CENTROIDS = (
    ("black", (0, 0, 0)),
    ("white", (255, 255, 255)),
    ("blue", (0, 0, 255)),
    ("yellow", (255, 255, 0)),
    ("brown", (150, 75, 0)),
    ("gray", (128, 128, 128)),
    ("orange", (255, 165, 0)),
    ("green", (0, 128, 0)),
    ("pink", (255, 192, 203)),
    ("red", (255, 0, 0)),
    ("purple", (128, 0, 128)),
)


@dataclass(frozen=True)
class ColorCentroids:
    """Named RGB anchors for nearest-centroid color naming."""

    names: tuple
    values: np.ndarray  # (n, 3) int64

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        if len(self.names) != len(set(self.names)):
            raise SchemaError("duplicate centroid names")
        if vals.ndim != 2 or vals.shape[1] != 3 or vals.shape[0] != len(self.names):
            raise SchemaError("centroid table must be (n, 3) RGB")
        if vals.min() < 0 or vals.max() > 255:
            raise SchemaError("centroid values must be 8-bit RGB")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", vals)

    @classmethod
    def default(cls) -> "ColorCentroids":
        names = tuple(n for n, _ in DEFAULT_CENTROIDS)
        vals = np.array([v for _, v in DEFAULT_CENTROIDS])
        return cls(names, vals)

    @classmethod
    def from_file(cls, path) -> "ColorCentroids":
        """Load a centroid table from JSON ([{name, r, g, b}, ...]) or CSV."""
        text = open(path, "r", encoding="utf-8").read()
        rows = []
        if str(path).endswith(".json"):
            for e in json.loads(text):
                rows.append((e["name"], (e["r"], e["g"], e["b"])))
        else:
            for rec in csv.DictReader(text.splitlines()):
                rows.append((rec["name"], (int(rec["r"]), int(rec["g"]), int(rec["b"]))))
        if not rows:
            raise SchemaError(f"empty centroid table: {path}")
        return cls(tuple(n for n, _ in rows), np.array([v for _, v in rows]))


def color_name_centroid(px, centroids: ColorCentroids) -> str:
    """Nearest centroid by Euclidean RGB distance; ties go to list order."""
    d = centroids.values - np.asarray(px, dtype=np.int64)
    return centroids.names[int(np.argmin((d * d).sum(axis=1)))]


class CentroidNamer:
    """Vectorized nearest-centroid namer for (n, 3) uint8 RGB rows."""

    def __init__(self, centroids: ColorCentroids | None = None):
        self.centroids = centroids or ColorCentroids.default()
        self.names = list(self.centroids.names)

    def __call__(self, rgb_rows: np.ndarray) -> np.ndarray:
        px = np.asarray(rgb_rows, dtype=np.int64)
        d = px[:, None, :] - self.centroids.values[None, :, :]
        return np.argmin((d * d).sum(axis=2), axis=1)


class FuzzyNamer:
    """Vectorized fuzzy color namer (15 names); unique colors are inferred once."""

    def __init__(self, system=None):
        self.system = system
        self.names = fuzzy_color_names(system)

    def __call__(self, rgb_rows: np.ndarray) -> np.ndarray:
        px = np.asarray(rgb_rows, dtype=np.uint8)
        uniq, inverse = np.unique(px.reshape(-1, 3), axis=0, return_inverse=True)
        hsv = rgb_to_hsv_array(uniq)
        idx = detect_colors(hsv, self.system)
        return idx[inverse]


def color_histogram(img: Image, namer) -> np.ndarray:
    """Distribution of the image's pixels over the namer's color names."""
    rows = img.data.reshape(-1, 3) if img.channels != GRAY else \
        np.repeat(img.data.reshape(-1, 1), 3, axis=1)
    idx = namer(rows)
    counts = np.bincount(idx, minlength=len(namer.names)).astype(np.float64)
    return counts / counts.sum()


def _split_bounds(n: int, k: int) -> list:
    # leading regions take the extra pixels: bounds rounded up
    return [int(np.ceil(i * n / k)) for i in range(k + 1)]


def sp3(img: Image, namer) -> np.ndarray:
    """Three-level spatial pyramid of color histograms: 1 + 4 + 16 = 21 cells.

    Row-major region order per level; odd dimensions give the extra pixel
    to the top/left region. Returns an array of shape (21, n_colors).
    """
    if img.width < 4 or img.height < 4:
        raise ImageTooSmall("sp3 needs at least 4x4 pixels")
    rows = img.data.reshape(-1, 3) if img.channels != GRAY else \
        np.repeat(img.data.reshape(-1, 1), 3, axis=1)
    idx = namer(rows).reshape(img.height, img.width)
    n_colors = len(namer.names)

    def hist(region):
        counts = np.bincount(region.ravel(), minlength=n_colors).astype(np.float64)
        return counts / counts.sum()

    cells = [hist(idx)]
    for k in (2, 4):
        ys = _split_bounds(img.height, k)
        xs = _split_bounds(img.width, k)
        for i in range(k):
            for j in range(k):
                cells.append(hist(idx[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]))
    return np.stack(cells)


def combine_blocks(hog_vec: np.ndarray | None, color_vec: np.ndarray | None,
                   color_weight: float = 1.0) -> np.ndarray:
    """Concatenate the HOG block with a (flattened) color block.

    The color block weight is a config knob; 1.0 reproduces the plain
    concatenation described for the baseline approach.
    """
    parts = []
    if hog_vec is not None:
        parts.append(np.asarray(hog_vec, dtype=np.float64).ravel())
    if color_vec is not None:
        parts.append(color_weight * np.asarray(color_vec, dtype=np.float64).ravel())
    if not parts:
        raise ValueError("need at least one feature block")
    return np.concatenate(parts)


def classify_similarity(sample_vec: np.ndarray, source_vecs) -> list:
    """Rank classes by cosine similarity to the sample vector.

    source_vecs is a sequence of (class_id, vector); the result is sorted
    by descending similarity with ties keeping class order.
    """
    ranked = []
    for class_id, vec in source_vecs:
        ranked.append((class_id, cosine_similarity(sample_vec, vec)))
    ranked.sort(key=lambda cv: -cv[1])
    return ranked
