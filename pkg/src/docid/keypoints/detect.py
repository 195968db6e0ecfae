"""Keypoint detection: DoG extrema, subpixel refinement, orientations."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .features import Keypoint
from .scale_space import GaussianPyramid

CONTRAST_THRESHOLD = 0.03  # on [0, 1] intensities
EDGE_RATIO = 10.0
BORDER = 5
MAX_REFINE_STEPS = 5

ORI_BINS = 36
ORI_SIGMA_FACTOR = 1.5
ORI_RADIUS_FACTOR = 3.0
ORI_PEAK_RATIO = 0.8


def _gradient(cube: np.ndarray) -> np.ndarray:
    # cube is (level, y, x); derivative order (x, y, s)
    dx = 0.5 * (cube[1, 1, 2] - cube[1, 1, 0])
    dy = 0.5 * (cube[1, 2, 1] - cube[1, 0, 1])
    ds = 0.5 * (cube[2, 1, 1] - cube[0, 1, 1])
    return np.array([dx, dy, ds])


def _hessian(cube: np.ndarray) -> np.ndarray:
    c = cube[1, 1, 1]
    dxx = cube[1, 1, 2] - 2 * c + cube[1, 1, 0]
    dyy = cube[1, 2, 1] - 2 * c + cube[1, 0, 1]
    dss = cube[2, 1, 1] - 2 * c + cube[0, 1, 1]
    dxy = 0.25 * (cube[1, 2, 2] - cube[1, 2, 0] - cube[1, 0, 2] + cube[1, 0, 0])
    dxs = 0.25 * (cube[2, 1, 2] - cube[2, 1, 0] - cube[0, 1, 2] + cube[0, 1, 0])
    dys = 0.25 * (cube[2, 2, 1] - cube[2, 0, 1] - cube[0, 2, 1] + cube[0, 0, 1])
    return np.array([[dxx, dxy, dxs],
                     [dxy, dyy, dys],
                     [dxs, dys, dss]])


def _refine(dog: np.ndarray, lev: int, y: int, x: int, scales: int,
            contrast_threshold: float):
    """Quadratic subpixel fit; returns (lev, y, x, offset, value) or None."""
    n_lev, h, w = dog.shape
    for _ in range(MAX_REFINE_STEPS):
        cube = dog[lev - 1:lev + 2, y - 1:y + 2, x - 1:x + 2]
        grad = _gradient(cube)
        hess = _hessian(cube)
        try:
            offset = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            return None
        if np.all(np.abs(offset) < 0.5):
            value = cube[1, 1, 1] + 0.5 * grad @ offset
            if abs(value) * scales < contrast_threshold:
                return None
            xy = hess[:2, :2]
            tr = xy[0, 0] + xy[1, 1]
            det = xy[0, 0] * xy[1, 1] - xy[0, 1] * xy[1, 0]
            if det <= 0 or EDGE_RATIO * tr * tr >= (EDGE_RATIO + 1) ** 2 * det:
                return None
            return lev, y, x, offset, value
        x += int(np.floor(offset[0] + 0.5))
        y += int(np.floor(offset[1] + 0.5))
        lev += int(np.floor(offset[2] + 0.5))
        if (lev < 1 or lev > n_lev - 2 or y < BORDER or y >= h - BORDER
                or x < BORDER or x >= w - BORDER):
            return None
    return None


def _smooth_histogram(hist: np.ndarray) -> np.ndarray:
    out = np.empty_like(hist)
    n = len(hist)
    for i in range(n):
        out[i] = (6 * hist[i]
                  + 4 * (hist[i - 1] + hist[(i + 1) % n])
                  + hist[i - 2] + hist[(i + 2) % n]) / 16.0
    return out


def _orientations(gauss_level: np.ndarray, x_oct: int, y_oct: int,
                  scale_oct: float) -> list:
    """Dominant gradient directions; secondary peaks >= 80% spawn extras."""
    sigma = ORI_SIGMA_FACTOR * scale_oct
    radius = int(np.floor(ORI_RADIUS_FACTOR * sigma + 0.5))
    hist = kernels.orientation_histogram(
        gauss_level, x_oct, y_oct, radius, -0.5 / (sigma * sigma))
    hist = _smooth_histogram(hist)
    peak = hist.max()
    if peak <= 0.0:
        return []
    out = []
    n = len(hist)
    for i in range(n):
        left = hist[i - 1]
        right = hist[(i + 1) % n]
        if hist[i] > left and hist[i] > right and hist[i] >= ORI_PEAK_RATIO * peak:
            denom = left - 2 * hist[i] + right
            interp = i + 0.5 * (left - right) / denom if denom != 0 else float(i)
            theta = (interp % n) * (2.0 * np.pi / n)
            out.append(theta % (2.0 * np.pi))
    return out


def detect_keypoints(pyr: GaussianPyramid, dog_stacks,
                     contrast_threshold: float = CONTRAST_THRESHOLD) -> list:
    """3x3x3 extrema of every DoG stack, refined, filtered and oriented.

    Returns a (possibly empty) list of Keypoint in original-image
    coordinates; orientation peaks above 80% of the maximum duplicate the
    keypoint.
    """
    keypoints = []
    prefilter = 0.5 * contrast_threshold / pyr.scales
    for octave, dog in enumerate(dog_stacks):
        mask = kernels.extrema_mask(dog, prefilter, BORDER)
        scale_factor = float(2 ** octave)
        for lev, y, x in np.argwhere(mask):
            refined = _refine(dog, int(lev), int(y), int(x), pyr.scales,
                              contrast_threshold)
            if refined is None:
                continue
            lev_r, y_r, x_r, offset, value = refined
            scale_oct = pyr.base_sigma * 2.0 ** ((lev_r + offset[2]) / pyr.scales)
            for theta in _orientations(pyr.octaves[octave][lev_r], x_r, y_r,
                                       scale_oct):
                keypoints.append(Keypoint(
                    x=(x_r + offset[0]) * scale_factor,
                    y=(y_r + offset[1]) * scale_factor,
                    scale=scale_oct * scale_factor,
                    orientation=theta,
                    response=abs(value),
                    octave=octave,
                    level=lev_r,
                    x_oct=x_r,
                    y_oct=y_r,
                    scale_oct=scale_oct,
                ))
    return keypoints
