"""Gaussian scale-space pyramid and difference-of-Gaussians stacks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ImageTooSmall
from ..imaging import GRAY, Image, to_grayscale

SIGMA0 = 1.6
SCALES_PER_OCTAVE = 3
ASSUMED_BLUR = 0.5
MIN_DIMENSION = 16


@dataclass(frozen=True)
class GaussianPyramid:
    """Blurred levels per octave; each octave halves the previous one.

    octaves[o][i] is a float64 image with total blur sigmas[i] relative to
    the octave base; absolute sigma at original resolution is
    sigmas[i] * 2**o.
    """

    octaves: tuple  # of tuples of 2-D float64 arrays
    sigmas: tuple  # per-level sigma within an octave
    base_sigma: float
    scales: int

    @property
    def n_octaves(self) -> int:
        return len(self.octaves)


def octave_count(height: int, width: int) -> int:
    return max(1, int(np.floor(np.log2(min(height, width)))) - 2)


def _level_sigmas(sigma0: float, s: int) -> np.ndarray:
    k = 2.0 ** (1.0 / s)
    return sigma0 * k ** np.arange(s + 3)


def build_gaussian_pyramid(img: Image, sigma0: float = SIGMA0,
                           scales: int = SCALES_PER_OCTAVE) -> GaussianPyramid:
    """Blur stack of scales+3 levels per octave, downsampling by 2 between octaves."""
    gray = img if img.channels == GRAY else to_grayscale(img)
    if min(gray.height, gray.width) < MIN_DIMENSION:
        raise ImageTooSmall(
            f"{gray.width}x{gray.height}: need min dimension >= {MIN_DIMENSION}")
    base = gray.to_float()
    # lift the assumed capture blur up to sigma0 for the first level
    sigma_diff = np.sqrt(max(sigma0 ** 2 - ASSUMED_BLUR ** 2, 0.01))
    base = kernels.gaussian_blur(base, kernels.gaussian_kernel(sigma_diff))

    sigmas = _level_sigmas(sigma0, scales)
    increments = np.sqrt(sigmas[1:] ** 2 - sigmas[:-1] ** 2)
    n_oct = octave_count(gray.height, gray.width)

    octaves = []
    current = base
    for _ in range(n_oct):
        levels = [current]
        for inc in increments:
            levels.append(kernels.gaussian_blur(
                levels[-1], kernels.gaussian_kernel(float(inc))))
        octaves.append(tuple(levels))
        # level `scales` has blur 2*sigma0: subsample it for the next octave
        current = levels[scales][::2, ::2].copy()
        if min(current.shape) < 8:
            break
    return GaussianPyramid(tuple(octaves), tuple(float(s) for s in sigmas),
                           sigma0, scales)


def build_dog_stacks(pyr: GaussianPyramid) -> list:
    """Per octave: (scales+2, h, w) array of adjacent Gaussian differences."""
    stacks = []
    for levels in pyr.octaves:
        dog = np.stack([levels[i + 1] - levels[i] for i in range(len(levels) - 1)])
        stacks.append(dog)
    return stacks


def build_dog_pyramid(img: Image, sigma0: float = SIGMA0,
                      scales: int = SCALES_PER_OCTAVE):
    """Gaussian pyramid plus its DoG stacks (the detection front end)."""
    pyr = build_gaussian_pyramid(img, sigma0, scales)
    return pyr, build_dog_stacks(pyr)
