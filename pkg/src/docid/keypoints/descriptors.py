"""128-d keypoint descriptors: rotated, Gaussian-weighted gradient bins."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .features import DESC_LEN, FeatureSet
from .scale_space import GaussianPyramid

DESC_SCALE_FACTOR = 3.0
DESC_CLIP = 0.2
_NORM_FLOOR = 1e-12


def compute_descriptors(pyr: GaussianPyramid, keypoints,
                        source_class=None) -> FeatureSet:
    """One descriptor per keypoint: 4x4 spatial x 8 orientation bins.

    Gradients are rotated into the keypoint frame, trilinearly binned,
    clipped at 0.2 of the norm and renormalized to unit length. A
    zero-gradient neighborhood yields an all-zero descriptor (the norm
    contract is waived for that degenerate case).
    """
    descs = np.zeros((len(keypoints), DESC_LEN))
    for n, kp in enumerate(keypoints):
        g = pyr.octaves[kp.octave][kp.level]
        hist_width = DESC_SCALE_FACTOR * kp.scale_oct
        radius = int(np.floor(hist_width * np.sqrt(2) * (4 + 1) * 0.5 + 0.5))
        diag = int(np.sqrt(g.shape[0] ** 2 + g.shape[1] ** 2))
        radius = min(radius, diag)
        theta_deg = np.rad2deg(kp.orientation)
        raw = kernels.descriptor_histogram(
            g, kp.x_oct, kp.y_oct,
            float(np.cos(kp.orientation)), float(np.sin(kp.orientation)),
            float(theta_deg), float(hist_width), radius)
        norm = np.sqrt(raw @ raw)
        if norm <= _NORM_FLOOR:
            continue  # degenerate flat patch: all-zero descriptor
        clipped = np.minimum(raw, DESC_CLIP * norm)
        norm2 = np.sqrt(clipped @ clipped)
        descs[n] = clipped / max(norm2, _NORM_FLOOR)
    return FeatureSet(tuple(keypoints), descs, source_class)
