"""Brute-force descriptor matching with the Lowe ratio test."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .features import FeatureSet

RATIO_TEST = 0.75


def match_brute_force(sample: FeatureSet, source: FeatureSet,
                      ratio: float = RATIO_TEST) -> int:
    """Accepted-match count from sample descriptors into source descriptors.

    Every sample descriptor is compared against all source descriptors by
    Euclidean distance; the nearest is accepted iff nearest/second-nearest
    < ratio. Several sample descriptors may match one source descriptor.
    The direction matters: this is sample -> source.
    """
    if len(sample) == 0 or len(source) == 0:
        return 0
    return int(kernels.match_count(
        np.asarray(sample.descriptors), np.asarray(source.descriptors),
        float(ratio)))


def score_against_classes(sample: FeatureSet, sources,
                          ratio: float = RATIO_TEST) -> np.ndarray:
    """Raw per-class match counts, in the order the sources are given."""
    return np.array([match_brute_force(sample, src, ratio) for src in sources],
                    dtype=np.int64)
