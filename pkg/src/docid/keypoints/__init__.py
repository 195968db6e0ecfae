"""Scale-invariant keypoint detection, description and matching."""

from ..imaging import Image
from .descriptors import compute_descriptors
from .detect import CONTRAST_THRESHOLD, detect_keypoints
from .features import FeatureSet, Keypoint, load_features, save_features
from .matching import RATIO_TEST, match_brute_force, score_against_classes
from .scale_space import (
    GaussianPyramid,
    SIGMA0,
    SCALES_PER_OCTAVE,
    build_dog_pyramid,
    build_dog_stacks,
    build_gaussian_pyramid,
    octave_count,
)


def extract_features(img: Image, source_class=None) -> FeatureSet:
    """Full front end: pyramid, DoG extrema, orientations, descriptors."""
    pyr, dog = build_dog_pyramid(img)
    kps = detect_keypoints(pyr, dog)
    return compute_descriptors(pyr, kps, source_class=source_class)


__all__ = [
    "CONTRAST_THRESHOLD", "FeatureSet", "GaussianPyramid", "Keypoint",
    "RATIO_TEST", "SCALES_PER_OCTAVE", "SIGMA0", "build_dog_pyramid",
    "build_dog_stacks", "build_gaussian_pyramid", "compute_descriptors",
    "detect_keypoints", "extract_features", "load_features",
    "match_brute_force", "octave_count", "save_features",
    "score_against_classes",
]
