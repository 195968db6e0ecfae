"""Keypoint/descriptor containers and the enrollment feature cache."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import IoError, SchemaError

CACHE_SCHEMA = 1
DESC_LEN = 128


@dataclass(frozen=True)
class Keypoint:
    """Detected scale-space extremum in original-image coordinates.

    x, y are pixels at the input scale; scale is the absolute Gaussian
    sigma; orientation is radians in [0, 2pi); response is the refined DoG
    magnitude. octave/level/x_oct/y_oct/scale_oct locate the keypoint in
    the pyramid for descriptor sampling.
    """

    x: float
    y: float
    scale: float
    orientation: float
    response: float
    octave: int = 0
    level: int = 1
    x_oct: int = 0
    y_oct: int = 0
    scale_oct: float = 1.6


@dataclass(frozen=True)
class FeatureSet:
    """Parallel keypoints and 128-d descriptors for one image."""

    keypoints: tuple
    descriptors: np.ndarray  # (n, 128) float64
    source_class: Optional[int] = None

    def __post_init__(self):
        desc = np.asarray(self.descriptors, dtype=np.float64).reshape(-1, DESC_LEN)
        if len(self.keypoints) != desc.shape[0]:
            raise ValueError("keypoints and descriptors must have equal length")
        desc.flags.writeable = False
        object.__setattr__(self, "keypoints", tuple(self.keypoints))
        object.__setattr__(self, "descriptors", desc)

    def __len__(self) -> int:
        return len(self.keypoints)

    @classmethod
    def empty(cls, source_class: Optional[int] = None) -> "FeatureSet":
        return cls((), np.zeros((0, DESC_LEN)), source_class)


def save_features(fs: FeatureSet, path) -> None:
    """Write a versioned binary cache (.npz) of one FeatureSet."""
    kp = np.array([[k.x, k.y, k.scale, k.orientation, k.response]
                   for k in fs.keypoints], dtype=np.float64).reshape(-1, 5)
    class_id = -1 if fs.source_class is None else int(fs.source_class)
    np.savez(path, schema=np.int64(CACHE_SCHEMA), class_id=np.int64(class_id),
             keypoints=kp, descriptors=np.asarray(fs.descriptors))


def load_features(path) -> FeatureSet:
    try:
        with np.load(path) as data:
            try:
                schema = int(data["schema"])
                class_id = int(data["class_id"])
                kp = data["keypoints"]
                desc = data["descriptors"]
            except KeyError as exc:
                raise SchemaError(f"feature cache missing field {exc}: {path}") from exc
    except FileNotFoundError as exc:
        raise IoError(f"feature cache not found: {path}") from exc
    except (OSError, ValueError) as exc:
        raise SchemaError(f"unreadable feature cache: {path}") from exc
    if schema != CACHE_SCHEMA:
        raise SchemaError(f"unsupported feature cache schema {schema}: {path}")
    kps = tuple(Keypoint(x=float(r[0]), y=float(r[1]), scale=float(r[2]),
                         orientation=float(r[3]), response=float(r[4]))
                for r in kp)
    return FeatureSet(kps, desc, None if class_id < 0 else class_id)
