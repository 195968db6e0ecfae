"""HSV color naming built on the Mamdani engine.

The shipped rule base (data/color_rules.json) partitions normalized hue,
saturation and value with trapezoids, maps them through 54 rules onto 15
triangle output terms, and names a pixel by the output term apex nearest
to the defuzzified value. The file also carries per-color sampling regions
used by validation tests; swap the JSON to substitute a different system.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import numpy as np

from ..errors import UnknownColor
from ..imaging import HsvPixel
from . import engine

_CHUNK = 2048


def _data_text() -> str:
    return resources.files("docid.fuzzy").joinpath("data/color_rules.json").read_text()


@lru_cache(maxsize=1)
def default_system() -> engine.MamdaniSystem:
    return engine.system_from_dict(json.loads(_data_text()))


@lru_cache(maxsize=1)
def color_regions() -> dict:
    """Per-color (h, s, v) sampling ranges declared by the rule base."""
    return json.loads(_data_text())["regions"]


def color_names(sys: engine.MamdaniSystem | None = None) -> list:
    sys = sys or default_system()
    return [name for name, _ in sys.output.terms]


def _apexes(sys: engine.MamdaniSystem) -> np.ndarray:
    return np.array([mf.apex for _, mf in sys.output.terms])


def detect_color(hsv: HsvPixel, sys: engine.MamdaniSystem | None = None) -> str:
    """Name one HSV pixel; raises UnknownColor if no rule fires."""
    sys = sys or default_system()
    values = np.array([[hsv.hue / 360.0, hsv.saturation / 100.0, hsv.value / 100.0]])
    try:
        crisp = engine.infer(sys, values[0])
    except engine.NoRuleFired as exc:
        raise UnknownColor(f"no rule fired for {hsv}") from exc
    names = color_names(sys)
    return names[int(np.argmin(np.abs(_apexes(sys) - crisp)))]


def detect_colors(hsv: np.ndarray, sys: engine.MamdaniSystem | None = None) -> np.ndarray:
    """Vectorized naming: (n, 3) HSV rows in native units -> term index array.

    Raises UnknownColor if any row fires no rule.
    """
    sys = sys or default_system()
    hsv = np.asarray(hsv, dtype=np.float64)
    norm = hsv / np.array([360.0, 100.0, 100.0])
    apexes = _apexes(sys)
    out = np.empty(norm.shape[0], dtype=np.int64)
    for start in range(0, norm.shape[0], _CHUNK):
        chunk = norm[start:start + _CHUNK]
        levels = engine.aggregate_levels(sys, engine.firing_strengths(sys, chunk))
        crisp = engine.centroids(sys, levels)
        bad = np.isnan(crisp)
        if bad.any():
            raise UnknownColor(f"{int(bad.sum())} pixels fired no rule")
        out[start:start + _CHUNK] = np.argmin(
            np.abs(crisp[:, None] - apexes[None, :]), axis=1)
    return out


def max_firing_strength(hsv: np.ndarray, sys: engine.MamdaniSystem | None = None) -> np.ndarray:
    """Strongest rule activation per (n, 3) HSV row, native units.

    A row maps to UnknownColor exactly when this is zero (every consequent
    term has positive area), which makes lattice coverage checks cheap.
    """
    sys = sys or default_system()
    hsv = np.asarray(hsv, dtype=np.float64)
    norm = hsv / np.array([360.0, 100.0, 100.0])
    out = np.empty(norm.shape[0], dtype=np.float64)
    for start in range(0, norm.shape[0], _CHUNK):
        chunk = norm[start:start + _CHUNK]
        out[start:start + _CHUNK] = engine.firing_strengths(sys, chunk).max(axis=1)
    return out
