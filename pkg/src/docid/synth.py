"""Synthetic identity-card corpus generator.

Renders card images (solid background, colored banner, keyword text as
bitmap glyph blocks, per-class geometric artwork) plus the files the
pipeline consumes: a class manifest with keyword metadata, a labels CSV
and an OCR fixture mapping image content hashes to the words that remain
readable after degradation. Deterministic under a fixed seed.

The default class set deliberately reproduces the hard cases of the
problem domain: sibling classes sharing state words, a visually
near-duplicate pair differing only in banner words, and spotlight
occlusions that knock out text or artwork regions.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError
from .imaging import Image, resize, rotate, save_image
from .textmatch import (
    TIER_SUBCLASS_MUTUAL,
    TIER_TYPE_MUTUAL,
    TIER_UNIQUE,
    content_hash,
)

SOURCE_W = 850
SOURCE_H = 540

_GLYPHS = {
    "A": ("01110", "10001", "10001", "11111", "10001", "10001", "10001"),
    "B": ("11110", "10001", "10001", "11110", "10001", "10001", "11110"),
    "C": ("01110", "10001", "10000", "10000", "10000", "10001", "01110"),
    "D": ("11100", "10010", "10001", "10001", "10001", "10010", "11100"),
    "E": ("11111", "10000", "10000", "11110", "10000", "10000", "11111"),
    "F": ("11111", "10000", "10000", "11110", "10000", "10000", "10000"),
    "G": ("01110", "10001", "10000", "10111", "10001", "10001", "01111"),
    "H": ("10001", "10001", "10001", "11111", "10001", "10001", "10001"),
    "I": ("01110", "00100", "00100", "00100", "00100", "00100", "01110"),
    "J": ("00111", "00010", "00010", "00010", "00010", "10010", "01100"),
    "K": ("10001", "10010", "10100", "11000", "10100", "10010", "10001"),
    "L": ("10000", "10000", "10000", "10000", "10000", "10000", "11111"),
    "M": ("10001", "11011", "10101", "10101", "10001", "10001", "10001"),
    "N": ("10001", "10001", "11001", "10101", "10011", "10001", "10001"),
    "O": ("01110", "10001", "10001", "10001", "10001", "10001", "01110"),
    "P": ("11110", "10001", "10001", "11110", "10000", "10000", "10000"),
    "Q": ("01110", "10001", "10001", "10001", "10101", "10010", "01101"),
    "R": ("11110", "10001", "10001", "11110", "10100", "10010", "10001"),
    "S": ("01111", "10000", "10000", "01110", "00001", "00001", "11110"),
    "T": ("11111", "00100", "00100", "00100", "00100", "00100", "00100"),
    "U": ("10001", "10001", "10001", "10001", "10001", "10001", "01110"),
    "V": ("10001", "10001", "10001", "10001", "10001", "01010", "00100"),
    "W": ("10001", "10001", "10001", "10101", "10101", "11011", "10001"),
    "X": ("10001", "10001", "01010", "00100", "01010", "10001", "10001"),
    "Y": ("10001", "10001", "01010", "00100", "00100", "00100", "00100"),
    "Z": ("11111", "00001", "00010", "00100", "01000", "10000", "11111"),
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
}

GLYPH_W = 5
GLYPH_H = 7


@dataclass(frozen=True)
class CardSpec:
    """One synthetic class: colors, words and artwork layout."""

    class_id: int
    name: str
    background: tuple
    banner_color: tuple
    banner_words: tuple   # type words, drawn in the top banner
    state_words: tuple    # shared-within-pair words, drawn mid-card
    bottom_words: tuple   # unique words, drawn near the bottom edge
    pattern_seed: int = 0

    @property
    def keywords(self) -> list:
        """(word, tier) pairs; defines the class's text metadata."""
        out = []
        for w in self.banner_words:
            tier = TIER_SUBCLASS_MUTUAL if w in ("HEAVY", "VEHICLE") else TIER_UNIQUE
            out.append((w, tier))
        out.extend((w, TIER_TYPE_MUTUAL) for w in self.state_words)
        out.extend((w, TIER_UNIQUE) for w in self.bottom_words)
        return out


@dataclass
class JitterSpec:
    """Per-sample degradation ranges (all jitter off by default)."""

    rotation: tuple = (0.0, 0.0)
    scale: tuple = (1.0, 1.0)
    noise_sigma: float = 0.0
    spot_banner: bool = False    # spotlight over the banner + bottom words
    spot_pattern: bool = False   # spotlight over the artwork area


def default_specs() -> list:
    """Ten classes: four sibling state pairs, one single, one near-dup pair.

    Classes 8 and 9 share artwork and colors and differ only in their
    banner words (the heavy-vehicle trap); every class carries one unique
    bottom word so partial text keeps classes separable.
    """
    return [
        CardSpec(0, "nsw_full", (52, 86, 158), (222, 184, 60),
                 ("FULL", "LICENCE"), ("NEW", "SOUTH", "WALES"), ("WARATAH",), 10),
        CardSpec(1, "nsw_learner", (38, 128, 128), (200, 200, 210),
                 ("LEARNER", "PERMIT"), ("NEW", "SOUTH", "WALES"), ("HARBOUR",), 11),
        CardSpec(2, "vic_full", (40, 110, 60), (230, 230, 120),
                 ("VICROADS", "DRIVER"), ("VICTORIA", "AUSTRALIA"), ("EUREKA",), 12),
        CardSpec(3, "vic_probationary", (96, 108, 40), (240, 160, 90),
                 ("PROBATIONARY", "PLATE"), ("VICTORIA", "AUSTRALIA"), ("PENGUIN",), 13),
        CardSpec(4, "sa_full", (128, 40, 52), (235, 210, 120),
                 ("DRIVERS", "LICENCE"), ("SOUTH", "AUSTRALIA"), ("OPAL",), 14),
        CardSpec(5, "sa_provisional", (96, 52, 130), (170, 220, 170),
                 ("PROVISIONAL", "PERMIT"), ("SOUTH", "AUSTRALIA"), ("BAROSSA",), 15),
        CardSpec(6, "wa_full", (165, 96, 36), (120, 170, 220),
                 ("DRIVER", "LICENCE", "WA"), ("WESTERN", "AUSTRALIA"), ("QUOKKA",), 16),
        CardSpec(7, "medicare", (28, 122, 96), (235, 205, 80),
                 ("MEDICARE", "CARD"), ("HEALTH", "AUSTRALIA"), ("IBIS",), 17),
        CardSpec(8, "qld_full", (150, 38, 60), (220, 220, 220),
                 ("QUEENSLAND", "DRIVER", "LICENCE"), ("SUNSHINE", "STATE"),
                 ("REEF",), 18),
        CardSpec(9, "qld_heavy", (150, 38, 60), (220, 220, 220),
                 ("QUEENSLAND", "HEAVY", "VEHICLE", "LICENCE"), ("SUNSHINE", "STATE"),
                 ("REEF",), 18),
    ]


def _draw_word(arr: np.ndarray, word: str, x: int, y: int, scale: int,
               color) -> tuple:
    """Draw one word; returns its bounding box (x0, y0, x1, y1)."""
    cx = x
    for ch in word:
        glyph = _GLYPHS.get(ch)
        if glyph is not None:
            for gy, row in enumerate(glyph):
                for gx, bit in enumerate(row):
                    if bit == "1":
                        y0 = y + gy * scale
                        x0 = cx + gx * scale
                        arr[y0:y0 + scale, x0:x0 + scale] = color
        cx += (GLYPH_W + 1) * scale
    return (x, y, cx - scale, y + GLYPH_H * scale)


def _draw_line(arr, words, x, y, scale, color):
    boxes = []
    cx = x
    for w in words:
        box = _draw_word(arr, w, cx, y, scale, color)
        boxes.append((w, box))
        cx = box[2] + 2 * (GLYPH_W + 1)
    return boxes


def render_source(spec: CardSpec):
    """Card at source resolution; returns (Image, [(word, bbox), ...])."""
    arr = np.empty((SOURCE_H, SOURCE_W, 3), dtype=np.uint8)
    arr[:, :] = spec.background

    # banner with the type words
    arr[24:120, 24:SOURCE_W - 24] = spec.banner_color
    text_color = tuple(int(c) for c in np.where(
        np.mean(spec.banner_color) > 127, (20, 20, 20), (240, 240, 240)))
    boxes = _draw_line(arr, spec.banner_words, 48, 48, 4, text_color)

    # mid line with the state words, bottom line with the unique words
    mid_color = (235, 235, 235) if np.mean(spec.background) < 127 else (25, 25, 25)
    boxes += _draw_line(arr, spec.state_words, 48, 150, 3, mid_color)
    boxes += _draw_line(arr, spec.bottom_words, 48, 470, 3, mid_color)

    # deterministic per-class artwork: rectangles, circles, a photo box
    r = np.random.default_rng(spec.pattern_seed)
    yy, xx = np.mgrid[0:SOURCE_H, 0:SOURCE_W]
    for _ in range(22):
        x, y = int(r.integers(40, SOURCE_W - 120)), int(r.integers(210, 420))
        w, h = int(r.integers(24, 90)), int(r.integers(18, 70))
        arr[y:y + h, x:x + w] = r.integers(0, 256, 3)
    for _ in range(12):
        cx, cy = int(r.integers(60, SOURCE_W - 60)), int(r.integers(220, 430))
        rad = int(r.integers(12, 34))
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 < rad * rad
        arr[mask] = r.integers(0, 256, 3)
    # photo placeholder: dark frame, light interior
    arr[200:440, SOURCE_W - 220:SOURCE_W - 40] = (40, 40, 46)
    arr[212:428, SOURCE_W - 208:SOURCE_W - 52] = (210, 205, 196)
    return Image(arr), boxes


def _apply_spots(arr: np.ndarray, spots) -> np.ndarray:
    """Soft white spotlights; returns the coverage alpha map."""
    out = arr.astype(np.float64)
    h, w = arr.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    alpha_total = np.zeros((h, w))
    for cx, cy, rad in spots:
        d = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
        alpha = np.clip(1.0 - d / rad, 0.0, 1.0) ** 0.5
        alpha_total = np.maximum(alpha_total, alpha)
    out = out * (1.0 - alpha_total[..., None]) + 255.0 * alpha_total[..., None]
    arr[:] = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return alpha_total


def _visible_words(boxes, alpha) -> list:
    """Words whose box is less than half covered by strong spotlight."""
    visible = []
    for word, (x0, y0, x1, y1) in boxes:
        patch = alpha[y0:y1, x0:x1]
        covered = float((patch > 0.5).mean()) if patch.size else 0.0
        if covered < 0.5:
            visible.append(word)
    return visible


def render_sample(spec: CardSpec, jitter: JitterSpec, rng: np.random.Generator):
    """One degraded capture of a card; returns (Image, visible words)."""
    img, boxes = render_source(spec)
    arr = np.array(img.data)

    spots = []
    if jitter.spot_banner:
        # one spot over the banner words, one over the bottom words
        spots.append((int(rng.uniform(200, 650)), int(rng.uniform(50, 95)),
                      int(rng.uniform(260, 340))))
        spots.append((int(rng.uniform(100, 400)), 490, int(rng.uniform(140, 200))))
    if jitter.spot_pattern:
        spots.append((int(rng.uniform(250, 600)), int(rng.uniform(250, 400)),
                      int(rng.uniform(120, 200))))
    if spots:
        alpha = _apply_spots(arr, spots)
        visible = _visible_words(boxes, alpha)
    else:
        visible = [w for w, _ in boxes]

    out = Image(arr)
    degrees = rng.uniform(*jitter.rotation)
    if degrees != 0.0:
        out = rotate(out, float(degrees), fill=(34, 34, 38))
    factor = rng.uniform(*jitter.scale)
    if factor != 1.0:
        out = resize(out, max(16, int(round(out.width * factor))),
                     max(16, int(round(out.height * factor))))
    if jitter.noise_sigma > 0.0:
        noisy = out.data.astype(np.float64) + rng.normal(
            0.0, jitter.noise_sigma, out.data.shape)
        out = Image(np.clip(np.floor(noisy + 0.5), 0, 255).astype(np.uint8))
    return out, visible


# -- corpus assembly -------------------------------------------------------------

CLEAN_JITTER = JitterSpec(rotation=(-4.0, 4.0), scale=(0.92, 1.05))


def degraded_jitter(spec: CardSpec, sample_idx: int) -> JitterSpec:
    """Degradation schedule for the fusion-superiority corpus.

    The near-duplicate pair (8, 9) keeps its banner readable and takes
    noise plus artwork spotlights, confusing the visual side while text
    separates it. Other classes alternate between text damage (banner and
    bottom spotlights) and visual damage (noise plus artwork spotlight).
    """
    if spec.class_id >= 8:
        return JitterSpec(rotation=(-8.0, 8.0), scale=(0.85, 1.05),
                          noise_sigma=10.0, spot_pattern=True)
    if sample_idx % 2 == 0:
        return JitterSpec(rotation=(-8.0, 8.0), scale=(0.85, 1.05),
                          noise_sigma=4.0, spot_banner=True)
    return JitterSpec(rotation=(-8.0, 8.0), scale=(0.85, 1.05),
                      noise_sigma=9.0, spot_pattern=True)


def gen_corpus(out_dir, specs=None, samples_per_class: int = 5, seed: int = 7,
               kind: str = "clean") -> dict:
    """Render a labeled corpus; returns a summary dict.

    kind: "clean" (mild geometric jitter only), "degraded" (spotlights and
    noise per the degradation schedule) or "invariance" (per class: one
    zero-jitter sample, one rotated 15 degrees, one scaled 0.7x).

    Writes sources/, samples/, manifest.json, labels.csv and
    ocr_fixture.json under out_dir; byte-identical for identical seeds.
    """
    if kind not in ("clean", "degraded", "invariance"):
        raise ValueError(f"unknown corpus kind {kind!r}")
    specs = list(specs) if specs is not None else default_specs()
    out_dir = Path(out_dir)
    try:
        (out_dir / "sources").mkdir(parents=True, exist_ok=True)
        (out_dir / "samples").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create corpus directory {out_dir}") from exc

    rng = np.random.default_rng(seed)
    fixture = {}
    labels = []

    manifest = {"classes": []}
    for spec in specs:
        src, boxes = render_source(spec)
        src_rel = f"sources/class_{spec.class_id:02d}.png"
        save_image(src, out_dir / src_rel)
        fixture[content_hash(src)] = " ".join(w for w, _ in boxes)
        manifest["classes"].append({
            "id": spec.class_id,
            "name": spec.name,
            "source": src_rel,
            "keywords": [{"word": w, "tier": t} for w, t in spec.keywords],
        })

    n = 0
    for spec in specs:
        if kind == "invariance":
            plan = [JitterSpec(), JitterSpec(rotation=(15.0, 15.0)),
                    JitterSpec(scale=(0.7, 0.7))]
        elif kind == "degraded":
            plan = [degraded_jitter(spec, i) for i in range(samples_per_class)]
        else:
            plan = [CLEAN_JITTER for _ in range(samples_per_class)]
        for jitter in plan:
            img, visible = render_sample(spec, jitter, rng)
            rel = f"samples/sample_{n:04d}.png"
            save_image(img, out_dir / rel)
            fixture[content_hash(img)] = " ".join(visible)
            labels.append((rel, spec.class_id))
            n += 1

    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "ocr_fixture.json", "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "class_id"])
        writer.writerows(labels)
    return {"classes": len(specs), "samples": n, "kind": kind,
            "dir": str(out_dir)}
