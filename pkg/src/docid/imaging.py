"""Image decoding, resizing, cropping and color-space conversion.

Every classifier consumes the Image type defined here. Pixels are 8-bit,
row-major, either single-channel ("gray") or interleaved "rgb". Images are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image as PilImage, UnidentifiedImageError

from . import kernels
from .errors import DecodeError, IoError, OutOfBounds

GRAY = "gray"
RGB = "rgb"

# default working resolution for the classification pipeline
TARGET_WIDTH = 425
TARGET_HEIGHT = 270

_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class Image:
    """Decoded raster. data is uint8 with shape (h, w) or (h, w, 3)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.ndim == 2:
            pass
        elif arr.ndim == 3 and arr.shape[2] == 3:
            pass
        else:
            raise ValueError(f"bad image shape {arr.shape}; want (h, w) or (h, w, 3)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image dimensions must be >= 1")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> str:
        return GRAY if self.data.ndim == 2 else RGB

    @property
    def pixels(self) -> np.ndarray:
        """Row-major flat uint8 view (length w*h*channel count)."""
        return self.data.reshape(-1)

    def to_float(self) -> np.ndarray:
        """float64 copy scaled to [0, 1]."""
        return self.data.astype(np.float64) / 255.0


@dataclass(frozen=True)
class HsvPixel:
    """Hue in [0, 360), saturation and value in [0, 100]."""

    hue: float
    saturation: float
    value: float


def load_image(path) -> Image:
    """Decode a PNG or JPEG file into an RGB Image (gray inputs expanded)."""
    try:
        with PilImage.open(path) as im:
            im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise IoError(f"cannot read image: {path}") from exc
    except UnidentifiedImageError as exc:
        raise DecodeError(f"unsupported or corrupt image: {path}") from exc
    except OSError as exc:
        raise DecodeError(f"failed to decode image: {path}") from exc
    return Image(arr)


def save_image(img: Image, path) -> None:
    """Write as PNG (used by fixtures and the synthetic generator)."""
    mode = "L" if img.channels == GRAY else "RGB"
    PilImage.fromarray(np.asarray(img.data), mode=mode).save(path, format="PNG")


def resize(img: Image, w: int, h: int) -> Image:
    """Bilinear resample to exactly w x h (half-pixel centers).

    Resizing to the current size is pixel-exact; exact 2x downscale equals
    the 2x2 block mean. Fractional results round half away from zero.
    """
    if w < 1 or h < 1:
        raise ValueError("target dimensions must be >= 1")
    if w == img.width and h == img.height:
        return img
    src = img.data.astype(np.float64)
    if img.channels == GRAY:
        out = kernels.resize_bilinear(src, h, w)
        return Image(_round_u8(out))
    planes = [kernels.resize_bilinear(np.ascontiguousarray(src[:, :, c]), h, w)
              for c in range(3)]
    return Image(np.stack([_round_u8(p) for p in planes], axis=2))


def _round_u8(a: np.ndarray) -> np.ndarray:
    # all values are >= 0, so floor(x + 0.5) is round-half-away-from-zero
    return np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8)


def to_grayscale(img: Image) -> Image:
    """Luma conversion round(0.299 R + 0.587 G + 0.114 B); gray passes through."""
    if img.channels == GRAY:
        return img
    luma = img.data.astype(np.float64) @ _LUMA
    return Image(_round_u8(luma))


def crop(img: Image, x: int, y: int, w: int, h: int) -> Image:
    """Copy the w x h rectangle at (x, y); must lie fully inside the image."""
    if w < 1 or h < 1:
        raise OutOfBounds(f"degenerate crop {w}x{h}")
    if x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise OutOfBounds(
            f"crop ({x},{y},{w},{h}) exceeds image {img.width}x{img.height}")
    return Image(img.data[y:y + h, x:x + w].copy())


def rgb_to_hsv(r: int, g: int, b: int) -> HsvPixel:
    """Standard hexcone conversion; achromatic pixels get hue 0."""
    out = rgb_to_hsv_array(np.array([[r, g, b]], dtype=np.uint8))[0]
    return HsvPixel(float(out[0]), float(out[1]), float(out[2]))


def rgb_to_hsv_array(rgb: np.ndarray) -> np.ndarray:
    """Vectorized hexcone conversion.

    rgb is uint8 with trailing axis 3; returns float64 of the same shape
    with hue in [0, 360) and saturation/value in [0, 100].
    """
    arr = np.asarray(rgb, dtype=np.float64) / 255.0
    r = arr[..., 0]
    g = arr[..., 1]
    b = arr[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    hue = np.zeros_like(mx)
    nz = delta > 0
    r_max = nz & (mx == r)
    g_max = nz & (mx == g) & ~r_max
    b_max = nz & ~r_max & ~g_max
    with np.errstate(invalid="ignore", divide="ignore"):
        hue = np.where(r_max, ((g - b) / delta) % 6.0, hue)
        hue = np.where(g_max, (b - r) / delta + 2.0, hue)
        hue = np.where(b_max, (r - g) / delta + 4.0, hue)
    hue = (hue * 60.0) % 360.0
    sat = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0) * 100.0
    val = mx * 100.0
    return np.stack([hue, sat, val], axis=-1)


def rotate(img: Image, degrees: float, fill=None) -> Image:
    """Rotate counterclockwise about the image center (bilinear resample).

    Same output size; uncovered corners take `fill` (scalar or RGB tuple,
    default black). Used by the synthetic generator and invariance tests.
    """
    theta = np.deg2rad(degrees)
    c, s = np.cos(theta), np.sin(theta)
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    # inverse map: rotate output coords by -theta (y axis points down)
    dx = xs - cx
    dy = ys - cy
    sx = cx + c * dx - s * dy
    sy = cy + s * dx + c * dy
    eps = 1e-9  # right-angle rotations land exactly on the border
    inside = (sx >= -eps) & (sx <= w - 1 + eps) & (sy >= -eps) & (sy <= h - 1 + eps)
    sx = np.clip(sx, 0.0, w - 1.0)
    sy = np.clip(sy, 0.0, h - 1.0)
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    tx = sx - x0
    ty = sy - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    def sample(plane):
        p00 = plane[y0c, x0c]
        p01 = plane[y0c, x1c]
        p10 = plane[y1c, x0c]
        p11 = plane[y1c, x1c]
        val = ((1 - ty) * ((1 - tx) * p00 + tx * p01)
               + ty * ((1 - tx) * p10 + tx * p11))
        return val

    src = img.data.astype(np.float64)
    if img.channels == GRAY:
        fill_v = 0.0 if fill is None else float(fill)
        out = np.where(inside, sample(src), fill_v)
        return Image(_round_u8(out))
    fill_rgb = (0, 0, 0) if fill is None else fill
    planes = []
    for ch in range(3):
        out = np.where(inside, sample(src[:, :, ch]), float(fill_rgb[ch]))
        planes.append(_round_u8(out))
    return Image(np.stack(planes, axis=2))
