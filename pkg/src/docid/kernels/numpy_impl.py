"""Pure-numpy implementations of the hot inner loops.

This is the fallback path used when numba is unavailable or disabled via
DOCID_DISABLE_NUMBA=1. The numba path in numba_impl.py must agree with
these functions (equivalence is covered by tests and the benchmark).

Shared conventions:
  * images are float64 2-D arrays, row-major, y down;
  * gradients are dx = g[y, x+1] - g[y, x-1], dy = g[y-1, x] - g[y+1, x]
    (dy positive upward), angles from atan2(dy, dx);
  * fractional bins are rounded with floor(v + 0.5) so the two backends
    cannot disagree on ties.
"""

import numpy as np

BACKEND_NAME = "numpy"

ORI_BINS = 36
DESC_WIDTH = 4
DESC_BINS = 8


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps, radius 4*sigma."""
    radius = max(1, int(4.0 * sigma + 0.5))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable convolution with symmetric (edge-repeating) padding."""
    r = len(kernel) // 2
    padded = np.pad(img, ((0, 0), (r, r)), mode="symmetric")
    win = np.lib.stride_tricks.sliding_window_view(padded, len(kernel), axis=1)
    out = win @ kernel
    padded = np.pad(out, ((r, r), (0, 0)), mode="symmetric")
    win = np.lib.stride_tricks.sliding_window_view(padded, len(kernel), axis=0)
    return np.ascontiguousarray(win @ kernel)


def resize_bilinear(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample with half-pixel centers and edge clamping.

    Identity sizes reproduce the input exactly; exact 2x downscale equals
    the 2x2 block mean.
    """
    in_h, in_w = src.shape
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    ty = sy - y0
    tx = sx - x0
    y0c = np.clip(y0, 0, in_h - 1)
    y1c = np.clip(y0 + 1, 0, in_h - 1)
    x0c = np.clip(x0, 0, in_w - 1)
    x1c = np.clip(x0 + 1, 0, in_w - 1)
    p00 = src[np.ix_(y0c, x0c)]
    p01 = src[np.ix_(y0c, x1c)]
    p10 = src[np.ix_(y1c, x0c)]
    p11 = src[np.ix_(y1c, x1c)]
    tx = tx[None, :]
    ty = ty[:, None]
    return (1.0 - ty) * ((1.0 - tx) * p00 + tx * p01) + ty * ((1.0 - tx) * p10 + tx * p11)


def extrema_mask(dog: np.ndarray, threshold: float, border: int) -> np.ndarray:
    """Boolean mask of 26-neighborhood extrema in a DoG octave stack.

    dog has shape (levels, h, w); candidates must exceed the contrast
    threshold in magnitude and be >= (or <=) every neighbor. The first and
    last level and a y/x border are excluded.
    """
    s, h, w = dog.shape
    mask = np.zeros(dog.shape, dtype=np.bool_)
    if s < 3 or h < 3 or w < 3:
        return mask
    center = dog[1:-1, 1:-1, 1:-1]
    is_max = np.abs(center) > threshold
    is_min = is_max.copy()
    for ds in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if ds == 0 and dy == 0 and dx == 0:
                    continue
                nb = dog[1 + ds:s - 1 + ds, 1 + dy:h - 1 + dy, 1 + dx:w - 1 + dx]
                is_max &= center >= nb
                is_min &= center <= nb
    mask[1:-1, 1:-1, 1:-1] = is_max | is_min
    b = max(border, 1)
    mask[:, :b, :] = False
    mask[:, max(h - b, 0):, :] = False
    mask[:, :, :b] = False
    mask[:, :, max(w - b, 0):] = False
    return mask


def orientation_histogram(g: np.ndarray, cx: int, cy: int, radius: int,
                          weight_factor: float) -> np.ndarray:
    """Gaussian-weighted 36-bin gradient orientation histogram around a point."""
    h, w = g.shape
    hist = np.zeros(ORI_BINS, dtype=np.float64)
    y0 = max(cy - radius, 1)
    y1 = min(cy + radius, h - 2)
    x0 = max(cx - radius, 1)
    x1 = min(cx + radius, w - 2)
    if y1 < y0 or x1 < x0:
        return hist
    dx = g[y0:y1 + 1, x0 + 1:x1 + 2] - g[y0:y1 + 1, x0 - 1:x1]
    dy = g[y0 - 1:y1, x0:x1 + 1] - g[y0 + 1:y1 + 2, x0:x1 + 1]
    mag = np.sqrt(dx * dx + dy * dy)
    ang = np.rad2deg(np.arctan2(dy, dx))
    wy = (np.arange(y0, y1 + 1) - cy) ** 2
    wx = (np.arange(x0, x1 + 1) - cx) ** 2
    weight = np.exp(weight_factor * (wy[:, None] + wx[None, :]))
    bins = np.floor(ang * (ORI_BINS / 360.0) + 0.5).astype(np.int64) % ORI_BINS
    np.add.at(hist, bins.ravel(), (weight * mag).ravel())
    return hist


def descriptor_histogram(g: np.ndarray, px: int, py: int, cos_t: float,
                         sin_t: float, theta_deg: float, hist_width: float,
                         radius: int) -> np.ndarray:
    """Unnormalized 128-vector: 4x4 spatial x 8 orientation trilinear bins.

    Gradient samples around (px, py) are rotated into the keypoint frame
    (theta counterclockwise) and accumulated with Gaussian weighting.
    """
    h, w = g.shape
    tensor = np.zeros((DESC_WIDTH + 2, DESC_WIDTH + 2, DESC_BINS), dtype=np.float64)
    offs = np.arange(-radius, radius + 1, dtype=np.float64)
    rows, cols = np.meshgrid(offs, offs, indexing="ij")
    row_rot = cols * sin_t + rows * cos_t
    col_rot = cols * cos_t - rows * sin_t
    row_bin = row_rot / hist_width + 0.5 * DESC_WIDTH - 0.5
    col_bin = col_rot / hist_width + 0.5 * DESC_WIDTH - 0.5
    offs_i = np.arange(-radius, radius + 1, dtype=np.int64)
    yy, xx = np.meshgrid(py + offs_i, px + offs_i, indexing="ij")
    valid = ((row_bin > -1.0) & (row_bin < DESC_WIDTH)
             & (col_bin > -1.0) & (col_bin < DESC_WIDTH)
             & (yy > 0) & (yy < h - 1) & (xx > 0) & (xx < w - 1))
    if not valid.any():
        return tensor[1:-1, 1:-1, :].ravel().copy()
    rb = row_bin[valid]
    cb = col_bin[valid]
    ys = yy[valid]
    xs = xx[valid]
    dx = g[ys, xs + 1] - g[ys, xs - 1]
    dy = g[ys - 1, xs] - g[ys + 1, xs]
    mag = np.sqrt(dx * dx + dy * dy)
    ang = np.rad2deg(np.arctan2(dy, dx)) % 360.0
    weight_mult = -0.5 / ((0.5 * DESC_WIDTH) ** 2)
    wgt = np.exp(weight_mult * ((row_rot[valid] / hist_width) ** 2
                                + (col_rot[valid] / hist_width) ** 2))
    mag = mag * wgt
    ob = (ang - theta_deg) * (DESC_BINS / 360.0)

    rf = np.floor(rb)
    cf = np.floor(cb)
    of = np.floor(ob)
    dr = rb - rf
    dc = cb - cf
    do = ob - of
    oi = of.astype(np.int64) % DESC_BINS
    ri = rf.astype(np.int64) + 1
    ci = cf.astype(np.int64) + 1

    c1 = mag * dr
    c0 = mag * (1.0 - dr)
    c11 = c1 * dc
    c10 = c1 * (1.0 - dc)
    c01 = c0 * dc
    c00 = c0 * (1.0 - dc)
    flat = tensor.ravel()
    stride_r = (DESC_WIDTH + 2) * DESC_BINS
    base = ri * stride_r + ci * DESC_BINS
    base_r1 = (ri + 1) * stride_r + ci * DESC_BINS
    oi1 = (oi + 1) % DESC_BINS
    np.add.at(flat, base + oi, c00 * (1.0 - do))
    np.add.at(flat, base + oi1, c00 * do)
    np.add.at(flat, base + DESC_BINS + oi, c01 * (1.0 - do))
    np.add.at(flat, base + DESC_BINS + oi1, c01 * do)
    np.add.at(flat, base_r1 + oi, c10 * (1.0 - do))
    np.add.at(flat, base_r1 + oi1, c10 * do)
    np.add.at(flat, base_r1 + DESC_BINS + oi, c11 * (1.0 - do))
    np.add.at(flat, base_r1 + DESC_BINS + oi1, c11 * do)
    return tensor[1:-1, 1:-1, :].ravel().copy()


def match_count(sample: np.ndarray, source: np.ndarray, ratio: float) -> int:
    """Lowe-ratio match count: sample descriptors against source descriptors.

    A sample row is accepted when d1^2 < ratio^2 * d2^2 over its nearest and
    second-nearest source rows. A single-descriptor source accepts every
    nearest match (the ratio test is vacuous).
    """
    n = sample.shape[0]
    m = source.shape[0]
    if n == 0 or m == 0:
        return 0
    if m == 1:
        return n
    d2 = ((sample * sample).sum(axis=1)[:, None]
          + (source * source).sum(axis=1)[None, :]
          - 2.0 * (sample @ source.T))
    np.maximum(d2, 0.0, out=d2)
    two = np.partition(d2, 1, axis=1)[:, :2]
    d1 = two[:, 0]
    dsec = two[:, 1]
    return int(np.count_nonzero(d1 < ratio * ratio * dsec))
