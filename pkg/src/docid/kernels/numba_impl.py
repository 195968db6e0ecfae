"""Numba-compiled implementations of the hot inner loops.

Same contracts and conventions as numpy_impl.py; the jitted loops are the
default path when numba imports cleanly and DOCID_DISABLE_NUMBA is unset.
"""

import numpy as np
from numba import njit

from .numpy_impl import DESC_BINS, DESC_WIDTH, ORI_BINS, gaussian_kernel

BACKEND_NAME = "numba"

__all__ = [
    "gaussian_kernel", "gaussian_blur", "resize_bilinear", "extrema_mask",
    "orientation_histogram", "descriptor_histogram", "match_count", "warmup",
]


@njit(cache=True, nogil=True)
def _reflect(i, n):
    # symmetric padding: ... c b a | a b c ... | c b a
    # loops so radii larger than the axis keep folding back inside
    if n == 1:
        return 0
    while i < 0 or i >= n:
        if i < 0:
            i = -i - 1
        if i >= n:
            i = 2 * n - i - 1
    return i


@njit(cache=True, nogil=True)
def gaussian_blur(img, kernel):
    h, w = img.shape
    k = kernel.shape[0]
    r = k // 2
    tmp = np.empty((h, w), dtype=np.float64)
    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for t in range(k):
                acc += img[y, _reflect(x + t - r, w)] * kernel[t]
            tmp[y, x] = acc
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for t in range(k):
                acc += tmp[_reflect(y + t - r, h), x] * kernel[t]
            out[y, x] = acc
    return out


@njit(cache=True, nogil=True)
def resize_bilinear(src, out_h, out_w):
    in_h, in_w = src.shape
    out = np.empty((out_h, out_w), dtype=np.float64)
    sy_scale = in_h / out_h
    sx_scale = in_w / out_w
    for y in range(out_h):
        sy = (y + 0.5) * sy_scale - 0.5
        y0 = int(np.floor(sy))
        ty = sy - y0
        y0c = min(max(y0, 0), in_h - 1)
        y1c = min(max(y0 + 1, 0), in_h - 1)
        for x in range(out_w):
            sx = (x + 0.5) * sx_scale - 0.5
            x0 = int(np.floor(sx))
            tx = sx - x0
            x0c = min(max(x0, 0), in_w - 1)
            x1c = min(max(x0 + 1, 0), in_w - 1)
            out[y, x] = ((1.0 - ty) * ((1.0 - tx) * src[y0c, x0c] + tx * src[y0c, x1c])
                         + ty * ((1.0 - tx) * src[y1c, x0c] + tx * src[y1c, x1c]))
    return out


@njit(cache=True, nogil=True)
def extrema_mask(dog, threshold, border):
    s, h, w = dog.shape
    mask = np.zeros((s, h, w), dtype=np.bool_)
    if s < 3 or h < 3 or w < 3:
        return mask
    b = max(border, 1)
    for lev in range(1, s - 1):
        for y in range(b, h - b):
            for x in range(b, w - b):
                v = dog[lev, y, x]
                if abs(v) <= threshold:
                    continue
                is_max = True
                is_min = True
                for ds in range(-1, 2):
                    for dy in range(-1, 2):
                        for dx in range(-1, 2):
                            if ds == 0 and dy == 0 and dx == 0:
                                continue
                            nb = dog[lev + ds, y + dy, x + dx]
                            if v < nb:
                                is_max = False
                            if v > nb:
                                is_min = False
                            if not (is_max or is_min):
                                break
                        if not (is_max or is_min):
                            break
                    if not (is_max or is_min):
                        break
                if is_max or is_min:
                    mask[lev, y, x] = True
    return mask


@njit(cache=True, nogil=True)
def orientation_histogram(g, cx, cy, radius, weight_factor):
    h, w = g.shape
    hist = np.zeros(ORI_BINS, dtype=np.float64)
    for i in range(-radius, radius + 1):
        y = cy + i
        if y < 1 or y > h - 2:
            continue
        for j in range(-radius, radius + 1):
            x = cx + j
            if x < 1 or x > w - 2:
                continue
            dx = g[y, x + 1] - g[y, x - 1]
            dy = g[y - 1, x] - g[y + 1, x]
            mag = np.sqrt(dx * dx + dy * dy)
            ang = np.rad2deg(np.arctan2(dy, dx))
            weight = np.exp(weight_factor * (i * i + j * j))
            b = int(np.floor(ang * (ORI_BINS / 360.0) + 0.5)) % ORI_BINS
            hist[b] += weight * mag
    return hist


@njit(cache=True, nogil=True)
def descriptor_histogram(g, px, py, cos_t, sin_t, theta_deg, hist_width, radius):
    h, w = g.shape
    tensor = np.zeros((DESC_WIDTH + 2, DESC_WIDTH + 2, DESC_BINS), dtype=np.float64)
    weight_mult = -0.5 / ((0.5 * DESC_WIDTH) ** 2)
    for i in range(-radius, radius + 1):
        for j in range(-radius, radius + 1):
            row_rot = j * sin_t + i * cos_t
            col_rot = j * cos_t - i * sin_t
            row_bin = row_rot / hist_width + 0.5 * DESC_WIDTH - 0.5
            col_bin = col_rot / hist_width + 0.5 * DESC_WIDTH - 0.5
            if row_bin <= -1.0 or row_bin >= DESC_WIDTH or col_bin <= -1.0 or col_bin >= DESC_WIDTH:
                continue
            y = py + i
            x = px + j
            if y <= 0 or y >= h - 1 or x <= 0 or x >= w - 1:
                continue
            dx = g[y, x + 1] - g[y, x - 1]
            dy = g[y - 1, x] - g[y + 1, x]
            mag = np.sqrt(dx * dx + dy * dy)
            ang = np.rad2deg(np.arctan2(dy, dx)) % 360.0
            wgt = np.exp(weight_mult * ((row_rot / hist_width) ** 2
                                        + (col_rot / hist_width) ** 2))
            mag = mag * wgt
            ob = (ang - theta_deg) * (DESC_BINS / 360.0)

            rf = np.floor(row_bin)
            cf = np.floor(col_bin)
            of = np.floor(ob)
            dr = row_bin - rf
            dc = col_bin - cf
            do = ob - of
            oi = int(of) % DESC_BINS
            ri = int(rf) + 1
            ci = int(cf) + 1
            oi1 = (oi + 1) % DESC_BINS

            c1 = mag * dr
            c0 = mag * (1.0 - dr)
            c11 = c1 * dc
            c10 = c1 * (1.0 - dc)
            c01 = c0 * dc
            c00 = c0 * (1.0 - dc)
            tensor[ri, ci, oi] += c00 * (1.0 - do)
            tensor[ri, ci, oi1] += c00 * do
            tensor[ri, ci + 1, oi] += c01 * (1.0 - do)
            tensor[ri, ci + 1, oi1] += c01 * do
            tensor[ri + 1, ci, oi] += c10 * (1.0 - do)
            tensor[ri + 1, ci, oi1] += c10 * do
            tensor[ri + 1, ci + 1, oi] += c11 * (1.0 - do)
            tensor[ri + 1, ci + 1, oi1] += c11 * do
    return tensor[1:-1, 1:-1, :].copy().reshape(DESC_WIDTH * DESC_WIDTH * DESC_BINS)


@njit(cache=True, nogil=True)
def match_count(sample, source, ratio):
    n = sample.shape[0]
    m = source.shape[0]
    if n == 0 or m == 0:
        return 0
    if m == 1:
        return n
    d = sample.shape[1]
    ratio2 = ratio * ratio
    count = 0
    for i in range(n):
        best = np.inf
        second = np.inf
        for j in range(m):
            acc = 0.0
            for t in range(d):
                diff = sample[i, t] - source[j, t]
                acc += diff * diff
            if acc < best:
                second = best
                best = acc
            elif acc < second:
                second = acc
        if best < ratio2 * second:
            count += 1
    return count


def warmup():
    """Trigger jit compilation of every kernel on tiny inputs."""
    img = np.arange(64, dtype=np.float64).reshape(8, 8)
    gaussian_blur(img, gaussian_kernel(1.0))
    resize_bilinear(img, 4, 4)
    extrema_mask(np.zeros((3, 8, 8)), 0.01, 1)
    orientation_histogram(img, 4, 4, 2, -0.5)
    descriptor_histogram(img, 4, 4, 1.0, 0.0, 0.0, 1.5, 3)
    match_count(np.ones((2, 4)), np.eye(4)[:3], 0.75)
