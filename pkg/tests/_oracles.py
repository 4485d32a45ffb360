"""Independent reference implementations used as test oracles.

Everything here is deliberately written the slow, literal way (explicit
loops, textbook formulas) and shares no code with the package internals.
"""

import math
from collections import Counter

import numpy as np


def hilbert_recursive(order):
    """Hilbert curve cells by recursive quadrant composition.

    Matches the frozen orientation (start (0,0), end (0, side-1)) without
    any bit manipulation.
    """
    if order == 0:
        return [(0, 0)]
    prev = hilbert_recursive(order - 1)
    s = 1 << (order - 1)
    out = []
    for r, c in prev:  # lower-left quadrant: transpose
        out.append((c, r))
    for r, c in prev:  # upper-left: shift down a row block
        out.append((r + s, c))
    for r, c in prev:  # upper-right
        out.append((r + s, c + s))
    for r, c in prev:  # lower-right: anti-transpose
        out.append((s - 1 - c, 2 * s - 1 - r))
    return out


def window_entropy(block):
    """Shannon entropy of a byte block, in bits."""
    n = len(block)
    h = 0.0
    for count in Counter(block).values():
        p = count / n
        h -= p * math.log2(p)
    return h


def entropy_series_naive(buf):
    """Per-position normalized entropy with explicit window slicing."""
    buf = bytes(buf)
    n = len(buf)
    return [min(max(window_entropy(buf[i : i + 256]) / 8.0, 0.0), 1.0)
            for i in range(n)]


def bigram_counts_naive(data):
    data = bytes(data)
    acc = np.zeros((256, 256), dtype=np.int64)
    for x, y in zip(data, data[1:]):
        acc[y, x] += 1
    return acc


def glcm_naive(gray, offset, levels):
    """Symmetric normalized co-occurrence matrix with explicit loops."""
    gray = np.asarray(gray)
    h, w = gray.shape
    dr, dc = offset
    mat = np.zeros((levels, levels), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                a = int(gray[r, c]) * levels // 256
                b = int(gray[r2, c2]) * levels // 256
                mat[a, b] += 1
                mat[b, a] += 1
    return mat / mat.sum()


def haralick_13_naive(p):
    """The 13 texture statistics from a normalized GLCM, loop by loop."""
    g = p.shape[0]
    eps = 1e-12
    px = [sum(p[i, j] for j in range(g)) for i in range(g)]
    py = [sum(p[i, j] for i in range(g)) for j in range(g)]
    mu_x = sum(i * px[i] for i in range(g))
    mu_y = sum(j * py[j] for j in range(g))
    sig_x = math.sqrt(sum((i - mu_x) ** 2 * px[i] for i in range(g)))
    sig_y = math.sqrt(sum((j - mu_y) ** 2 * py[j] for j in range(g)))

    p_sum = [0.0] * (2 * g - 1)
    p_diff = [0.0] * g
    for i in range(g):
        for j in range(g):
            p_sum[i + j] += p[i, j]
            p_diff[abs(i - j)] += p[i, j]

    def ent(values):
        return -sum(v * math.log2(v) for v in values if v > 0)

    asm = sum(p[i, j] ** 2 for i in range(g) for j in range(g))
    contrast = sum(k * k * p_diff[k] for k in range(g))
    correlation = (
        sum(i * j * p[i, j] for i in range(g) for j in range(g)) - mu_x * mu_y
    ) / max(sig_x * sig_y, eps)
    variance = sum((i - mu_x) ** 2 * px[i] for i in range(g))
    idm = sum(p[i, j] / (1 + (i - j) ** 2) for i in range(g) for j in range(g))
    sum_avg = sum(k * p_sum[k] for k in range(2 * g - 1))
    sum_var = sum((k - sum_avg) ** 2 * p_sum[k] for k in range(2 * g - 1))
    sum_ent = ent(p_sum)
    entropy = ent(p.ravel())
    diff_mean = sum(k * p_diff[k] for k in range(g))
    diff_var = sum((k - diff_mean) ** 2 * p_diff[k] for k in range(g))
    diff_ent = ent(p_diff)
    hx, hy = ent(px), ent(py)
    hxy1 = -sum(
        p[i, j] * math.log2(px[i] * py[j])
        for i in range(g) for j in range(g) if px[i] * py[j] > 0
    )
    hxy2 = -sum(
        px[i] * py[j] * math.log2(px[i] * py[j])
        for i in range(g) for j in range(g) if px[i] * py[j] > 0
    )
    imc1 = (entropy - hxy1) / max(hx, hy, eps)
    imc2 = math.sqrt(max(0.0, 1.0 - math.exp(-2.0 * (hxy2 - entropy))))
    return [asm, contrast, correlation, variance, idm, sum_avg, sum_var,
            sum_ent, entropy, diff_var, diff_ent, imc1, imc2]


def gradients_naive(gray):
    """Finite-difference gradients, one pixel at a time."""
    g = np.asarray(gray, dtype=np.float64)
    h, w = g.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            gx[r, c] = g[r, min(c + 1, w - 1)] - g[r, max(c - 1, 0)]
            gy[r, c] = g[min(r + 1, h - 1), c] - g[max(r - 1, 0), c]
    return gx, gy
