"""NumPy implementations of the hot per-sample kernels.

These are the fallback used when the compiled extension is unavailable.
Integer kernels (bigram, GLCM, Hilbert) produce bit-identical results in
both backends; ``entropy_series`` may differ from the compiled version by
floating-point summation order only (<= a few ulp).
"""

import math

import numpy as np

# c -> (c/256) * log2(c/256): the bulk-window entropy term for count c.
# Shared with the compiled backend so both read identical table values.
# Entropy is summed term-by-term (never as log2(T) - S/T) so constant
# windows of any size come out exactly 0 and full distinct windows
# exactly 8 bits.
PTERM_TABLE = np.zeros(257, dtype=np.float64)
_c = np.arange(1, 257, dtype=np.float64) / 256.0
PTERM_TABLE[1:] = _c * np.log2(_c)
del _c

_ENTROPY_CHUNK = 4096


def entropy_series(buf):
    """Normalized sliding-window Shannon entropy, one value per byte.

    The window at position i is buf[i : i+256] clipped to the buffer end.
    Returns float64 values H/8 clipped to [0, 1].
    """
    data = np.ascontiguousarray(buf, dtype=np.uint8)
    n = data.shape[0]
    out = np.empty(n, dtype=np.float64)
    if n == 0:
        return out
    full = max(n - 255, 0)  # positions whose window is the full 256 bytes
    if full > 0:
        # cum[i, v] = occurrences of byte value v in data[:i]
        onehot = np.zeros((n + 1, 256), dtype=np.int32)
        onehot[np.arange(1, n + 1), data] = 1
        cum = np.cumsum(onehot, axis=0)
        for lo in range(0, full, _ENTROPY_CHUNK):
            hi = min(lo + _ENTROPY_CHUNK, full)
            counts = cum[np.arange(lo, hi) + 256] - cum[lo:hi]
            out[lo:hi] = -PTERM_TABLE[counts].sum(axis=1)
    # tail windows shrink to the buffer end; few enough to do directly
    counts = np.bincount(data[full:], minlength=256)
    for i in range(full, n):
        t = n - i
        h = 0.0
        for v in range(256):
            c = counts[v]
            if c > 0:
                p = c / t
                h -= p * math.log2(p)
        out[i] = h
        counts[data[i]] -= 1
    out /= 8.0
    np.clip(out, 0.0, 1.0, out=out)
    return out


def bigram_counts(data):
    """256x256 counts of consecutive byte pairs: acc[second, first] += 1."""
    b = np.ascontiguousarray(data, dtype=np.uint8)
    if b.shape[0] < 2:
        raise ValueError("bigram counting needs at least 2 bytes")
    idx = b[1:].astype(np.int64) * 256 + b[:-1]
    return np.bincount(idx, minlength=65536).reshape(256, 256)


def glcm_counts(quantized, drow, dcol, levels):
    """Directed co-occurrence counts of a quantized gray plane.

    Counts pairs (q[r, c], q[r+drow, c+dcol]) over all in-bounds positions.
    No symmetrization or normalization here.
    """
    q = np.ascontiguousarray(quantized, dtype=np.int64)
    h, w = q.shape
    r0, r1 = max(0, -drow), min(h, h - drow)
    c0, c1 = max(0, -dcol), min(w, w - dcol)
    if r0 >= r1 or c0 >= c1:
        raise ValueError("plane smaller than the offset reach")
    a = q[r0:r1, c0:c1]
    b = q[r0 + drow : r1 + drow, c0 + dcol : c1 + dcol]
    idx = (a * levels + b).ravel()
    return np.bincount(idx, minlength=levels * levels).reshape(levels, levels)


def hilbert_coords(order, count):
    """(row, col) int64 arrays for Hilbert indices 0..count-1 on a 2^order grid.

    Orientation is frozen so that index 0 -> (0, 0) and the final index of
    the full curve -> (0, side-1).
    """
    side = 1 << order
    t = np.arange(count, dtype=np.int64)
    x = np.zeros(count, dtype=np.int64)
    y = np.zeros(count, dtype=np.int64)
    s = 1
    while s < side:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        flip = (ry == 0) & (rx == 1)
        x[flip] = s - 1 - x[flip]
        y[flip] = s - 1 - y[flip]
        swap = ry == 0
        xs = np.where(swap, y, x)
        y = np.where(swap, x, y)
        x = xs
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return y, x
