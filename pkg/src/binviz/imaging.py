"""The eight byte-stream to 224x224 RGB image converters.

All converters are pure functions of the sample (plus frozen conventions)
and return uint8 arrays of shape (224, 224, 3). Channel usage:

  grayscale, bigram_cart, bigram_polar, spiral   R == G == B
  byteclass, hilbert                             G only (R == B == 0)
  entropy                                        R and B only (G == 0)
  hit                                            R,B from entropy + G from hilbert

Hilbert-placed images are rasterized on a 256x256 (order-8) grid, the
smallest power-of-two grid holding the 50,176-byte buffer, then resized to
224x224. The default resize is nearest-neighbor with source index
``floor(dst * 256 / 224)`` for bit-exact reproducibility; bilinear is
available but excluded from golden comparisons.
"""

import io
import logging
import math
from pathlib import Path

import numpy as np
from PIL import Image

from binviz import BUFFER_LEN, IMAGE_SIDE, _kernels, layout

log = logging.getLogger(__name__)

TECHNIQUES = (
    "grayscale",
    "byteclass",
    "hilbert",
    "entropy",
    "hit",
    "bigram_cart",
    "bigram_polar",
    "spiral",
)

HILBERT_ORDER = 8
HILBERT_SIDE = 256

# Green intensity per byte character class: NULL, ASCII control (1-31 and
# 127), printable (32-126 and 128-254), extended (255).
BYTECLASS_GREEN = np.zeros(256, dtype=np.uint8)
BYTECLASS_GREEN[1:32] = 255
BYTECLASS_GREEN[32:127] = 32
BYTECLASS_GREEN[127] = 255
BYTECLASS_GREEN[128:255] = 32
BYTECLASS_GREEN[255] = 128

_hilbert_rc_cache = None


def _hilbert_rc():
    """(rows, cols) of the order-8 Hilbert curve for the buffer's indices."""
    global _hilbert_rc_cache
    if _hilbert_rc_cache is None:
        rows, cols = _kernels.hilbert_coords(HILBERT_ORDER, BUFFER_LEN)
        _hilbert_rc_cache = (rows, cols)
    return _hilbert_rc_cache


def _nearest_index():
    return (np.arange(IMAGE_SIDE, dtype=np.int64) * HILBERT_SIDE) // IMAGE_SIDE


def resize_plane(plane, method="nearest"):
    """Resize a 256x256 plane to 224x224."""
    if method == "nearest":
        idx = _nearest_index()
        return plane[np.ix_(idx, idx)]
    if method == "bilinear":
        scale = HILBERT_SIDE / IMAGE_SIDE
        pos = (np.arange(IMAGE_SIDE) + 0.5) * scale - 0.5
        lo = np.clip(np.floor(pos).astype(np.int64), 0, HILBERT_SIDE - 2)
        frac = pos - lo
        p = plane.astype(np.float64)
        rows = p[lo] * (1 - frac)[:, None] + p[lo + 1] * frac[:, None]
        out = rows[:, lo] * (1 - frac)[None, :] + rows[:, lo + 1] * frac[None, :]
        return np.floor(out + 0.5).astype(np.uint8)
    raise ValueError(f"unknown resize method: {method}")


def _gray_canvas(plane):
    return np.repeat(plane[:, :, None], 3, axis=2)


def _scatter_256(values):
    """Place per-index values on the 256x256 grid along the Hilbert curve."""
    rows, cols = _hilbert_rc()
    plane = np.zeros((HILBERT_SIDE, HILBERT_SIDE), dtype=np.uint8)
    plane[rows, cols] = values[:BUFFER_LEN]
    return plane


def to_grayscale(sample):
    """Row-major byte luminosity image."""
    plane = sample.bytes.reshape(IMAGE_SIDE, IMAGE_SIDE)
    return _gray_canvas(plane)


def byteclass_encode(byte):
    """(R, G, B) for one byte value per the character-class table."""
    return (0, int(BYTECLASS_GREEN[byte]), 0)


def to_byteclass(sample):
    """Row-major character-class image (green channel only)."""
    canvas = np.zeros((IMAGE_SIDE, IMAGE_SIDE, 3), dtype=np.uint8)
    canvas[:, :, 1] = BYTECLASS_GREEN[sample.bytes].reshape(IMAGE_SIDE, IMAGE_SIDE)
    return canvas


def _hilbert_green(sample):
    return resize_plane(_scatter_256(BYTECLASS_GREEN[sample.bytes]))


def to_hilbert(sample, style="byteclass"):
    """Hilbert-curve placement of the buffer, byteclass-colored by default.

    ``style="grayscale"`` places raw byte luminosity instead (ablation aid).
    """
    canvas = np.zeros((IMAGE_SIDE, IMAGE_SIDE, 3), dtype=np.uint8)
    if style == "byteclass":
        canvas[:, :, 1] = _hilbert_green(sample)
    elif style == "grayscale":
        canvas = _gray_canvas(resize_plane(_scatter_256(sample.bytes)))
    else:
        raise ValueError(f"unknown hilbert style: {style}")
    return canvas


def entropy_series(sample):
    """Sliding-window entropy (H/8, in [0,1]) at every buffer position."""
    return _kernels.entropy_series(sample.bytes)


def entropy_encode(x):
    """(R, B) encoding of one normalized entropy value."""
    if x > 0.5:
        d = (x - 0.5) - (x - 0.5) ** 2
        r = math.floor(256.0 * d**4)
    else:
        r = 0
    b = math.floor(255.0 * x * x)
    return (min(max(r, 0), 255), min(max(b, 0), 255))


def _entropy_encode_planes(x):
    d = (x - 0.5) - (x - 0.5) ** 2
    r = np.floor(256.0 * d**4)
    r[x <= 0.5] = 0.0
    b = np.floor(255.0 * x * x)
    return (
        np.clip(r, 0, 255).astype(np.uint8),
        np.clip(b, 0, 255).astype(np.uint8),
    )


def _entropy_rb(sample):
    r, b = _entropy_encode_planes(entropy_series(sample))
    return resize_plane(_scatter_256(r)), resize_plane(_scatter_256(b))


def to_entropy(sample):
    """Hilbert-placed entropy image (red/blue channels, green zero)."""
    r, b = _entropy_rb(sample)
    canvas = np.zeros((IMAGE_SIDE, IMAGE_SIDE, 3), dtype=np.uint8)
    canvas[:, :, 0] = r
    canvas[:, :, 2] = b
    return canvas


def to_hit(sample):
    """Hybrid image: entropy R/B planes merged with the byteclass G plane."""
    r, b = _entropy_rb(sample)
    canvas = np.empty((IMAGE_SIDE, IMAGE_SIDE, 3), dtype=np.uint8)
    canvas[:, :, 0] = r
    canvas[:, :, 1] = _hilbert_green(sample)
    canvas[:, :, 2] = b
    return canvas


def bigram_source(sample):
    """Bytes the bigram images are built from: the original file content.

    For samples shorter than the buffer the original bytes are the unpadded
    prefix; longer files are re-read from disk so the zero pad never
    fabricates (0,0) bigrams. Falls back to the padded buffer when the
    source is gone.
    """
    if sample.original_len <= BUFFER_LEN:
        data = sample.bytes[: sample.original_len]
    else:
        try:
            data = np.fromfile(sample.source_path, dtype=np.uint8)
        except OSError as exc:
            log.warning("bigram source unreadable (%s); using buffer", exc)
            data = sample.bytes
    if data.size < 2:
        raise ValueError(f"sample {sample.id}: need >= 2 bytes for bigrams")
    return data


def bigram_accumulator(data):
    """Pre-clamp 256x256 pair counts; acc[y, x] counts pair (x, y)."""
    return _kernels.bigram_counts(data)


def _intensity(acc224, mode):
    if mode == "saturate":
        return np.minimum(acc224, 255).astype(np.uint8)
    if mode == "log":
        cmax = acc224.max()
        scaled = 255.0 * np.log1p(acc224) / np.log1p(cmax)
        return np.floor(scaled).astype(np.uint8)
    raise ValueError(f"unknown bigram mode: {mode}")


def to_bigram_cartesian(sample, mode="saturate"):
    """Scatter of consecutive byte pairs (x, y) with count intensity."""
    counts = bigram_accumulator(bigram_source(sample))
    scale = (np.arange(256, dtype=np.int64) * IMAGE_SIDE) // 256
    flat = (scale[:, None] * IMAGE_SIDE + scale[None, :]).ravel()
    acc = np.bincount(flat, weights=counts.ravel(), minlength=IMAGE_SIDE**2)
    acc = acc.astype(np.int64).reshape(IMAGE_SIDE, IMAGE_SIDE)
    return _gray_canvas(_intensity(acc, mode))


_POLAR_MAX_RADIUS = 111.0
_POLAR_CENTER = 111.5


def _polar_targets():
    """Target (row, col) on the canvas for every (y, x) accumulator cell."""
    x = np.arange(256, dtype=np.float64)[None, :]
    y = np.arange(256, dtype=np.float64)[:, None]
    rho = (x / 255.0) * _POLAR_MAX_RADIUS
    theta = (y / 256.0) * (2.0 * np.pi)
    row = np.floor(_POLAR_CENTER - rho * np.sin(theta) + 0.5).astype(np.int64)
    col = np.floor(_POLAR_CENTER + rho * np.cos(theta) + 0.5).astype(np.int64)
    return row, col


def to_bigram_polar(sample, mode="saturate"):
    """Bigram scatter with x as radius and y as angle (counter-clockwise)."""
    counts = bigram_accumulator(bigram_source(sample))
    row, col = _polar_targets()
    flat = (row * IMAGE_SIDE + col).ravel()
    acc = np.bincount(flat, weights=counts.ravel(), minlength=IMAGE_SIDE**2)
    acc = acc.astype(np.int64).reshape(IMAGE_SIDE, IMAGE_SIDE)
    return _gray_canvas(_intensity(acc, mode))


SPIRAL_SCALE = IMAGE_SIDE // 16  # 14x block replication


def to_spiral(histogram, ranking, norms):
    """Importance-ordered histogram rendered as a center-out spiral.

    ``ranking`` orders the 256 byte-value features by descending Gini
    importance; ``norms`` is the (mins, maxs) pair from the training
    corpus. Values are min-max normalized, quantized to 0..255, and drawn
    inverted (0 -> white, 255 -> black) on a 16x16 spiral upscaled 14x.
    """
    hist = np.asarray(histogram, dtype=np.float64)
    order = np.asarray(getattr(ranking, "order", ranking))
    mins, maxs = (np.asarray(a, dtype=np.float64) for a in norms)
    if not (hist.shape == order.shape == mins.shape == maxs.shape == (256,)):
        raise ValueError("histogram, ranking, and norms must all have length 256")
    span = maxs - mins
    normed = np.where(span > 0, (hist - mins) / np.where(span > 0, span, 1.0), 0.0)
    q = np.clip(np.floor(255.0 * normed), 0, 255).astype(np.uint8)
    cells = layout.spiral16().table
    grid = np.zeros((16, 16), dtype=np.uint8)
    grid[cells[:, 0], cells[:, 1]] = 255 - q[order]
    plane = np.repeat(np.repeat(grid, SPIRAL_SCALE, axis=0), SPIRAL_SCALE, axis=1)
    return _gray_canvas(plane)


def encode_png(canvas):
    """Encode a canvas as 8-bit RGB PNG bytes (lossless, run-to-run identical)."""
    canvas = np.asarray(canvas, dtype=np.uint8)
    if canvas.shape != (IMAGE_SIDE, IMAGE_SIDE, 3):
        raise ValueError(f"canvas must be {IMAGE_SIDE}x{IMAGE_SIDE}x3, got {canvas.shape}")
    buf = io.BytesIO()
    Image.fromarray(canvas, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def write_png(canvas, path):
    """Write a canvas as an 8-bit RGB PNG file."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(encode_png(canvas))


def read_png(path):
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def convert(sample, technique, spiral_ctx=None, **options):
    """Dispatch one sample through the named technique.

    Spiral conversion needs corpus-level context: ``spiral_ctx`` must be a
    ``(histogram, ranking, norms)`` provider, called with the sample id.
    """
    if technique == "grayscale":
        return to_grayscale(sample)
    if technique == "byteclass":
        return to_byteclass(sample)
    if technique == "hilbert":
        return to_hilbert(sample, style=options.get("hilbert_style", "byteclass"))
    if technique == "entropy":
        return to_entropy(sample)
    if technique == "hit":
        return to_hit(sample)
    if technique == "bigram_cart":
        return to_bigram_cartesian(sample, mode=options.get("bigram_mode", "saturate"))
    if technique == "bigram_polar":
        return to_bigram_polar(sample, mode=options.get("bigram_mode", "saturate"))
    if technique == "spiral":
        if spiral_ctx is None:
            raise ValueError("spiral conversion needs a spiral context")
        histogram, ranking, norms = spiral_ctx(sample.id)
        return to_spiral(histogram, ranking, norms)
    raise ValueError(f"unknown technique: {technique}")
