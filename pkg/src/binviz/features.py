"""Image descriptors: HOG and Haralick texture features.

Both extractors run on a single gray plane; color canvases are reduced via
the standard luma weights first. Frozen extractor defaults (the techniques
themselves don't pin parameters): HOG uses 9 unsigned orientation bins,
8-pixel cells, 2x2-cell blocks with L2 clipping at 0.2; Haralick uses 13
statistics on 16-level symmetric normalized co-occurrence matrices at the
four distance-1 offsets, mean-aggregated.
"""

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from binviz import _kernels

EPS = 1e-12

GLCM_OFFSETS = {
    0: (0, 1),
    45: (-1, 1),
    90: (-1, 0),
    135: (-1, -1),
}


@dataclass(frozen=True)
class FeatureVector:
    name: str
    values: np.ndarray

    @property
    def dims(self):
        return int(self.values.shape[0])


@dataclass(frozen=True)
class GLCM:
    levels: int
    matrix: np.ndarray
    offset: tuple


@dataclass(frozen=True)
class HogConfig:
    orientations: int = 9
    cell: int = 8
    block: int = 2

    def validate(self, side):
        if self.orientations < 1:
            raise ValueError("orientations must be >= 1")
        if side % self.cell != 0:
            raise ValueError(f"side {side} not divisible by cell {self.cell}")
        if self.block > side // self.cell:
            raise ValueError("block larger than the cell grid")


def luma(canvas):
    """Rec.601 luma plane of an RGB canvas, rounded half-up."""
    c = np.asarray(canvas, dtype=np.float64)
    gray = 0.299 * c[:, :, 0] + 0.587 * c[:, :, 1] + 0.114 * c[:, :, 2]
    return np.floor(gray + 0.5).astype(np.uint8)


def gradients(gray):
    """Central-difference gradients (one-sided at borders), float64.

    gx points along columns (+x right), gy along rows (+y down).
    """
    g = np.asarray(gray, dtype=np.float64)
    gx = np.empty_like(g)
    gx[:, 1:-1] = g[:, 2:] - g[:, :-2]
    gx[:, 0] = g[:, 1] - g[:, 0]
    gx[:, -1] = g[:, -1] - g[:, -2]
    gy = np.empty_like(g)
    gy[1:-1, :] = g[2:, :] - g[:-2, :]
    gy[0, :] = g[1, :] - g[0, :]
    gy[-1, :] = g[-1, :] - g[-2, :]
    return gx, gy


def hog(gray, cfg=HogConfig()):
    """Histogram of oriented gradients descriptor.

    Unsigned orientations in [0, 180); votes interpolate linearly between
    the two nearest bin centers (centers at i * 180/orientations degrees,
    wrapping). Blocks are L2-normalized, clipped at 0.2, renormalized, and
    concatenated row-major. Default dims: (224/8 - 1)^2 * 4 * 9 = 26,244.
    """
    gray = np.asarray(gray)
    side_r, side_c = gray.shape
    cfg.validate(side_r)
    if side_c % cfg.cell != 0:
        raise ValueError(f"width {side_c} not divisible by cell {cfg.cell}")
    gx, gy = gradients(gray)
    mag = np.hypot(gx, gy)
    ang = np.mod(np.arctan2(gy, gx), np.pi)

    nbins = cfg.orientations
    pos = ang * (nbins / np.pi)
    lo = np.floor(pos).astype(np.int64)
    frac = pos - lo
    lo %= nbins
    hi = (lo + 1) % nbins

    ny, nx = side_r // cfg.cell, side_c // cfg.cell
    rows, cols = np.indices(gray.shape)
    cell_idx = (rows // cfg.cell) * nx + (cols // cfg.cell)
    base = cell_idx * nbins
    n_hist = ny * nx * nbins
    hist = np.bincount(
        (base + lo).ravel(), weights=(mag * (1.0 - frac)).ravel(), minlength=n_hist
    )
    hist += np.bincount(
        (base + hi).ravel(), weights=(mag * frac).ravel(), minlength=n_hist
    )
    cells = hist.reshape(ny, nx, nbins)

    b = cfg.block
    windows = np.lib.stride_tricks.sliding_window_view(cells, (b, b), axis=(0, 1))
    # (by, bx, bins, b, b) -> (by, bx, b, b, bins): cells row-major, bins last
    blocks = np.ascontiguousarray(windows.transpose(0, 1, 3, 4, 2))
    blocks = blocks.reshape(ny - b + 1, nx - b + 1, b * b * nbins)
    norm = np.sqrt((blocks**2).sum(axis=2, keepdims=True) + EPS**2)
    blocks = np.minimum(blocks / norm, 0.2)
    norm = np.sqrt((blocks**2).sum(axis=2, keepdims=True) + EPS**2)
    blocks = blocks / norm
    return FeatureVector(name="hog", values=blocks.ravel())


def glcm(gray, offset, levels=16):
    """Symmetric normalized gray-level co-occurrence matrix.

    Gray values are quantized to ``levels`` bins by v * levels // 256.
    """
    if levels not in (16, 256):
        raise ValueError(f"levels must be 16 or 256, got {levels}")
    if tuple(offset) not in GLCM_OFFSETS.values():
        raise ValueError(f"offset must be one of {sorted(GLCM_OFFSETS.values())}")
    q = (np.asarray(gray, dtype=np.int64) * levels) // 256
    counts = _kernels.glcm_counts(q, offset[0], offset[1], levels)
    sym = counts + counts.T
    total = sym.sum()
    return GLCM(levels=levels, matrix=sym / total, offset=tuple(offset))


def _haralick_stats(p):
    """The 13 classical texture statistics of one normalized GLCM."""
    g = p.shape[0]
    i = np.arange(g, dtype=np.float64)
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = (i * px).sum()
    mu_y = (i * py).sum()
    sig_x = np.sqrt(((i - mu_x) ** 2 * px).sum())
    sig_y = np.sqrt(((i - mu_y) ** 2 * py).sum())

    ii, jj = np.meshgrid(i, i, indexing="ij")
    p_sum = np.bincount((ii + jj).astype(np.int64).ravel(), weights=p.ravel(),
                        minlength=2 * g - 1)
    p_diff = np.bincount(np.abs(ii - jj).astype(np.int64).ravel(), weights=p.ravel(),
                         minlength=g)

    def ent(v):
        nz = v[v > 0]
        return -(nz * np.log2(nz)).sum()

    asm = (p**2).sum()
    k_diff = np.arange(g, dtype=np.float64)
    contrast = (k_diff**2 * p_diff).sum()
    correlation = ((ii * jj * p).sum() - mu_x * mu_y) / max(sig_x * sig_y, EPS)
    variance = ((i - mu_x) ** 2 * px).sum()
    idm = (p / (1.0 + (ii - jj) ** 2)).sum()
    k_sum = np.arange(2 * g - 1, dtype=np.float64)
    sum_avg = (k_sum * p_sum).sum()
    sum_var = ((k_sum - sum_avg) ** 2 * p_sum).sum()
    sum_ent = ent(p_sum)
    entropy = ent(p)
    diff_mean = (k_diff * p_diff).sum()
    diff_var = ((k_diff - diff_mean) ** 2 * p_diff).sum()
    diff_ent = ent(p_diff)
    hx, hy = ent(px), ent(py)
    pxy = np.outer(px, py)
    nz = pxy > 0
    log_pxy = np.zeros_like(pxy)
    log_pxy[nz] = np.log2(pxy[nz])
    hxy1 = -(p[nz] * log_pxy[nz]).sum()
    hxy2 = -(pxy[nz] * log_pxy[nz]).sum()
    imc1 = (entropy - hxy1) / max(hx, hy, EPS)
    imc2 = np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * (hxy2 - entropy))))

    return np.array([
        asm, contrast, correlation, variance, idm, sum_avg, sum_var,
        sum_ent, entropy, diff_var, diff_ent, imc1, imc2,
    ])


def haralick(gray, levels=16, aggregate="mean"):
    """13 Haralick statistics over the four distance-1 offsets.

    ``aggregate="mean"`` (default) averages the directions into 13 dims;
    ``"concat"`` keeps all four for 52 dims, ordered 0/45/90/135 degrees.
    """
    per_dir = [
        _haralick_stats(glcm(gray, GLCM_OFFSETS[a], levels).matrix)
        for a in (0, 45, 90, 135)
    ]
    if aggregate == "mean":
        values = np.mean(per_dir, axis=0)
    elif aggregate == "concat":
        values = np.concatenate(per_dir)
    else:
        raise ValueError(f"unknown aggregate: {aggregate}")
    return FeatureVector(name="haralick", values=values)


def featurize(canvas, kind, technique="", hog_cfg=HogConfig(), haralick_levels=16,
              haralick_aggregate="mean", per_channel=False):
    """Extract a named descriptor from a canvas (luma plane by default).

    ``per_channel=True`` extracts from each RGB channel and concatenates
    instead of reducing to luma (non-default, kept for ablations).
    """
    canvas = np.asarray(canvas)
    if kind == "hog":
        extract = lambda plane: hog(plane, hog_cfg).values
    elif kind == "haralick":
        extract = lambda plane: haralick(plane, haralick_levels, haralick_aggregate).values
    else:
        raise ValueError(f"unknown feature kind: {kind}")
    if per_channel:
        values = np.concatenate([extract(canvas[:, :, c]) for c in range(3)])
    else:
        values = extract(luma(canvas))
    name = f"{technique}:{kind}" if technique else kind
    return FeatureVector(name=name, values=values)


def write_feature_csv(path, ids, families, partitions, rows):
    """Feature matrix export: ``id,family,partition,f0,f1,...`` rows.

    ``rows`` may be a matrix or any iterable of per-sample vectors; rows are
    streamed to disk as they arrive, so high-dimensional exports (HOG over a
    large corpus) never materialize in memory.
    """
    it = iter(rows)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("no feature rows to write") from None
    written = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["id", "family", "partition"] + [f"f{i}" for i in range(len(first))]
        )
        for sid, fam, part, row in zip(ids, families, partitions,
                                       itertools.chain([first], it)):
            writer.writerow([sid, fam, part] + [repr(float(v)) for v in row])
            written += 1
    if written != len(ids):
        raise ValueError(f"wrote {written} rows for {len(ids)} samples")


def read_feature_csv(path):
    ids, families, partitions, rows = [], [], [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_feat = len(header) - 3
        for row in reader:
            ids.append(row[0])
            families.append(row[1])
            partitions.append(row[2])
            rows.append([float(v) for v in row[3:]])
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(ids), n_feat)
    return ids, families, partitions, matrix
