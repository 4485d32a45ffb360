"""Shared fixtures: in-memory samples and on-disk synthetic corpora."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from binviz import BUFFER_LEN
from binviz.corpus import RawSample

FAMILY_LOW = ("low", (0, 80))
FAMILY_MID = ("mid", (80, 176))
FAMILY_HIGH = ("high", (176, 256))


def make_sample(data, sample_id="s0", family="fam", source_path="mem"):
    """RawSample from raw bytes, applying the truncate/pad rule."""
    data = np.asarray(bytearray(data), dtype=np.uint8)
    buf = np.zeros(BUFFER_LEN, dtype=np.uint8)
    n = min(data.size, BUFFER_LEN)
    buf[:n] = data[:n]
    return RawSample(id=sample_id, family=family, original_len=int(data.size),
                     bytes=buf, source_path=source_path)


def random_sample(rng, min_len=64, max_len=2 * BUFFER_LEN, sample_id="s0"):
    n = int(rng.integers(min_len, max_len))
    return make_sample(rng.integers(0, 256, n, dtype=np.uint8).tobytes(),
                       sample_id=sample_id)


def synth_family_bytes(rng, family_range, n_bytes):
    """Bytes biased into one value band: a clean distribution signature."""
    lo, hi = family_range
    main = rng.integers(lo, hi, n_bytes, dtype=np.uint8)
    noise_at = rng.random(n_bytes) < 0.05
    main[noise_at] = rng.integers(0, 256, int(noise_at.sum()), dtype=np.uint8)
    return main.tobytes()


def build_corpus(root, families, per_family, seed=7, min_len=4000, max_len=70000):
    """Write a labeled synthetic corpus tree; returns the root path."""
    rng = np.random.default_rng(seed)
    root = Path(root)
    for name, band in families:
        fdir = root / name
        fdir.mkdir(parents=True, exist_ok=True)
        for i in range(per_family):
            n = int(rng.integers(min_len, max_len))
            (fdir / f"{name}{i:04d}.bin").write_bytes(
                synth_family_bytes(rng, band, n)
            )
    return root


@pytest.fixture
def tiny_corpus(tmp_path):
    """Three families x 6 small files."""
    return build_corpus(tmp_path / "corpus",
                        [FAMILY_LOW, FAMILY_MID, FAMILY_HIGH],
                        per_family=6, min_len=600, max_len=3000)
