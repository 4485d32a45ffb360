"""Golden checksums pinning the frozen rendering conventions.

These guard the Hilbert orientation, spiral chirality, resize rule,
rounding rules, and encode tables against silent drift. The same sums
must hold under either kernel backend.
"""

import hashlib

import numpy as np

from binviz import imaging
from conftest import make_sample

GOLDEN = {
    "grayscale": "f64169977a7bfe7917f06d653ef824c2caff81b40c6b7cd984892dbc1991d627",
    "byteclass": "4739a1bbcadf7e05feb81a1a13421f39b4f61ef1b4201a603004e1d9565fc444",
    "hilbert": "f0fe09bdbb673ed3e17270c2e5c2ca3205a36319a3e8d6dac3dd6877df5f4d0a",
    "entropy": "279aa2059e9bccedf6927ef278c4bd801808c162bc7e35285717153c73e90836",
    "hit": "a48645ff7e941931c1eb98bd01ae7b1f7c8418be6bfe9ec6bd1de050caa0f978",
    "bigram_cart": "aa028144c4a913045f4c2641b9af7489a9e80729fcb418de375aeaf83af126a3",
    "bigram_polar": "2d1770f025aa0875eb5082277e26e24fe4db043e2e438a2dc0a19802101c4e43",
    "spiral": "fc392e508d5d0cc5960e7e0f882231d7488e613f02fa2dad92b5804010dcb78c",
}


def golden_sample():
    rng = np.random.default_rng(20240809)
    return make_sample(rng.integers(0, 256, 30000, dtype=np.uint8).tobytes(),
                       sample_id="golden")


def test_golden_canvases():
    sample = golden_sample()
    spiral_ctx = lambda _id: (np.linspace(0, 1, 256),
                              np.arange(256)[::-1].copy(),
                              (np.zeros(256), np.ones(256)))
    for tech, expected in GOLDEN.items():
        canvas = imaging.convert(sample, tech, spiral_ctx=spiral_ctx)
        got = hashlib.sha256(canvas.tobytes()).hexdigest()
        assert got == expected, f"{tech} drifted from its frozen convention"
