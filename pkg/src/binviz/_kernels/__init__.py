"""Hot-loop kernels with backend selection at import time.

The compiled extension is preferred when present; otherwise the NumPy
fallback is used. ``BINVIZ_FORCE_PURE=1`` forces the fallback (useful for
``benchmarks/bench_kernels.py`` and for debugging). ``BACKEND`` records
which one is active.
"""

import os

from binviz._kernels import pure

if os.environ.get("BINVIZ_FORCE_PURE") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from binviz._kernels import _native as _impl

        BACKEND = "native"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

entropy_series = _impl.entropy_series
bigram_counts = _impl.bigram_counts
glcm_counts = _impl.glcm_counts
hilbert_coords = _impl.hilbert_coords

__all__ = [
    "BACKEND",
    "bigram_counts",
    "entropy_series",
    "glcm_counts",
    "hilbert_coords",
]
