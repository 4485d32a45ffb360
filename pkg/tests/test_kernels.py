"""Backend equivalence: the compiled kernels against the NumPy fallback,
and both against literal-loop oracles."""

import numpy as np
import pytest

import _oracles
from binviz import _kernels
from binviz._kernels import pure

try:
    from binviz._kernels import _native as native
except ImportError:
    native = None

BACKENDS = [pure] if native is None else [pure, native]


def backends():
    return pytest.mark.parametrize(
        "impl", BACKENDS, ids=[m.__name__.rsplit(".", 1)[1] for m in BACKENDS]
    )


@backends()
class TestEntropySeries:
    def test_matches_naive_windows(self, impl):
        rng = np.random.default_rng(0)
        buf = rng.integers(0, 256, 700, dtype=np.uint8)
        got = impl.entropy_series(buf)
        expected = _oracles.entropy_series_naive(buf.tobytes())
        assert np.allclose(got, expected, atol=1e-12)

    def test_crafted_windows_exact(self, impl):
        # 256 distinct values -> H=8 exactly; constant run -> H=0 exactly;
        # trailing (0,0,1,1) -> H=1 exactly.
        buf = np.concatenate([
            np.arange(256, dtype=np.uint8),
            np.full(512, 7, dtype=np.uint8),
            np.array([0, 0, 1, 1], dtype=np.uint8),
        ])
        x = impl.entropy_series(buf)
        assert x[0] == 1.0
        assert x[500] == 0.0  # window fully inside the constant run
        assert x[len(buf) - 4] == 0.125
        assert x[len(buf) - 1] == 0.0  # single-byte window

    def test_bounds(self, impl):
        rng = np.random.default_rng(1)
        x = impl.entropy_series(rng.integers(0, 256, 5000, dtype=np.uint8))
        assert (x >= 0.0).all() and (x <= 1.0).all()

    def test_extremes_characterize_windows(self, impl):
        # x == 1 iff the 256-byte window holds all-distinct values;
        # x == 0 iff the window is constant.
        rng = np.random.default_rng(6)
        buf = np.concatenate([
            rng.permutation(256).astype(np.uint8),
            rng.integers(0, 4, 600, dtype=np.uint8),
            np.full(300, 42, dtype=np.uint8),
        ])
        x = impl.entropy_series(buf)
        n = buf.shape[0]
        for i in range(n):
            window = buf[i : i + 256]
            distinct = np.unique(window).size
            if x[i] == 1.0:
                assert window.size == 256 and distinct == 256
            if distinct == 256 and window.size == 256:
                assert x[i] == 1.0
            assert (x[i] == 0.0) == (distinct == 1)


@backends()
class TestBigramCounts:
    def test_hand_example(self, impl):
        acc = impl.bigram_counts(np.array([10, 20, 10, 20, 10], dtype=np.uint8))
        assert acc[20, 10] == 2
        assert acc[10, 20] == 2
        assert acc.sum() == 4

    def test_matches_naive(self, impl):
        rng = np.random.default_rng(2)
        data = rng.integers(0, 256, 4096, dtype=np.uint8)
        assert np.array_equal(
            impl.bigram_counts(data), _oracles.bigram_counts_naive(data.tobytes())
        )

    def test_rejects_short_input(self, impl):
        with pytest.raises(ValueError):
            impl.bigram_counts(np.array([1], dtype=np.uint8))


@backends()
class TestGlcmCounts:
    def test_matches_slow_count(self, impl):
        rng = np.random.default_rng(3)
        q = rng.integers(0, 16, (20, 17))
        for offset in [(0, 1), (-1, 1), (-1, 0), (-1, -1)]:
            got = impl.glcm_counts(q, offset[0], offset[1], 16)
            slow = np.zeros((16, 16), dtype=np.int64)
            h, w = q.shape
            for r in range(h):
                for c in range(w):
                    r2, c2 = r + offset[0], c + offset[1]
                    if 0 <= r2 < h and 0 <= c2 < w:
                        slow[q[r, c], q[r2, c2]] += 1
            assert np.array_equal(got, slow)

    def test_rejects_degenerate_plane(self, impl):
        with pytest.raises(ValueError):
            impl.glcm_counts(np.zeros((1, 5), dtype=np.int64), -1, 0, 16)


@pytest.mark.skipif(native is None, reason="compiled backend not built")
class TestBackendAgreement:
    def test_entropy_series(self):
        rng = np.random.default_rng(4)
        buf = rng.integers(0, 256, 50176, dtype=np.uint8)
        a = native.entropy_series(buf)
        b = pure.entropy_series(buf)
        assert np.allclose(a, b, atol=1e-12)

    def test_integer_kernels_bit_identical(self):
        rng = np.random.default_rng(5)
        data = rng.integers(0, 256, 100000, dtype=np.uint8)
        assert np.array_equal(native.bigram_counts(data), pure.bigram_counts(data))
        q = rng.integers(0, 16, (224, 224))
        for off in [(0, 1), (-1, 1), (-1, 0), (-1, -1)]:
            assert np.array_equal(
                native.glcm_counts(q, off[0], off[1], 16),
                pure.glcm_counts(q, off[0], off[1], 16),
            )
        for order in (1, 4, 8):
            nr, nc = native.hilbert_coords(order, (1 << order) ** 2)
            pr, pc = pure.hilbert_coords(order, (1 << order) ** 2)
            assert np.array_equal(nr, pr) and np.array_equal(nc, pc)


def test_selected_backend_exports():
    assert _kernels.BACKEND in ("native", "pure")
    for name in ("entropy_series", "bigram_counts", "glcm_counts", "hilbert_coords"):
        assert callable(getattr(_kernels, name))
