"""Compiled and numpy kernels must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from potatopack import _purecore, kernels

try:
    from potatopack import _core
except ImportError:  # pragma: no cover
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


@st.composite
def bitsets(draw, max_dim=3, max_side=9):
    dim = draw(st.integers(1, max_dim))
    side = draw(st.integers(1, max_side))
    return draw(arrays(np.bool_, (side,) * dim))


def test_active_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_core
@given(bitsets())
def test_face_count_parity(a):
    assert _core.face_count(a.astype(np.uint8)) == _purecore.face_count(a)


@needs_core
@given(bitsets(), st.randoms())
def test_shared_face_parity(a, rnd):
    b = np.array([rnd.random() < 0.5 for _ in range(a.size)]).reshape(a.shape) & ~a
    assert _core.shared_face_count(a.astype(np.uint8), b.astype(np.uint8)) == _purecore.shared_face_count(a, b)


@needs_core
@given(bitsets(), st.randoms())
def test_shared_face_parity_overlapping(a, rnd):
    b = np.array([rnd.random() < 0.5 for _ in range(a.size)]).reshape(a.shape)
    assert _core.shared_face_count(a.astype(np.uint8), b.astype(np.uint8)) == _purecore.shared_face_count(a, b)


@given(bitsets())
def test_shared_faces_with_itself_is_boundary(a):
    for k in (_purecore, kernels.get_backend()):
        assert k.shared_face_count(a.astype(np.uint8), a.astype(np.uint8)) == _purecore.face_count(a)


def test_face_count_small_cases():
    a = np.zeros((10, 10), bool)
    a[4, 4] = True
    assert _purecore.face_count(a) == 4
    a[4, 5] = True
    assert _purecore.face_count(a) == 6


@needs_core
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([16, 32, 64]))
def test_clear_disks_parity(seed, n):
    rng = np.random.default_rng(seed)
    k = 30
    cx, cy = rng.uniform(-1, 1, k), rng.uniform(-1, 1, k)
    r = rng.uniform(0.001, 0.4, k)
    m1 = np.ones((n, n), np.uint8)
    m2 = m1.copy()
    _core.clear_disks(m1, cx, cy, r, -1.0, -1.0, 2.0 / n, 0, n)
    _purecore.clear_disks(m2, cx, cy, r, -1.0, -1.0, 2.0 / n, 0, n)
    assert np.array_equal(m1, m2)


def test_clear_disks_bands_independent_of_threads(monkeypatch):
    rng = np.random.default_rng(3)
    cx, cy, r = rng.uniform(-1, 1, 200), rng.uniform(-1, 1, 200), rng.uniform(0.001, 0.2, 200)
    results = []
    for threads in ("1", "4"):
        monkeypatch.setenv("POTATO_THREADS", threads)
        m = np.ones((512, 512), np.uint8)
        kernels.clear_disks(m, cx, cy, r, -1.0, -1.0, 2.0 / 512)
        results.append(m)
    assert np.array_equal(results[0], results[1])


@needs_core
@given(arrays(np.bool_, (32, 32)), st.sampled_from([1, 2, 4, 8, 16, 32]))
def test_box_count_parity(m, b):
    assert _core.box_count(m.astype(np.uint8), b) == _purecore.box_count(m, b)


def _brute_pairs(cx, cy, r, tol):
    out = []
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            d = np.sqrt((cx[j] - cx[i]) ** 2 + (cy[j] - cy[i]) ** 2)
            if d < r[j] + r[i] - tol * max(r[i], r[j]):
                out.append((i, j))
    return out


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_core)])
def test_overlapping_pairs_matches_brute_force(backend):
    kern = kernels.get_backend(backend)
    rng = np.random.default_rng(11)
    cx, cy, r = rng.uniform(0, 1, 120), rng.uniform(0, 1, 120), rng.uniform(0.001, 0.05, 120)
    ii, jj = kern.overlapping_pairs(cx, cy, r, 1e-9)
    assert list(zip(ii.tolist(), jj.tolist())) == _brute_pairs(cx, cy, r, 1e-9)
