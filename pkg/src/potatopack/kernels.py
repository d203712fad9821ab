"""Backend selection for the hot kernels.

The compiled ``_core`` extension is preferred; the numpy ``_purecore`` twin
is used when the extension is missing or ``POTATO_PURE=1`` is set. Both give
identical results, so callers never need to know which one is active.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _purecore

if os.environ.get("POTATO_PURE", "") not in ("", "0"):
    _backend = _purecore
    BACKEND = "python"
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _backend = _purecore
        BACKEND = "python"


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` ("cython"/"python"), or the active one."""
    if name is None:
        return _backend
    if name == "python":
        return _purecore
    if name == "cython":
        from . import _core  # type: ignore[attr-defined]

        return _core
    raise ValueError(f"unknown backend {name!r}")


def thread_count() -> int:
    """Worker cap from ``POTATO_THREADS`` (default: CPU count)."""
    raw = os.environ.get("POTATO_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def face_count(cells: np.ndarray) -> int:
    return _backend.face_count(np.ascontiguousarray(cells, dtype=np.uint8))


def shared_face_count(a: np.ndarray, b: np.ndarray) -> int:
    return _backend.shared_face_count(
        np.ascontiguousarray(a, dtype=np.uint8), np.ascontiguousarray(b, dtype=np.uint8)
    )


def box_count(mask: np.ndarray, b: int) -> int:
    return _backend.box_count(np.ascontiguousarray(mask, dtype=np.uint8), int(b))


def overlapping_pairs(cx, cy, r, rel_tol: float):
    return _backend.overlapping_pairs(
        np.ascontiguousarray(cx, dtype=np.float64),
        np.ascontiguousarray(cy, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
        float(rel_tol),
    )


def clear_disks(mask: np.ndarray, cx, cy, r, x0: float, y0: float, h: float, backend=None) -> None:
    """Clear cells of ``mask`` (uint8, C-order) covered by any open disk.

    Rows are split into bands, one per worker. Bands never share cells, so the
    result does not depend on the thread count.
    """
    kern = backend or _backend
    cx = np.ascontiguousarray(cx, dtype=np.float64)
    cy = np.ascontiguousarray(cy, dtype=np.float64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    nrows = mask.shape[0]
    workers = min(thread_count(), max(1, nrows // 64))
    if workers == 1:
        kern.clear_disks(mask, cx, cy, r, x0, y0, h, 0, nrows)
        return
    edges = np.linspace(0, nrows, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(kern.clear_disks, mask, cx, cy, r, x0, y0, h, int(a), int(b))
            for a, b in zip(edges[:-1], edges[1:])
        ]
        for f in futures:
            f.result()
