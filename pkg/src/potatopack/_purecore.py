"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_core`` extension is not available, or when
``POTATO_PURE=1`` is set. Every function here must return results identical
to its compiled twin (integer counts, same floating point operation order).
"""
from __future__ import annotations

import numpy as np


def face_count(cells: np.ndarray) -> int:
    """Count internal faces separating an in-cell from an out-cell."""
    a = np.asarray(cells, dtype=bool)
    total = 0
    for axis in range(a.ndim):
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        total += int(np.count_nonzero(a[tuple(lo)] != a[tuple(hi)]))
    return total


def shared_face_count(a: np.ndarray, b: np.ndarray) -> int:
    """Count faces lying on the boundary of both ``a`` and ``b``.

    For disjoint sets these are the faces with a cell of ``a`` on one side and
    a cell of ``b`` on the other.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    total = 0
    for axis in range(a.ndim):
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        total += int(np.count_nonzero((a[lo] ^ a[hi]) & (b[lo] ^ b[hi])))
    return total


def clear_disks(mask, cx, cy, r, x0, y0, h, row_start, row_stop):
    """Clear every cell of ``mask`` whose center lies strictly inside a disk.

    Cell ``(i, j)`` has center ``(x0 + (j + 0.5) * h, y0 + (i + 0.5) * h)``.
    Only rows in ``[row_start, row_stop)`` are touched.
    """
    ncols = mask.shape[1]
    for k in range(len(r)):
        xc, yc, rk = cx[k], cy[k], r[k]
        i0 = max(row_start, int(np.floor((yc - rk - y0) / h - 0.5)))
        i1 = min(row_stop, int(np.floor((yc + rk - y0) / h - 0.5)) + 2)
        j0 = max(0, int(np.floor((xc - rk - x0) / h - 0.5)))
        j1 = min(ncols, int(np.floor((xc + rk - x0) / h - 0.5)) + 2)
        if i0 >= i1 or j0 >= j1:
            continue
        ys = y0 + (np.arange(i0, i1) + 0.5) * h
        xs = x0 + (np.arange(j0, j1) + 0.5) * h
        dy = ys - yc
        dx = xs - xc
        inside = (dx * dx)[None, :] + (dy * dy)[:, None] < rk * rk
        mask[i0:i1, j0:j1][inside] = 0


def box_count(mask: np.ndarray, b: int) -> int:
    """Number of ``b x b`` boxes (aligned at the origin) holding a set cell."""
    n0, n1 = mask.shape
    blocks = np.asarray(mask, dtype=bool).reshape(n0 // b, b, n1 // b, b)
    return int(np.count_nonzero(blocks.any(axis=(1, 3))))


def overlapping_pairs(cx, cy, r, rel_tol):
    """Pairs ``(i, j)``, ``i < j``, whose open disks overlap beyond tolerance.

    A pair overlaps when ``dist < r_i + r_j - rel_tol * max(r_i, r_j)``.
    Sweep-and-prune along x.
    """
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    r = np.asarray(r, dtype=float)
    order = np.argsort(cx - r, kind="stable")
    lo = (cx - r)[order]
    hi = (cx + r)[order]
    out_i: list[np.ndarray] = []
    out_j: list[np.ndarray] = []
    n = len(r)
    for a in range(n):
        stop = int(np.searchsorted(lo, hi[a], side="left"))
        if stop <= a + 1:
            continue
        i = order[a]
        js = order[a + 1:stop]
        dx = cx[js] - cx[i]
        dy = cy[js] - cy[i]
        dist = np.sqrt(dx * dx + dy * dy)
        bound = r[js] + r[i] - rel_tol * np.maximum(r[js], r[i])
        hit = js[dist < bound]
        if len(hit):
            out_i.append(np.full(len(hit), i))
            out_j.append(hit)
    if not out_i:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    ii = np.concatenate(out_i).astype(np.int64)
    jj = np.concatenate(out_j).astype(np.int64)
    lo_idx = np.minimum(ii, jj)
    hi_idx = np.maximum(ii, jj)
    key = np.lexsort((hi_idx, lo_idx))
    return lo_idx[key], hi_idx[key]
