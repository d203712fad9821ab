# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_purecore`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()


cdef inline Py_ssize_t _span(const cnp.uint8_t* a, const cnp.uint8_t* b, Py_ssize_t length,
                             Py_ssize_t stride) noexcept nogil:
    # branchless so the compiler can vectorize; inputs are 0/1
    cdef Py_ssize_t i, total = 0
    if b == NULL:
        for i in range(length):
            total += a[i] ^ a[i + stride]
    else:
        for i in range(length):
            total += (a[i] ^ a[i + stride]) & (b[i] ^ b[i + stride])
    return total


cdef Py_ssize_t _faces(const cnp.uint8_t* a, const cnp.uint8_t* b, tuple shape):
    cdef Py_ssize_t total = 0
    cdef Py_ssize_t outer, base, stride, n, nouter, length
    cdef int axis
    for axis in range(len(shape)):
        n = shape[axis]
        stride = int(np.prod(shape[axis + 1:], dtype=np.int64))
        nouter = int(np.prod(shape[:axis], dtype=np.int64))
        length = (n - 1) * stride
        if length <= 0:
            continue
        with nogil:
            for outer in range(nouter):
                base = outer * n * stride
                total += _span(a + base, NULL if b == NULL else b + base, length, stride)
    return total


def _bits(cells) -> cnp.ndarray:
    return np.ascontiguousarray(np.asarray(cells, dtype=bool)).view(np.uint8)


def face_count(cells):
    cdef cnp.uint8_t[::1] a = _bits(cells).ravel()
    if a.shape[0] == 0:
        return 0
    return int(_faces(&a[0], NULL, tuple(np.shape(cells))))


def shared_face_count(a_cells, b_cells):
    cdef cnp.uint8_t[::1] a = _bits(a_cells).ravel()
    cdef cnp.uint8_t[::1] b = _bits(b_cells).ravel()
    if a.shape[0] == 0:
        return 0
    return int(_faces(&a[0], &b[0], tuple(np.shape(a_cells))))


def clear_disks(cnp.uint8_t[:, ::1] mask, const double[::1] cx, const double[::1] cy,
                const double[::1] r, double x0, double y0, double h,
                Py_ssize_t row_start, Py_ssize_t row_stop):
    cdef Py_ssize_t ncols = mask.shape[1]
    cdef Py_ssize_t k, i, j, i0, i1, j0, j1
    cdef double xc, yc, rk, rr, dy, dy2, dx
    with nogil:
        for k in range(r.shape[0]):
            xc = cx[k]
            yc = cy[k]
            rk = r[k]
            rr = rk * rk
            i0 = <Py_ssize_t>floor((yc - rk - y0) / h - 0.5)
            i1 = <Py_ssize_t>floor((yc + rk - y0) / h - 0.5) + 2
            j0 = <Py_ssize_t>floor((xc - rk - x0) / h - 0.5)
            j1 = <Py_ssize_t>floor((xc + rk - x0) / h - 0.5) + 2
            if i0 < row_start:
                i0 = row_start
            if i1 > row_stop:
                i1 = row_stop
            if j0 < 0:
                j0 = 0
            if j1 > ncols:
                j1 = ncols
            for i in range(i0, i1):
                dy = (y0 + (i + 0.5) * h) - yc
                dy2 = dy * dy
                for j in range(j0, j1):
                    dx = (x0 + (j + 0.5) * h) - xc
                    if dx * dx + dy2 < rr:
                        mask[i, j] = 0


def box_count(mask, Py_ssize_t b):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t n0 = m.shape[0], n1 = m.shape[1]
    cdef Py_ssize_t bi, bj, i, j, count = 0
    cdef bint hit
    with nogil:
        for bi in range(n0 // b):
            for bj in range(n1 // b):
                hit = False
                for i in range(bi * b, bi * b + b):
                    for j in range(bj * b, bj * b + b):
                        if m[i, j]:
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    count += 1
    return int(count)


def overlapping_pairs(cx_in, cy_in, r_in, double rel_tol):
    cdef double[::1] cx = np.ascontiguousarray(cx_in, dtype=np.float64)
    cdef double[::1] cy = np.ascontiguousarray(cy_in, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0]
    cdef cnp.int64_t[::1] order = np.argsort(np.asarray(cx) - np.asarray(r), kind="stable").astype(np.int64)
    cdef Py_ssize_t a, c, i, j
    cdef double hi_a, dx, dy, dist, bound, rmax
    out_i = []
    out_j = []
    for a in range(n):
        i = order[a]
        hi_a = cx[i] + r[i]
        for c in range(a + 1, n):
            j = order[c]
            if cx[j] - r[j] >= hi_a:
                break
            dx = cx[j] - cx[i]
            dy = cy[j] - cy[i]
            dist = sqrt(dx * dx + dy * dy)
            rmax = r[j] if r[j] > r[i] else r[i]
            bound = r[j] + r[i] - rel_tol * rmax
            if dist < bound:
                out_i.append(i if i < j else j)
                out_j.append(j if i < j else i)
    ii = np.asarray(out_i, dtype=np.int64)
    jj = np.asarray(out_j, dtype=np.int64)
    key = np.lexsort((jj, ii))
    return ii[key], jj[key]
