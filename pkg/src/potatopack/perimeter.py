"""Measures, perimeters and executable checks of the perimeter axioms.

Grid perimeter is the face count between in- and out-cells strictly inside the
ambient box, scaled by ``h**(d-1)``. Faces on the box frontier are never
counted, so ``P(A) == P(complement(A))`` holds exactly. Disk perimeter is the
exact arc length of each boundary circle inside the open window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from . import kernels
from .errors import GridMismatchError, ModelMismatchError, OverlapError
from .sets import TANGENCY_TOL, AmbientBox, Disk, DiskFamily, GridSet, OuterDisk

TWO_PI = 2.0 * math.pi


class PerimeterFunctional(Protocol):
    """Set function with values in ``[0, inf]``, relative to the open ambient."""

    def __call__(self, s) -> float: ...


# -- grids -------------------------------------------------------------------


def measure(s: GridSet) -> float:
    """Volume of a grid set: number of cells times ``h**d``."""
    return s.count * s.ambient.cell_volume


def face_count(s: GridSet) -> int:
    """Exact number of internal faces separating ``s`` from its complement."""
    return kernels.face_count(s.cells)


def grid_perimeter(s: GridSet) -> float:
    """Relative perimeter of ``s`` inside the open ambient box."""
    return face_count(s) * s.ambient.face_area


def shared_faces(a: GridSet, b: GridSet) -> int:
    """Number of faces on the boundary of both ``a`` and ``b``."""
    a._check_same_grid(b)
    return kernels.shared_face_count(a.cells, b.cells)


# -- disks -------------------------------------------------------------------


def _tol(r: float, scale: float) -> float:
    return TANGENCY_TOL * max(r, scale)


def _box_cuts(x, y, r, box: AmbientBox) -> list[float]:
    cuts = []
    for lo, hi, c, use_cos in (
        (box.min_corner[0], box.max_corner[0], x, True),
        (box.min_corner[1], box.max_corner[1], y, False),
    ):
        for wall in (lo, hi):
            t = (wall - c) / r
            if -1.0 < t < 1.0:
                a = math.acos(t) if use_cos else math.asin(t)
                if use_cos:
                    cuts.extend((a, -a))
                else:
                    cuts.extend((a, math.pi - a))
    return cuts


def _arc_fraction(x, y, r, cuts, keep) -> float:
    """Length of the circle ``(x, y, r)`` on arcs whose midpoint passes ``keep``."""
    if not cuts:
        return TWO_PI * r if keep(x + r, y) else 0.0
    angles = sorted(a % TWO_PI for a in cuts)
    angles.append(angles[0] + TWO_PI)
    total = 0.0
    for a, b in zip(angles[:-1], angles[1:]):
        if b - a <= 0.0:
            continue
        mid = 0.5 * (a + b)
        if keep(x + r * math.cos(mid), y + r * math.sin(mid)):
            total += (b - a) * r
    return total


def _window_arc(x: float, y: float, r: float, window) -> float:
    """Arc length of one circle lying in an open window (disk or box)."""
    if isinstance(window, OuterDisk):
        cx, cy = window.center
        R = window.radius
        d = math.hypot(x - cx, y - cy)
        tol = _tol(r, R)
        if d + r <= R + tol:
            return TWO_PI * r
        if d >= R + r - tol or d + R <= r + tol:
            return 0.0
        cos_a = (r * r + d * d - R * R) / (2.0 * r * d)
        return 2.0 * math.acos(max(-1.0, min(1.0, cos_a))) * r
    if isinstance(window, AmbientBox):
        if window.dim != 2:
            raise ModelMismatchError("disk perimeter needs a planar window")
        (x0, y0), (x1, y1) = window.min_corner, window.max_corner
        tol = _tol(r, max(x1 - x0, y1 - y0))
        if x - r >= x0 - tol and x + r <= x1 + tol and y - r >= y0 - tol and y + r <= y1 + tol:
            return TWO_PI * r
        if x + r <= x0 + tol or x - r >= x1 - tol or y + r <= y0 + tol or y - r >= y1 - tol:
            return 0.0
        return _arc_fraction(x, y, r, _box_cuts(x, y, r, window), window.contains_open)
    if window is None:
        return TWO_PI * r
    raise ModelMismatchError(f"unsupported window {type(window).__name__}")


def disk_perimeter(family: DiskFamily | Sequence[Disk], window=None) -> np.ndarray:
    """Per-disk boundary length inside the open ``window``.

    ``window`` is an :class:`OuterDisk`, a planar :class:`AmbientBox`, or None
    for the whole plane. Returns an array aligned with the family order.
    """
    if isinstance(family, DiskFamily):
        x, y, r = family.x, family.y, family.r
    else:
        disks = list(family)
        if any(not isinstance(d, Disk) for d in disks):
            raise ModelMismatchError("disk_perimeter needs disks")
        x = np.array([d.x for d in disks], dtype=float)
        y = np.array([d.y for d in disks], dtype=float)
        r = np.array([d.r for d in disks], dtype=float)
    out = TWO_PI * r
    if window is None:
        return out
    if isinstance(window, OuterDisk):
        cx, cy = window.center
        R = window.radius
        d = np.hypot(x - cx, y - cy)
        inside = d + r <= R + TANGENCY_TOL * np.maximum(r, R)
    elif isinstance(window, AmbientBox):
        if window.dim != 2:
            raise ModelMismatchError("disk perimeter needs a planar window")
        (x0, y0), (x1, y1) = window.min_corner, window.max_corner
        tol = TANGENCY_TOL * np.maximum(r, max(x1 - x0, y1 - y0))
        inside = (x - r >= x0 - tol) & (x + r <= x1 + tol) & (y - r >= y0 - tol) & (y + r <= y1 + tol)
    else:
        raise ModelMismatchError(f"unsupported window {type(window).__name__}")
    out = out.copy()
    for k in np.nonzero(~inside)[0]:
        out[k] = _window_arc(float(x[k]), float(y[k]), float(r[k]), window)
    return out


def _in_window(window, px: float, py: float) -> bool:
    if window is None:
        return True
    if isinstance(window, OuterDisk):
        return math.hypot(px - window.center[0], py - window.center[1]) < window.radius
    return window.contains_open(px, py)


def union_perimeter(disks: Sequence[Disk] | DiskFamily, window=None, rel_tol: float = TANGENCY_TOL) -> float:
    """Boundary length of the union of the disks inside the open window.

    Each circle contributes the arcs not lying inside another disk. Pairs
    within the tangency tolerance are treated as touching at a single point.
    """
    disks = list(disks)
    if not disks:
        return 0.0
    x = np.array([d.x for d in disks], dtype=float)
    y = np.array([d.y for d in disks], dtype=float)
    r = np.array([d.r for d in disks], dtype=float)
    dist = np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])
    tol = rel_tol * np.maximum(r[:, None], r[None, :])
    overlap = dist < r[:, None] + r[None, :] - tol
    np.fill_diagonal(overlap, False)
    per = disk_perimeter(disks, window)
    total = 0.0
    for i in range(len(disks)):
        js = np.nonzero(overlap[i])[0]
        if len(js) == 0:
            total += float(per[i])
            continue
        xi, yi, ri = float(x[i]), float(y[i]), float(r[i])
        cuts: list[float] = []
        for j in js:
            d = float(dist[i, j])
            rj = float(r[j])
            if abs(ri - rj) + tol[i, j] < d:
                cos_a = (ri * ri + d * d - rj * rj) / (2.0 * ri * d)
                a = math.acos(max(-1.0, min(1.0, cos_a)))
                phi = math.atan2(y[j] - yi, x[j] - xi)
                cuts.extend((phi - a, phi + a))
        if isinstance(window, OuterDisk):
            cx, cy = window.center
            R = window.radius
            d = math.hypot(xi - cx, yi - cy)
            if abs(R - ri) < d < R + ri:
                cos_a = (ri * ri + d * d - R * R) / (2.0 * ri * d)
                a = math.acos(max(-1.0, min(1.0, cos_a)))
                phi = math.atan2(cy - yi, cx - xi)
                cuts.extend((phi - a, phi + a))
        elif isinstance(window, AmbientBox):
            cuts.extend(_box_cuts(xi, yi, ri, window))

        def keep(px, py, _js=js, _i=i):
            if not _in_window(window, px, py):
                return False
            for j in _js:
                if math.hypot(px - x[j], py - y[j]) < r[j] - tol[_i, j]:
                    return False
            return True

        total += _arc_fraction(xi, yi, ri, cuts, keep)
    return total


# -- axioms ------------------------------------------------------------------


def check_axiom_T_prime(A: GridSet, B: GridSet) -> bool:
    """``P(A) >= P(A \\ B) - P(B)`` for ``B`` inside ``A`` (constant 1)."""
    A._check_same_grid(B)
    if not B.issubset(A):
        raise ValueError("B must be a subset of A")
    return face_count(A) >= face_count(A.difference(B)) - face_count(B)


def check_axiom_C(A: GridSet) -> bool:
    """Complement symmetry, compared on exact face counts."""
    return face_count(A) == face_count(A.complement())


def check_axiom_Z(A: GridSet, B: GridSet) -> bool:
    """Null-set invariance.

    On a fixed grid a null symmetric difference forces ``A == B``, so the
    check reduces to equality of perimeters of identical sets; pairs with a
    non-null difference satisfy it vacuously.
    """
    A._check_same_grid(B)
    if A.symmetric_difference(B).count != 0:
        return True
    return face_count(A) == face_count(B)


def _common_refinement(a: GridSet, b: GridSet) -> tuple[GridSet, GridSet]:
    ra, rb = a.ambient.resolution, b.ambient.resolution
    if (a.ambient.min_corner, a.ambient.max_corner) != (b.ambient.min_corner, b.ambient.max_corner):
        raise GridMismatchError("sets live in different boxes")
    hi = max(ra, rb)
    if hi % ra or hi % rb:
        raise GridMismatchError("resolutions are not nested")
    return a.refine(hi // ra), b.refine(hi // rb)


def check_axiom_L(sequence: Sequence[GridSet], limit: GridSet) -> bool:
    """Lower semicontinuity along a dyadically refined sequence.

    ``min`` over the second half of the sequence stands in for the liminf.
    Raises if the sequence is shorter than 4 or does not approach ``limit``
    in measure.
    """
    if len(sequence) < 4:
        raise ValueError("need at least 4 terms")
    gaps = []
    for s in sequence:
        a, b = _common_refinement(s, limit)
        gaps.append(measure(a.symmetric_difference(b)))
    if any(g1 > g0 for g0, g1 in zip(gaps, gaps[1:])) or (gaps[-1] > 0 and gaps[-1] >= gaps[0]):
        raise ValueError("sequence does not converge to the limit in measure")
    tail = [grid_perimeter(s) for s in sequence[len(sequence) // 2:]]
    target = grid_perimeter(limit)
    return min(tail) >= target - 1e-12 * max(1.0, target)


# -- kissing and additivity --------------------------------------------------


@dataclass(frozen=True)
class KissingMeasure:
    value: float
    method: str  # "exact-tangency" | "shared-face-area"


def _disks_overlap(a: Disk, b: Disk, rel_tol: float) -> bool:
    d = math.hypot(a.x - b.x, a.y - b.y)
    return d < a.r + b.r - rel_tol * max(a.r, b.r)


def kissing_measure(a, b, rel_tol: float = TANGENCY_TOL) -> KissingMeasure:
    """Length of the contact between two members (``inf`` for overlapping disks)."""
    if isinstance(a, GridSet) and isinstance(b, GridSet):
        return KissingMeasure(shared_faces(a, b) * a.ambient.face_area, "shared-face-area")
    if isinstance(a, Disk) and isinstance(b, Disk):
        value = math.inf if _disks_overlap(a, b, rel_tol) else 0.0
        return KissingMeasure(value, "exact-tangency")
    raise ModelMismatchError("kissing_measure needs two grid sets or two disks")


def check_additivity(a, b, window=None, rel_tol: float = TANGENCY_TOL) -> tuple[bool, float]:
    """Return ``(additive, defect)`` with ``defect = P(a) + P(b) - P(a | b)``."""
    if isinstance(a, GridSet) and isinstance(b, GridSet):
        a._check_same_grid(b)
        if np.any(a.cells & b.cells):
            raise OverlapError("grid sets share cells")
        defect = face_count(a) + face_count(b) - face_count(a.union(b))
        return defect == 0, defect * a.ambient.face_area
    if isinstance(a, Disk) and isinstance(b, Disk):
        if _disks_overlap(a, b, rel_tol):
            raise OverlapError(f"disks {a.id} and {b.id} overlap")
        pa, pb = disk_perimeter([a, b], window)
        defect = float(pa + pb) - union_perimeter([a, b], window, rel_tol)
        return defect == 0.0, defect
    raise ModelMismatchError("check_additivity needs two sets of the same model")


# -- randomized suite --------------------------------------------------------


def axiom_suite(grid: int = 128, trials: int = 1000, seed: int = 7, dim: int = 2) -> dict:
    """Run the exact axiom checks on random grid sets; returns failure tallies.

    Each trial draws a Bernoulli set ``A`` of random density, a subset ``B`` of
    ``A`` and a set ``C`` disjoint from ``A``, then checks (0), (C), (Z), (T')
    with constant 1, the additivity identity ``defect == 2 * shared faces``,
    the per-cell stability bound and positivity of nontrivial perimeters.
    """
    if grid < 1 or trials < 1 or dim < 1:
        raise ValueError("grid, trials and dim must be positive")
    rng = np.random.default_rng(seed)
    amb = AmbientBox.unit(dim, grid)
    shape = amb.shape
    failures = {name: 0 for name in ("zero", "complement", "null_set", "t_prime", "additivity",
                                     "stability", "isoperimetric")}
    empty = GridSet.empty(amb)
    full = GridSet.full(amb)
    if face_count(empty) != 0 or face_count(full) != 0:
        failures["zero"] += 1
    for _ in range(trials):
        p = rng.uniform(0.02, 0.98)
        A = GridSet(amb, rng.random(shape) < p)
        B = GridSet(amb, A.cells & (rng.random(shape) < rng.uniform(0.0, 1.0)))
        C = GridSet(amb, ~A.cells & (rng.random(shape) < rng.uniform(0.0, 1.0)))
        fa = face_count(A)
        if not check_axiom_C(A):
            failures["complement"] += 1
        if not check_axiom_Z(A, GridSet(amb, A.cells)):
            failures["null_set"] += 1
        if not check_axiom_T_prime(A, B):
            failures["t_prime"] += 1
        defect = fa + face_count(C) - face_count(A.union(C))
        if defect != 2 * shared_faces(A, C):
            failures["additivity"] += 1
        k = int(rng.integers(1, 17))
        extra = np.zeros(A.cells.size, dtype=bool)
        extra[rng.choice(A.cells.size, size=k, replace=False)] = True
        grown = GridSet(amb, A.cells | extra.reshape(shape))
        added = grown.count - A.count
        if abs(face_count(grown) - fa) > 2 * dim * added:
            failures["stability"] += 1
        if 0 < A.count < A.cells.size and fa == 0:
            failures["isoperimetric"] += 1
    return {"grid": grid, "dim": dim, "trials": trials, "seed": seed, "failures": failures,
            "all_pass": not any(failures.values())}
