"""Line slicing of planar disk families.

Horizontal lines ``y = offset`` are intersected with every disk. A line
crossing a disk's interior meets its boundary twice; a line at distance
exactly ``r`` from a center only touches it (a tangent hit).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelMismatchError
from .sets import AmbientBox, DiskFamily, OuterDisk

TANGENT_TOL = 1e-12


def _require_disks(family) -> DiskFamily:
    if not isinstance(family, DiskFamily):
        raise ModelMismatchError("slicing needs a disk family")
    return family


def _window_extent(family: DiskFamily, vertical: bool) -> tuple[float, float]:
    amb = family.ambient
    if isinstance(amb, OuterDisk):
        c = amb.center[0 if vertical else 1]
        return c - amb.radius, c + amb.radius
    k = 0 if vertical else 1
    return amb.min_corner[k], amb.max_corner[k]


def _axes(family: DiskFamily, vertical: bool):
    # for vertical lines x = offset, the roles of x and y swap
    return (family.y, family.x) if vertical else (family.x, family.y)


@dataclass(frozen=True)
class LineSample:
    offset: float
    crossings: int
    sets_met: tuple[int, ...]
    tangent_hits: int
    vertical: bool = False


def slice_line(family: DiskFamily, offset: float, vertical: bool = False) -> LineSample:
    """Intersect one axis-parallel line with every disk of the family."""
    family = _require_disks(family)
    _, c = _axes(family, vertical)
    gap = np.abs(offset - c) - family.r
    tangent = np.abs(gap) <= TANGENT_TOL
    met = (gap < 0) & ~tangent
    ids = tuple(family.disks[k].id for k in np.nonzero(met)[0])
    return LineSample(float(offset), 2 * len(ids), ids, int(np.count_nonzero(tangent)), vertical)


def _count_lines(lo: np.ndarray, hi: np.ndarray, offsets: np.ndarray):
    """Per offset: disks with ``lo < y < hi`` (open), and endpoint tangencies."""
    lo_s, hi_s = np.sort(lo), np.sort(hi)
    met = np.searchsorted(lo_s, offsets - TANGENT_TOL, side="left") - np.searchsorted(
        hi_s, offsets + TANGENT_TOL, side="right"
    )
    tangent = (
        np.searchsorted(lo_s, offsets + TANGENT_TOL, side="right")
        - np.searchsorted(lo_s, offsets - TANGENT_TOL, side="left")
        + np.searchsorted(hi_s, offsets + TANGENT_TOL, side="right")
        - np.searchsorted(hi_s, offsets - TANGENT_TOL, side="left")
    )
    return np.maximum(met, 0), tangent


@dataclass
class CrossingStats:
    offsets: np.ndarray
    crossings: np.ndarray
    sets_met: np.ndarray
    tangent_hits: np.ndarray
    mean_crossings: float
    analytic_mean: float
    std_error: float
    sets_met_distribution: dict[int, int]
    window: tuple[float, float]
    extras: dict = field(default_factory=dict)

    @property
    def mean_sets_met(self) -> float:
        return float(self.sets_met.mean())

    @property
    def within_3sigma(self) -> bool:
        return abs(self.mean_crossings - self.analytic_mean) <= 3.0 * self.std_error

    @property
    def parity_ok(self) -> bool:
        clean = self.tangent_hits == 0
        return bool(np.all(self.crossings[clean] % 2 == 0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["offset", "crossings", "sets_met", "tangent_hits"])
        for k in range(len(self.offsets)):
            w.writerow([repr(float(self.offsets[k])), int(self.crossings[k]), int(self.sets_met[k]),
                        int(self.tangent_hits[k])])
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "lines": int(len(self.offsets)),
            "mean_crossings": self.mean_crossings,
            "analytic_mean": self.analytic_mean,
            "std_error": self.std_error,
            "within_3sigma": self.within_3sigma,
            "parity_ok": self.parity_ok,
            "mean_sets_met": self.mean_sets_met,
            "sets_met_distribution": [[k, v] for k, v in sorted(self.sets_met_distribution.items())],
            "window": list(self.window),
        }
        out.update(self.extras)
        return out


def line_offsets(lo: float, hi: float, n_lines: int, rng_seed: int) -> np.ndarray:
    """Uniform offsets; the k-th depends only on ``(rng_seed, k)``."""
    rng = np.random.default_rng(rng_seed)
    return lo + (hi - lo) * rng.random(n_lines)


def crossing_statistics(family: DiskFamily, n_lines: int, rng_seed: int, vertical: bool = False) -> CrossingStats:
    """Monte-Carlo crossing counts against the closed form ``sum 4 r_k / H``.

    Each disk is hit by offsets in an interval of length ``2 r_k`` and then
    contributes two crossings, hence the analytic mean.
    """
    family = _require_disks(family)
    if n_lines < 100:
        raise ValueError("need at least 100 lines")
    a, b = _window_extent(family, vertical)
    H = b - a
    offsets = line_offsets(a, b, n_lines, rng_seed)
    _, c = _axes(family, vertical)
    met, tangent = _count_lines(c - family.r, c + family.r, offsets)
    crossings = 2 * met
    std = float(crossings.std(ddof=1)) / math.sqrt(n_lines) if n_lines > 1 else 0.0
    analytic = float(4.0 * np.sum(family.r) / H) if len(family) else 0.0
    dist = {int(k): int(v) for k, v in enumerate(np.bincount(met)) if v}
    return CrossingStats(
        offsets=offsets,
        crossings=crossings,
        sets_met=met,
        tangent_hits=tangent,
        mean_crossings=float(crossings.mean()),
        analytic_mean=analytic,
        std_error=std,
        sets_met_distribution=dist,
        window=(a, b),
    )


@dataclass(frozen=True)
class IntervalReport:
    ok: bool
    intervals: tuple[tuple[int, float, float], ...]  # (id, left, right)
    contacts: tuple[tuple[int, int, float], ...]  # (id, id, shared endpoint)
    residual_endpoints: int
    problems: tuple[str, ...] = ()


def interval_structure_check(family: DiskFamily, offset: float, depth: int | None = None,
                             rel_tol: float = 1e-9) -> IntervalReport:
    """Check the chord structure of one line across the family.

    Each disk cuts the line in a single open interval; intervals must not
    overlap. Every endpoint inside the window is either shared with another
    interval (the line passes through a contact point of two members) or lies
    outside every other disk, i.e. in the residual set.
    """
    family = _require_disks(family)
    if depth is not None:
        family = family.up_to_generation(depth)
    x, y, r = family.x, family.y, family.r
    dy = offset - y
    disc = r * r - dy * dy
    hit = np.nonzero(disc > TANGENT_TOL)[0]
    if len(hit) == 0:
        raise ValueError("line meets no disk")
    half = np.sqrt(disc[hit])
    order = np.argsort(x[hit] - half, kind="stable")
    hit, half = hit[order], half[order]
    ids = [family.disks[k].id for k in hit]
    intervals = tuple((ids[k], float(x[hit[k]] - half[k]), float(x[hit[k]] + half[k])) for k in range(len(hit)))
    problems: list[str] = []
    contacts: list[tuple[int, int, float]] = []
    scale = float(r.max())
    tol = rel_tol * scale
    for (ia, _, ra), (ib, lb, _) in zip(intervals, intervals[1:]):
        if lb < ra - tol:
            problems.append(f"intervals of {ia} and {ib} overlap")
    amb = family.ambient
    residual = 0
    for pos, (i, left, right) in enumerate(intervals):
        k = hit[pos]
        for ex in (left, right):
            if isinstance(amb, OuterDisk):
                inside = math.hypot(ex - amb.center[0], offset - amb.center[1]) < amb.radius - tol
            else:
                inside = amb.min_corner[0] + tol < ex < amb.max_corner[0] - tol
            if not inside:
                continue
            partners = [
                (j, ol if abs(ol - ex) <= tol else orr)
                for j, ol, orr in intervals
                if j != i and (abs(ol - ex) <= tol or abs(orr - ex) <= tol)
            ]
            if partners:
                j = partners[0][0]
                if i < j:
                    contacts.append((i, j, ex))
                continue
            d = np.hypot(ex - x, offset - y) - r
            d[k] = np.inf
            if np.any(d < -tol):
                problems.append(f"endpoint {ex:.17g} of {i} lies inside another disk")
            else:
                residual += 1
    return IntervalReport(not problems, intervals, tuple(contacts), residual, tuple(problems))
