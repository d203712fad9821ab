"""Box-counting dimension of the residual set of a planar disk family."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ModelMismatchError
from .sets import AmbientBox, DiskFamily, GridSet, OuterDisk

MAX_RESOLUTION = 2**14


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def rasterize_residual(family: DiskFamily, resolution: int, conservative: bool = False,
                       max_resolution: int = MAX_RESOLUTION) -> GridSet:
    """Cells of the ambient bounding square not covered by any open disk.

    By default a cell is residual when its center lies in the open ambient set
    and outside every disk. With ``conservative=True`` a cell is also residual
    when any of its corners is.
    """
    if not isinstance(family, DiskFamily):
        raise ModelMismatchError("rasterization needs a disk family")
    if not _is_pow2(resolution):
        raise ValueError("resolution must be a power of 2")
    if resolution > max_resolution:
        raise ValueError(f"resolution {resolution} exceeds the guard {max_resolution}")
    amb = family.ambient
    box = amb.bounding_box(resolution) if isinstance(amb, OuterDisk) else AmbientBox(
        2, amb.min_corner, amb.max_corner, resolution)
    h = box.h
    x0, y0 = box.min_corner
    if conservative:
        # corner lattice = cell centers of a grid shifted by half a cell
        corners = _residual_points(family, resolution + 1, x0 - 0.5 * h, y0 - 0.5 * h, h)
        cells = corners[:-1, :-1] | corners[1:, :-1] | corners[:-1, 1:] | corners[1:, 1:]
        cells |= _residual_points(family, resolution, x0, y0, h)
        return GridSet(box, cells)
    return GridSet(box, _residual_points(family, resolution, x0, y0, h))


def _residual_points(family: DiskFamily, n: int, x0: float, y0: float, h: float) -> np.ndarray:
    amb = family.ambient
    coords = (np.arange(n) + 0.5) * h
    xs = x0 + coords
    ys = y0 + coords
    if isinstance(amb, OuterDisk):
        cx, cy = amb.center
        dx = xs - cx
        dy = ys - cy
        mask = ((dx * dx)[None, :] + (dy * dy)[:, None] < amb.radius * amb.radius).astype(np.uint8)
    else:
        inx = (xs > amb.min_corner[0]) & (xs < amb.max_corner[0])
        iny = (ys > amb.min_corner[1]) & (ys < amb.max_corner[1])
        mask = (iny[:, None] & inx[None, :]).astype(np.uint8)
    if len(family):
        kernels.clear_disks(mask, family.x, family.y, family.r, x0, y0, h)
    return mask.view(bool)


@dataclass(frozen=True)
class DimensionEstimate:
    exponents: tuple[int, ...]  # box side = window side * 2**-j
    sizes: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    intercept: float
    r2: float
    stderr: float

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.slope - 1.96 * self.stderr, self.slope + 1.96 * self.stderr)

    def residuals(self) -> np.ndarray:
        x = np.array(self.exponents, dtype=float) * math.log(2.0)
        y = np.log(np.array(self.counts, dtype=float))
        return y - (self.intercept + self.slope * x)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scale", "count", "fit_residual"])
        for s, c, e in zip(self.sizes, self.counts, self.residuals()):
            w.writerow([repr(float(s)), int(c), repr(float(e))])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "counts": list(self.counts),
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "stderr": self.stderr,
            "ci95": list(self.ci95),
        }


def parse_scales(spec: str) -> list[int]:
    """``"5:10"`` -> ``[5, 6, 7, 8, 9, 10]``; also accepts ``"5,7,9"``."""
    if ":" in spec:
        a, b = (int(v) for v in spec.split(":"))
        return list(range(a, b + 1))
    return [int(v) for v in spec.split(",") if v.strip()]


def fit_loglog(exponents, counts) -> tuple[float, float, float, float]:
    """Least squares of ``log N`` on ``log(1/s)``: slope, intercept, R², stderr."""
    x = np.asarray(exponents, dtype=float) * math.log(2.0)
    y = np.log(np.asarray(counts, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = len(x) - 2
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(ss_res / dof / sxx) if dof > 0 and sxx > 0 else 0.0
    return float(slope), float(intercept), r2, stderr


def box_counting(residual: GridSet, exponents) -> DimensionEstimate:
    """Count ``2**-j``-boxes meeting the residual for each exponent ``j``.

    Boxes are aligned with the grid origin; the box side in cells is
    ``resolution >> j``.
    """
    exponents = sorted(int(j) for j in exponents)
    if len(exponents) < 4:
        raise ValueError("need at least 4 scales")
    if residual.dim != 2:
        raise ModelMismatchError("box counting is planar")
    res = residual.ambient.resolution
    if residual.count == 0:
        raise ValueError("residual set is empty")
    counts = []
    for j in exponents:
        if j < 0 or res % (2**j):
            raise ValueError(f"scale 2**-{j} does not divide resolution {res}")
        counts.append(kernels.box_count(residual.cells, res >> j))
    slope, intercept, r2, stderr = fit_loglog(exponents, counts)
    side = residual.ambient.max_corner[0] - residual.ambient.min_corner[0]
    return DimensionEstimate(
        tuple(exponents), tuple(side * 2.0**-j for j in exponents), tuple(counts), slope, intercept, r2, stderr
    )


def shifted_box_counts(residual: GridSet, exponents, shift: float = 0.5) -> list[int]:
    """Recount with the box grid origin moved by ``shift`` boxes on both axes.

    Independent of :func:`box_counting`: pads the bitmap and reduces with
    numpy. Shifted counts may differ from aligned ones by at most ``2**d``.
    """
    res = residual.ambient.resolution
    cells = np.asarray(residual.cells, dtype=bool)
    out = []
    for j in sorted(int(v) for v in exponents):
        b = res >> j
        off = int(round(shift * b)) % b if b > 1 else 0
        n = -(-(res + off) // b)
        padded = np.zeros((n * b, n * b), dtype=bool)
        padded[off:off + res, off:off + res] = cells
        out.append(int(np.count_nonzero(padded.reshape(n, b, n, b).any(axis=(1, 3)))))
    return out
