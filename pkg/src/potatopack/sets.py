"""Set models: digital sets on a box grid and families of disks.

All types are immutable after construction. Grid cells are stored as a numpy
bool array of shape ``(resolution,) * dim`` with the write flag cleared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GridMismatchError, ModelMismatchError, OverlapError

TANGENCY_TOL = 1e-9


@dataclass(frozen=True)
class AmbientBox:
    """Open axis-aligned box, optionally carrying a grid resolution."""

    dim: int
    min_corner: tuple[float, ...]
    max_corner: tuple[float, ...]
    resolution: int = 1

    def __post_init__(self):
        object.__setattr__(self, "min_corner", tuple(float(v) for v in self.min_corner))
        object.__setattr__(self, "max_corner", tuple(float(v) for v in self.max_corner))
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if len(self.min_corner) != self.dim or len(self.max_corner) != self.dim:
            raise ValueError("corner length does not match dim")
        if any(hi <= lo for lo, hi in zip(self.min_corner, self.max_corner)):
            raise ValueError("max_corner must strictly dominate min_corner")
        if int(self.resolution) < 1:
            raise ValueError("resolution must be >= 1")
        widths = [(hi - lo) / self.resolution for lo, hi in zip(self.min_corner, self.max_corner)]
        if not all(math.isclose(w, widths[0], rel_tol=1e-12) for w in widths):
            raise ValueError("grid cells must be cubes (equal extent per axis)")

    @classmethod
    def unit(cls, dim: int = 2, resolution: int = 1) -> "AmbientBox":
        return cls(dim, (0.0,) * dim, (1.0,) * dim, resolution)

    @property
    def h(self) -> float:
        return (self.max_corner[0] - self.min_corner[0]) / self.resolution

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.resolution,) * self.dim

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in zip(self.min_corner, self.max_corner))

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def face_area(self) -> float:
        return self.h ** (self.dim - 1)

    def contains_open(self, x: float, y: float) -> bool:
        return (self.min_corner[0] < x < self.max_corner[0]) and (self.min_corner[1] < y < self.max_corner[1])


@dataclass(frozen=True)
class OuterDisk:
    """Open disk used as the ambient set of a disk family (d = 2)."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError("ambient radius must be positive")

    dim = 2

    @property
    def volume(self) -> float:
        return math.pi * self.radius**2

    def bounding_box(self, resolution: int = 1) -> AmbientBox:
        cx, cy = self.center
        r = self.radius
        return AmbientBox(2, (cx - r, cy - r), (cx + r, cy + r), resolution)


class GridSet:
    """A digital subset of an :class:`AmbientBox` grid."""

    __slots__ = ("ambient", "cells")

    def __init__(self, ambient: AmbientBox, cells: np.ndarray):
        cells = np.array(cells, dtype=bool, copy=True)
        if cells.shape != ambient.shape:
            raise ValueError(f"cells shape {cells.shape} != grid shape {ambient.shape}")
        cells.setflags(write=False)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "cells", cells)

    def __setattr__(self, name, value):
        raise AttributeError("GridSet is immutable")

    @classmethod
    def empty(cls, ambient: AmbientBox) -> "GridSet":
        return cls(ambient, np.zeros(ambient.shape, dtype=bool))

    @classmethod
    def full(cls, ambient: AmbientBox) -> "GridSet":
        return cls(ambient, np.ones(ambient.shape, dtype=bool))

    @classmethod
    def from_cells(cls, ambient: AmbientBox, indices: Iterable[Sequence[int]]) -> "GridSet":
        cells = np.zeros(ambient.shape, dtype=bool)
        for idx in indices:
            cells[tuple(idx)] = True
        return cls(ambient, cells)

    @classmethod
    def from_box(cls, ambient: AmbientBox, lo: Sequence[int], hi: Sequence[int]) -> "GridSet":
        """Cells with ``lo[k] <= index[k] < hi[k]`` on every axis."""
        cells = np.zeros(ambient.shape, dtype=bool)
        cells[tuple(slice(a, b) for a, b in zip(lo, hi))] = True
        return cls(ambient, cells)

    @property
    def h(self) -> float:
        return self.ambient.h

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.cells))

    def _check_same_grid(self, other: "GridSet") -> None:
        if not isinstance(other, GridSet):
            raise ModelMismatchError("expected a GridSet")
        if other.ambient != self.ambient:
            raise GridMismatchError("grid sets live on different grids")

    def union(self, other: "GridSet") -> "GridSet":
        self._check_same_grid(other)
        return GridSet(self.ambient, self.cells | other.cells)

    def intersection(self, other: "GridSet") -> "GridSet":
        self._check_same_grid(other)
        return GridSet(self.ambient, self.cells & other.cells)

    def difference(self, other: "GridSet") -> "GridSet":
        self._check_same_grid(other)
        return GridSet(self.ambient, self.cells & ~other.cells)

    def symmetric_difference(self, other: "GridSet") -> "GridSet":
        self._check_same_grid(other)
        return GridSet(self.ambient, self.cells ^ other.cells)

    def complement(self) -> "GridSet":
        return GridSet(self.ambient, ~self.cells)

    def issubset(self, other: "GridSet") -> bool:
        self._check_same_grid(other)
        return not bool(np.any(self.cells & ~other.cells))

    def refine(self, factor: int) -> "GridSet":
        """Render the same region on a grid ``factor`` times finer per axis."""
        amb = self.ambient
        fine = AmbientBox(amb.dim, amb.min_corner, amb.max_corner, amb.resolution * factor)
        cells = self.cells
        for axis in range(amb.dim):
            cells = np.repeat(cells, factor, axis=axis)
        return GridSet(fine, cells)

    def bounding_box(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Half-open index bounds of the occupied cells, or None if empty."""
        idx = np.nonzero(self.cells)
        if len(idx[0]) == 0:
            return None
        return tuple(int(i.min()) for i in idx), tuple(int(i.max()) + 1 for i in idx)

    def is_box(self) -> bool:
        bb = self.bounding_box()
        if bb is None:
            return False
        lo, hi = bb
        return self.count == math.prod(b - a for a, b in zip(lo, hi))

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.ambient == other.ambient and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.ambient, self.cells.tobytes()))

    def __repr__(self):
        return f"GridSet(res={self.ambient.resolution}, dim={self.dim}, cells={self.count})"


@dataclass(frozen=True)
class Disk:
    """A member of a disk family. ``parents`` uses -1 for the ambient circle."""

    id: int
    x: float
    y: float
    r: float
    generation: int = 0
    parents: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"disk {self.id}: radius must be positive, got {self.r}")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def area(self) -> float:
        return math.pi * self.r * self.r


@dataclass(frozen=True)
class DiskFamily:
    """Enumerated planar disks inside an ambient disk or box.

    Only positivity of radii is enforced at construction so that invalid
    families can still be loaded and diagnosed; call :meth:`validate` for
    containment and pairwise disjointness.
    """

    ambient: OuterDisk | AmbientBox
    disks: tuple[Disk, ...] = field(default_factory=tuple)

    model = "disks"

    def __post_init__(self):
        object.__setattr__(self, "disks", tuple(self.disks))
        if isinstance(self.ambient, AmbientBox) and self.ambient.dim != 2:
            raise ModelMismatchError("disk families are planar only (d = 2)")

    def __len__(self) -> int:
        return len(self.disks)

    def __iter__(self):
        return iter(self.disks)

    def __getitem__(self, i):
        return self.disks[i]

    dim = 2

    @cached_property
    def x(self) -> np.ndarray:
        return np.array([d.x for d in self.disks], dtype=float)

    @cached_property
    def y(self) -> np.ndarray:
        return np.array([d.y for d in self.disks], dtype=float)

    @cached_property
    def r(self) -> np.ndarray:
        return np.array([d.r for d in self.disks], dtype=float)

    @cached_property
    def generations(self) -> np.ndarray:
        return np.array([d.generation for d in self.disks], dtype=np.int64)

    @property
    def ambient_volume(self) -> float:
        return self.ambient.volume

    def measures(self) -> np.ndarray:
        return math.pi * self.r * self.r

    def subset(self, indices) -> "DiskFamily":
        return DiskFamily(self.ambient, tuple(self.disks[i] for i in indices))

    def up_to_generation(self, g: int) -> "DiskFamily":
        return DiskFamily(self.ambient, tuple(d for d in self.disks if d.generation <= g))

    def residual_measure(self) -> float:
        """Ambient area minus total disk area (exact for disjoint disks)."""
        return self.ambient.volume - float(np.sum(self.measures()))

    def validate(self, rel_tol: float = TANGENCY_TOL) -> None:
        """Raise if a disk leaves the ambient closure or two interiors overlap."""
        from . import kernels

        if len(self) == 0:
            return
        x, y, r = self.x, self.y, self.r
        if isinstance(self.ambient, OuterDisk):
            cx, cy = self.ambient.center
            R = self.ambient.radius
            slack = np.hypot(x - cx, y - cy) + r - R
            bad = np.nonzero(slack > rel_tol * R)[0]
        else:
            (x0, y0), (x1, y1) = self.ambient.min_corner, self.ambient.max_corner
            scale = max(x1 - x0, y1 - y0)
            slack = np.maximum.reduce([x0 - (x - r), (x + r) - x1, y0 - (y - r), (y + r) - y1])
            bad = np.nonzero(slack > rel_tol * scale)[0]
        if len(bad):
            raise OverlapError(f"disk {self.disks[bad[0]].id} is not contained in the ambient set")
        ii, jj = kernels.overlapping_pairs(x, y, r, rel_tol)
        if len(ii):
            raise OverlapError(
                f"disks {self.disks[ii[0]].id} and {self.disks[jj[0]].id} have overlapping interiors"
            )


@dataclass(frozen=True)
class GridFamily:
    """Enumerated grid sets sharing one ambient grid."""

    ambient: AmbientBox
    sets: tuple[GridSet, ...]
    generations_: tuple[int, ...] | None = None

    model = "grid"

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        for s in self.sets:
            if s.ambient != self.ambient:
                raise GridMismatchError("family members live on different grids")
        if self.generations_ is not None and len(self.generations_) != len(self.sets):
            raise ValueError("one generation per member required")

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i):
        return self.sets[i]

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def generations(self) -> np.ndarray:
        if self.generations_ is None:
            return np.zeros(len(self.sets), dtype=np.int64)
        return np.asarray(self.generations_, dtype=np.int64)

    @property
    def ambient_volume(self) -> float:
        return self.ambient.volume

    def measures(self) -> np.ndarray:
        return np.array([s.count for s in self.sets], dtype=float) * self.ambient.cell_volume

    def coverage(self) -> np.ndarray:
        """Number of members covering each cell."""
        cover = np.zeros(self.ambient.shape, dtype=np.int64)
        for s in self.sets:
            cover += s.cells
        return cover

    def residual_measure(self) -> float:
        return int(np.count_nonzero(self.coverage() == 0)) * self.ambient.cell_volume

    def subset(self, indices) -> "GridFamily":
        idx = list(indices)
        gens = None if self.generations_ is None else tuple(self.generations_[i] for i in idx)
        return GridFamily(self.ambient, tuple(self.sets[i] for i in idx), gens)

    def union(self, indices=None) -> GridSet:
        idx = range(len(self.sets)) if indices is None else indices
        cells = np.zeros(self.ambient.shape, dtype=bool)
        for i in idx:
            cells |= self.sets[i].cells
        return GridSet(self.ambient, cells)
