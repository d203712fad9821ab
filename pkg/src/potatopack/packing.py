"""Packing generators: Apollonian gaskets, greedy disk packings, square tilings."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError
from .sets import AmbientBox, Disk, DiskFamily, GridFamily, GridSet, OuterDisk

CENTER_TOL = 1e-7
DEDUPE_GRID = 1e-9


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1/-1, got {sign!r}")


def descartes_next(k1: float, k2: float, k3: float, sign=1) -> float:
    """Curvature of a fourth circle tangent to three mutually tangent ones."""
    disc = k1 * k2 + k2 * k3 + k3 * k1
    if disc < 0:
        # roundoff on a zero discriminant
        if disc > -1e-12 * max(abs(k1 * k2), abs(k2 * k3), abs(k3 * k1), 1.0):
            disc = 0.0
        else:
            raise ValueError(f"negative discriminant {disc} for curvatures {(k1, k2, k3)}")
    return k1 + k2 + k3 + _sign(sign) * 2.0 * math.sqrt(disc)


def _as_complex(c) -> complex:
    if isinstance(c, complex):
        return c
    return complex(float(c[0]), float(c[1]))


def _tangent_to(z4: complex, k4: float, z: complex, k: float) -> bool:
    expected = abs(1.0 / k4 + 1.0 / k) if k != 0 else None
    if expected is None:
        return False
    scale = max(abs(1.0 / k4), abs(1.0 / k))
    return abs(abs(z4 - z) - expected) <= CENTER_TOL * scale


def descartes_center(circles, k4: float, sign=1) -> tuple[float, float]:
    """Center of the circle of curvature ``k4`` tangent to three given circles.

    ``circles`` holds three ``(center, curvature)`` pairs with centers as
    ``(x, y)`` or complex. The complex Descartes relation yields two candidate
    centers; the one picked by ``sign`` is returned if it is tangent to all
    three inputs, otherwise the other one is tried.
    """
    (z1, k1), (z2, k2), (z3, k3) = [(_as_complex(c), float(k)) for c, k in circles]
    if k4 == 0:
        raise ValueError("straight lines are not supported")
    lin = k1 * z1 + k2 * z2 + k3 * z3
    root = 2.0 * cmath.sqrt(k1 * k2 * z1 * z2 + k2 * k3 * z2 * z3 + k3 * k1 * z3 * z1)
    s = _sign(sign)
    for cand in ((lin + s * root) / k4, (lin - s * root) / k4):
        if all(_tangent_to(cand, k4, z, k) for z, k in ((z1, k1), (z2, k2), (z3, k3))):
            return (cand.real, cand.imag)
    raise ValueError("no tangency-consistent center for this curvature")


@dataclass(frozen=True)
class GasketConfig:
    seed_curvatures: tuple[float, float, float] = (-1.0, 2.0, 2.0)
    max_depth: int = 6
    min_radius: float = 1e-9
    max_count: int = 2_000_000

    def __post_init__(self):
        k = tuple(float(v) for v in self.seed_curvatures)
        object.__setattr__(self, "seed_curvatures", k)
        if len(k) != 3:
            raise ValueError("need three seed curvatures")
        if sum(1 for v in k if v < 0) != 1 or any(v == 0 for v in k):
            raise ValueError("seed needs exactly one negative (outer) curvature and two positive ones")
        if k[0] * k[1] + k[1] * k[2] + k[2] * k[0] < -1e-12:
            raise ValueError("seed curvatures admit no real Descartes solution")
        outer = min(k)
        if any(v <= -outer for v in k if v > 0):
            raise ValueError("inner seed circles must be smaller than the outer circle")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not self.min_radius > 0:
            raise ValueError("min_radius must be positive")
        if self.max_count < 2:
            raise ValueError("max_count must be >= 2")


@dataclass
class _Circle:
    k: float
    z: complex
    generation: int
    parents: tuple[int, ...] = ()
    key: int = -1  # construction index; -1 is the outer circle

    @property
    def r(self) -> float:
        return abs(1.0 / self.k)


def _dedupe_key(z: complex, r: float) -> tuple[int, int, int]:
    return (round(z.real / DEDUPE_GRID), round(z.imag / DEDUPE_GRID), round(r / DEDUPE_GRID))


def generate_gasket(cfg: GasketConfig) -> DiskFamily:
    """Apollonian gasket by breadth-first Descartes recursion.

    The outer seed circle is the ambient disk, centered at the origin. Output
    is sorted by generation, then radius descending; ``parents`` lists the
    three circles each new circle is inscribed against (-1 = ambient circle).
    """
    ks = list(cfg.seed_curvatures)
    ko = min(ks)
    ks.remove(ko)
    ka, kb = ks
    R, ra, rb = -1.0 / ko, 1.0 / ka, 1.0 / kb
    if ra + rb > R * (1 + 1e-12):
        raise ValueError("inner seed circles do not fit inside the outer circle")
    a = R - ra
    dB, dAB = R - rb, ra + rb
    bx = (dAB * dAB - dB * dB - a * a) / (2.0 * a)
    by = math.sqrt(max(0.0, dB * dB - bx * bx))
    outer = _Circle(ko, 0j, -1, (), -1)
    A = _Circle(ka, complex(-a, 0.0), 0, (), 0)
    B = _Circle(kb, complex(bx, by), 0, (), 1)
    circles = [A, B]
    seen = {_dedupe_key(c.z, c.r) for c in circles}
    gaps: list[tuple[_Circle, _Circle, _Circle, _Circle]] = []

    def emit(c: _Circle) -> bool:
        if c.r < cfg.min_radius:
            return False
        key = _dedupe_key(c.z, c.r)
        if key in seen:
            return False
        if len(circles) >= cfg.max_count:
            raise GenerationError(f"count overflow: more than {cfg.max_count} circles")
        seen.add(key)
        c.key = len(circles)
        circles.append(c)
        return True

    if cfg.max_depth >= 1:
        triple = ((outer.z, ko), (A.z, ka), (B.z, kb))
        first = []
        for ksign in (1, -1):
            k4 = descartes_next(ko, ka, kb, ksign)
            if k4 <= 0:
                continue
            for zsign in (1, -1):
                try:
                    x, y = descartes_center(triple, k4, zsign)
                except ValueError:
                    continue
                c = _Circle(k4, complex(x, y), 1, (-1, 0, 1))
                if emit(c):
                    first.append(c)
        if len(first) != 2:
            raise GenerationError(f"seed produced {len(first)} first-generation circles, expected 2")
        for c in first:
            gaps += [(outer, A, c, B), (outer, B, c, A), (A, B, c, outer)]

    for g in range(2, cfg.max_depth + 1):
        nxt = []
        for p, q, s, opp in gaps:
            k = 2.0 * (p.k + q.k + s.k) - opp.k
            kz = 2.0 * (p.k * p.z + q.k * q.z + s.k * s.z) - opp.k * opp.z
            c = _Circle(k, kz / k, g, (p.key, q.key, s.key))
            if emit(c):
                nxt += [(p, q, c, s), (p, s, c, q), (q, s, c, p)]
        gaps = nxt
        if not gaps:
            break

    order = sorted(circles, key=lambda c: (c.generation, -c.r, c.z.real, c.z.imag))
    new_id = {c.key: i for i, c in enumerate(order)}
    new_id[-1] = -1
    disks = tuple(
        Disk(i, c.z.real, c.z.imag, c.r, c.generation, tuple(sorted(new_id[p] for p in c.parents)))
        for i, c in enumerate(order)
    )
    return DiskFamily(OuterDisk((0.0, 0.0), R), disks)


def tangency_residuals(family: DiskFamily) -> np.ndarray:
    """Relative distance error of every designed tangency in a gasket.

    Covers each circle against its parents and the generation-0 seeds against
    each other and the outer circle. Entries are ``|dist - target| / max radius``.
    """
    outer = family.ambient
    ox, oy = outer.center
    R = outer.radius
    rmax = float(family.r.max()) if len(family) else 1.0
    pairs = [(d.id, p) for d in family for p in d.parents]
    seeds = [d.id for d in family if d.generation == 0]
    pairs += [(i, -1) for i in seeds] + [(i, j) for k, i in enumerate(seeds) for j in seeds[k + 1:]]
    out = np.empty(len(pairs))
    for k, (i, j) in enumerate(pairs):
        a = family[i]
        if j == -1:
            dist, target = math.hypot(a.x - ox, a.y - oy), R - a.r
        else:
            b = family[j]
            dist, target = math.hypot(a.x - b.x, a.y - b.y), a.r + b.r
        out[k] = abs(dist - target) / rmax
    return out


def gasket_count(depth: int) -> int:
    """Number of inner circles of a full gasket at ``depth`` (no radius cutoff)."""
    return 2 if depth == 0 else 3**depth + 1


@dataclass(frozen=True)
class GreedyConfig:
    ambient: AmbientBox = field(default_factory=lambda: AmbientBox.unit(2))
    rng_seed: int = 0
    target_count: int = 200
    candidate_samples: int = 64
    min_radius: float = 1e-6

    def __post_init__(self):
        if self.ambient.dim != 2:
            raise ValueError("greedy packings are planar")
        if self.target_count < 2:
            raise ValueError("target_count must be >= 2")
        if self.candidate_samples < 1:
            raise ValueError("candidate_samples must be >= 1")
        if not self.min_radius > 0:
            raise ValueError("min_radius must be positive")


def generate_greedy(cfg: GreedyConfig) -> DiskFamily:
    """Greedy packing: each step places the largest disk over a candidate batch.

    Candidates are uniform in the box and rejected while inside a placed disk.
    A candidate's radius is its distance to the nearest obstacle (disk boundary
    or wall), so each new disk touches its binding obstacle.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    (x0, y0), (x1, y1) = cfg.ambient.min_corner, cfg.ambient.max_corner
    xs = np.empty(0)
    ys = np.empty(0)
    rs = np.empty(0)
    disks: list[Disk] = []
    max_draws = 10_000 * cfg.candidate_samples
    for n in range(cfg.target_count):
        cand_x: list[np.ndarray] = []
        cand_y: list[np.ndarray] = []
        found = draws = 0
        while found < cfg.candidate_samples and draws < max_draws:
            m = cfg.candidate_samples
            px = rng.uniform(x0, x1, m)
            py = rng.uniform(y0, y1, m)
            draws += m
            if len(rs):
                d = np.hypot(px[:, None] - xs[None, :], py[:, None] - ys[None, :])
                ok = np.all(d >= rs[None, :], axis=1)
                px, py = px[ok], py[ok]
            take = min(len(px), cfg.candidate_samples - found)
            cand_x.append(px[:take])
            cand_y.append(py[:take])
            found += take
        if found == 0:
            raise GenerationError(f"cannot place disk {n}: residual exhausted")
        px = np.concatenate(cand_x)
        py = np.concatenate(cand_y)
        walls = np.minimum.reduce([px - x0, x1 - px, py - y0, y1 - py])
        radius = walls
        binding = np.full(len(px), -1)
        if len(rs):
            gap = np.hypot(px[:, None] - xs[None, :], py[:, None] - ys[None, :]) - rs[None, :]
            j = np.argmin(gap, axis=1)
            g = gap[np.arange(len(px)), j]
            closer = g < walls
            radius = np.where(closer, g, walls)
            binding = np.where(closer, j, -1)
        best = int(np.argmax(radius))
        rad = float(radius[best])
        if rad < cfg.min_radius:
            raise GenerationError(f"cannot place disk {n}: best radius {rad} below floor")
        gen = (n + 1).bit_length() - 1
        disks.append(Disk(n, float(px[best]), float(py[best]), rad, gen, (int(binding[best]),)))
        xs = np.append(xs, px[best])
        ys = np.append(ys, py[best])
        rs = np.append(rs, rad)
    return DiskFamily(cfg.ambient, tuple(disks))


@dataclass(frozen=True)
class TilingConfig:
    levels: int = 1
    resolution: int | None = None

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        res = self.grid_resolution
        if res < 1 or res % (2**self.levels):
            raise ValueError(f"resolution {res} is not divisible by 2**levels")

    @property
    def grid_resolution(self) -> int:
        return self.resolution if self.resolution is not None else 2**self.levels


def generate_square_tiling(cfg: TilingConfig) -> GridFamily:
    """Unit square cut into ``4**levels`` equal squares, row-major order.

    Adjacent squares share whole faces, so this family deliberately violates
    the zero-contact hypothesis while covering the box exactly.
    """
    res = cfg.grid_resolution
    amb = AmbientBox.unit(2, res)
    n = 2**cfg.levels
    side = res // n
    sets = tuple(
        GridSet.from_box(amb, (i * side, j * side), ((i + 1) * side, (j + 1) * side))
        for i in range(n)
        for j in range(n)
    )
    return GridFamily(amb, sets)
