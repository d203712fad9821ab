"""Hypothesis validation and finite-stage certificates for packing families.

A family passes (i) if members overlap on a null set, (ii) if it leaves a
null residual, (iii) if members touch on sets of zero length, and (iv) if at
least two members have positive measure.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .errors import ModelMismatchError
from .perimeter import disk_perimeter, face_count, union_perimeter
from .sets import TANGENCY_TOL, DiskFamily, GridFamily

PASS, FAIL, ASYMPTOTIC = "pass", "fail", "asymptotic"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.status in (PASS, ASYMPTOTIC)


@dataclass(frozen=True)
class HypothesisReport:
    model: str
    count: int
    pairwise_overlap_max: float
    residual_measure: float
    kissing_max: float
    positive_measure_count: int
    tol_vol: float
    tol_area: float
    overlap: Verdict
    residual: Verdict
    kissing: Verdict
    positivity: Verdict
    notes: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(v.ok for v in (self.overlap, self.residual, self.kissing, self.positivity))

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("overlap", "residual", "kissing", "positivity"):
            v = getattr(self, key)
            out[key] = {"status": v.status, "witness": list(v.witness) if v.witness else None}
        for key in ("pairwise_overlap_max", "kissing_max"):
            if math.isinf(out[key]):
                out[key] = "inf"
        out["all_pass"] = self.all_pass
        return out


def default_tolerances(family) -> tuple[float, float]:
    """One quantum of the discretization: ``(tol_vol, tol_area)``.

    Grid quantities are exact integers times a cell volume or face area, so
    half a quantum separates zero from non-zero without ambiguity.
    """
    if isinstance(family, GridFamily):
        return 0.5 * family.ambient.cell_volume, 0.5 * family.ambient.face_area
    vol = family.ambient_volume
    return 1e-9 * vol, 1e-9 * math.sqrt(vol)


def lens_area(r1: float, r2: float, d: float) -> float:
    """Area of the intersection of two disks with center distance ``d``."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = math.acos(max(-1.0, min(1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1))))
    a2 = math.acos(max(-1.0, min(1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2))))
    k = 0.5 * math.sqrt(max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)))
    return r1 * r1 * a1 + r2 * r2 * a2 - k


def _validate_disks(family: DiskFamily, tol_vol, tol_area, rel_tol):
    ii, jj = kernels.overlapping_pairs(family.x, family.y, family.r, rel_tol)
    x, y, r = family.x, family.y, family.r
    ids = [d.id for d in family.disks]
    overlap_max, overlap_pair, overlap_sum = 0.0, None, 0.0
    for i, j in zip(ii, jj):
        area = lens_area(r[i], r[j], math.hypot(x[i] - x[j], y[i] - y[j]))
        overlap_sum += area
        if overlap_pair is None or area > overlap_max:
            overlap_max, overlap_pair = area, (ids[i], ids[j])
    kissing_max = math.inf if len(ii) else 0.0
    kissing_pair = (ids[ii[0]], ids[jj[0]]) if len(ii) else None
    # inclusion-exclusion truncated at pairs; exact when no triple overlaps
    residual = max(0.0, family.residual_measure() + overlap_sum)
    residual_prev = None
    gmax = int(family.generations.max()) if len(family) else 0
    if gmax > 0:
        prev = family.up_to_generation(gmax - 1)
        residual_prev = prev.residual_measure()
    return overlap_max, overlap_pair, residual, residual_prev, kissing_max, kissing_pair


def _validate_grid(family: GridFamily):
    amb = family.ambient
    labels = np.full(amb.shape, -1, dtype=np.int64)
    cover = np.zeros(amb.shape, dtype=np.int64)
    for k, s in enumerate(family.sets):
        cover += s.cells
        labels[s.cells] = k
    overlap_cells, overlap_pair = 0, None
    if np.any(cover > 1):
        multi = cover > 1
        touching = [k for k, s in enumerate(family.sets) if np.any(s.cells & multi)]
        for a_pos, a in enumerate(touching):
            for b in touching[a_pos + 1:]:
                n = int(np.count_nonzero(family.sets[a].cells & family.sets[b].cells))
                if n > overlap_cells:
                    overlap_cells, overlap_pair = n, (a, b)
    residual_cells = int(np.count_nonzero(cover == 0))
    # shared faces between distinct labels, tallied per unordered pair
    n = max(1, len(family))
    codes = []
    for axis in range(amb.dim):
        lo = [slice(None)] * amb.dim
        hi = [slice(None)] * amb.dim
        lo[axis], hi[axis] = slice(None, -1), slice(1, None)
        la, lb = labels[tuple(lo)], labels[tuple(hi)]
        sel = (la >= 0) & (lb >= 0) & (la != lb)
        pa, pb = np.minimum(la[sel], lb[sel]), np.maximum(la[sel], lb[sel])
        codes.append(pa * n + pb)
    codes = np.concatenate(codes) if codes else np.empty(0, dtype=np.int64)
    kiss_faces, kiss_pair = 0, None
    if len(codes):
        uniq, counts = np.unique(codes, return_counts=True)
        best = int(np.argmax(counts))
        kiss_faces = int(counts[best])
        kiss_pair = (int(uniq[best] // n), int(uniq[best] % n))
    return overlap_cells, overlap_pair, residual_cells, kiss_faces, kiss_pair


def validate_hypotheses(family, tol_vol: float | None = None, tol_area: float | None = None,
                        rel_tol: float = TANGENCY_TOL) -> HypothesisReport:
    """Check hypotheses (i)-(iv) on a finite family and report witnesses.

    For disk families a positive residual that shrank across the last two
    generations is reported as ``asymptotic``: a finite prefix of a gap-free
    packing can never have zero residual.
    """
    if len(family) == 0:
        raise ValueError("empty family")
    dv, da = default_tolerances(family)
    tol_vol = dv if tol_vol is None else tol_vol
    tol_area = da if tol_area is None else tol_area
    notes: list[str] = []
    measures = family.measures()
    positive = int(np.count_nonzero(measures > tol_vol))
    if isinstance(family, DiskFamily):
        ov, ov_pair, residual, residual_prev, kiss, kiss_pair = _validate_disks(family, tol_vol, tol_area, rel_tol)
        if residual <= tol_vol:
            res_status = PASS
        elif residual_prev is not None and residual < residual_prev:
            res_status = ASYMPTOTIC
            notes.append(f"residual {residual:.6g} decreased from {residual_prev:.6g} over the last generation")
        else:
            res_status = FAIL
    elif isinstance(family, GridFamily):
        ov_cells, ov_pair, res_cells, kiss_faces, kiss_pair = _validate_grid(family)
        ov = ov_cells * family.ambient.cell_volume
        residual = res_cells * family.ambient.cell_volume
        kiss = kiss_faces * family.ambient.face_area
        res_status = PASS if residual <= tol_vol else FAIL
    else:
        raise ModelMismatchError(f"unsupported family {type(family).__name__}")
    pos_ids = [i for i in np.nonzero(measures > tol_vol)[0][:2]]
    return HypothesisReport(
        model=family.model,
        count=len(family),
        pairwise_overlap_max=float(ov),
        residual_measure=float(residual),
        kissing_max=float(kiss),
        positive_measure_count=positive,
        tol_vol=tol_vol,
        tol_area=tol_area,
        overlap=Verdict(PASS if ov <= tol_vol else FAIL, None if ov <= tol_vol else ov_pair),
        residual=Verdict(res_status),
        kissing=Verdict(PASS if kiss <= tol_area else FAIL, None if kiss <= tol_area else kiss_pair),
        positivity=Verdict(PASS if positive >= 2 else FAIL,
                           (int(pos_ids[0]), int(pos_ids[1])) if positive >= 2 else None),
        notes=notes,
    )


@dataclass(frozen=True)
class TailUnion:
    n: int
    m: int
    lhs: float  # perimeter of the union of members n+1..m
    rhs: float  # sum of their perimeters
    holds: bool
    equal: bool


def member_perimeters(family, window=None) -> np.ndarray:
    """Perimeter of every member, in family order (disks clipped to ``window``)."""
    if isinstance(family, DiskFamily):
        return disk_perimeter(family, family.ambient if window is None else window)
    if isinstance(family, GridFamily):
        return np.array([face_count(s) for s in family.sets], dtype=float) * family.ambient.face_area
    raise ModelMismatchError(f"unsupported family {type(family).__name__}")


def tail_union_check(family, n: int, m: int, rel_tol: float = 1e-9, perimeters=None) -> TailUnion:
    """Compare ``P(E_{n+1} | ... | E_m)`` with ``sum P(E_i)``, members 1-based.

    ``holds`` is the subadditivity bound ``lhs <= rhs``; ``equal`` reports
    equality within ``rel_tol`` (expected when members only touch at points).
    """
    if not (0 <= n < m <= len(family)):
        raise IndexError(f"need 0 <= n < m <= {len(family)}, got n={n}, m={m}")
    if perimeters is None:
        perimeters = member_perimeters(family)
    rhs = float(np.sum(perimeters[n:m]))
    if isinstance(family, GridFamily):
        lhs = face_count(family.union(range(n, m))) * family.ambient.face_area
    else:
        lhs = union_perimeter(family.disks[n:m], family.ambient)
    slack = rel_tol * max(abs(rhs), 1e-300)
    return TailUnion(n, m, lhs, rhs, lhs <= rhs + slack, abs(lhs - rhs) <= slack)


def degenerate_case_check(family: GridFamily) -> bool:
    """Finite form of the degenerate-cover statement.

    For an exact cover of the box, ``P(union) = 0``. Superadditivity
    ``P(union) >= sum P(E_i)`` would then force every member perimeter to 0.
    Returns True when the family is consistent with that: either all member
    perimeters vanish, or superadditivity fails.
    """
    if not isinstance(family, GridFamily):
        raise ModelMismatchError("exact covers are only realizable on grids")
    union = family.union()
    if union.count != union.cells.size:
        raise ValueError("family does not cover the ambient box")
    p_union = face_count(union)
    faces = [face_count(s) for s in family.sets]
    if all(f == 0 for f in faces):
        return True
    return p_union < sum(faces)
