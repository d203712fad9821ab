"""Partial perimeter sums, diameter sums and a desk-scale divergence verdict.

A finite run cannot prove a series diverges. The verdict used here is a
non-summability signature: per-generation increments of the partial sums do
not shrink (consecutive ratios stay above ``RATIO_THRESHOLD`` over the last
four generations).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelMismatchError
from .sets import DiskFamily, GridFamily, OuterDisk
from .theorem import member_perimeters

RATIO_THRESHOLD = 0.9
RATIO_WINDOW = 4  # generations inspected by the ratio test

DIVERGENT, FINITE, INCONCLUSIVE = "divergent", "finite", "inconclusive"


@dataclass(frozen=True)
class GrowthFit:
    law: str  # "power" | "exponential"
    exponent: float  # b of a*g**b, or c of a*exp(c*g)
    r2: float
    ratios: tuple[float, ...]
    verdict: str


@dataclass
class DivergenceReport:
    ids: np.ndarray
    generations: np.ndarray
    sizes: np.ndarray  # radius for disks, diameter for grid sets
    increments: np.ndarray  # per-member perimeter inside the window
    partial_sums: np.ndarray  # S_n
    diameter_sums: np.ndarray  # D_n
    generation_increments: dict[int, float]
    dim: int
    exponent: float
    verdict: str = INCONCLUSIVE
    reason: str = ""
    fit: GrowthFit | None = None
    extras: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "id", "generation", "radius_or_diam", "perim_increment", "S_n", "D_n"])
        for k in range(len(self.ids)):
            w.writerow([
                k + 1,
                int(self.ids[k]),
                int(self.generations[k]),
                repr(float(self.sizes[k])),
                repr(float(self.increments[k])),
                repr(float(self.partial_sums[k])),
                repr(float(self.diameter_sums[k])),
            ])
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "count": int(len(self.ids)),
            "S_final": float(self.partial_sums[-1]) if len(self.ids) else 0.0,
            "D_final": float(self.diameter_sums[-1]) if len(self.ids) else 0.0,
            "generation_increments": {str(k): v for k, v in self.generation_increments.items()},
            "verdict": self.verdict,
            "reason": self.reason,
        }
        if self.fit is not None:
            out["fit"] = {
                "law": self.fit.law,
                "exponent": self.fit.exponent,
                "r2": self.fit.r2,
                "ratios": list(self.fit.ratios),
            }
        out.update(self.extras)
        return out


def diameters(family) -> np.ndarray:
    """``2r`` for disks; bounding-box diagonal for grid sets."""
    if isinstance(family, DiskFamily):
        return 2.0 * family.r
    if isinstance(family, GridFamily):
        h = family.ambient.h
        out = np.zeros(len(family))
        for k, s in enumerate(family.sets):
            bb = s.bounding_box()
            if bb is not None:
                out[k] = h * math.sqrt(sum((b - a) ** 2 for a, b in zip(*bb)))
        return out
    raise ModelMismatchError(f"unsupported family {type(family).__name__}")


def _ids(family) -> np.ndarray:
    if isinstance(family, DiskFamily):
        return np.array([d.id for d in family.disks], dtype=np.int64)
    return np.arange(len(family), dtype=np.int64)


def _per_generation(gens: np.ndarray, values: np.ndarray) -> dict[int, float]:
    out: dict[int, float] = {}
    for g in np.unique(gens):
        out[int(g)] = float(np.sum(values[gens == g]))
    return out


def fit_growth(S, marks) -> GrowthFit:
    """Fit partial sums at generation boundaries to power and exponential laws.

    ``marks`` are the 0-based indices into ``S`` where each generation ends.
    The better-R² law is returned with the ratio test on the increments
    between consecutive marks.
    """
    S = np.asarray(S, dtype=float)
    marks = np.asarray(marks, dtype=np.int64)
    if len(marks) < 5:
        raise ValueError("need at least 5 generation marks")
    vals = S[marks]
    if np.any(vals <= 0) or np.any(np.diff(vals) < 0) or np.ptp(vals) == 0:
        raise ValueError("degenerate partial-sum sequence")
    g = np.arange(1, len(vals) + 1, dtype=float)
    logS = np.log(vals)

    def r2(x, y):
        coef = np.polyfit(x, y, 1)
        resid = y - np.polyval(coef, x)
        ss = float(np.sum((y - y.mean()) ** 2))
        return float(coef[0]), (1.0 - float(np.sum(resid**2)) / ss) if ss > 0 else 1.0

    b, r2_pow = r2(np.log(g), logS)
    c, r2_exp = r2(g, logS)
    law, exponent, best = ("power", b, r2_pow) if r2_pow >= r2_exp else ("exponential", c, r2_exp)
    inc = np.diff(np.concatenate([[0.0], vals]))
    tail = inc[-RATIO_WINDOW:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tuple(float(v) for v in tail[1:] / tail[:-1])
    divergent = all(math.isfinite(q) and q >= RATIO_THRESHOLD for q in ratios)
    return GrowthFit(law, exponent, best, ratios, DIVERGENT if divergent else FINITE)


def _generation_marks(gens: np.ndarray) -> np.ndarray:
    if len(gens) == 0:
        return np.empty(0, dtype=np.int64)
    change = np.nonzero(np.diff(gens) != 0)[0]
    return np.concatenate([change, [len(gens) - 1]]).astype(np.int64)


def _verdict(report: DivergenceReport, family) -> None:
    if isinstance(family, GridFamily) and family.residual_measure() == 0:
        report.verdict = FINITE
        report.reason = "family covers the box exactly; the partial sums have reached their total"
        return
    gens = report.generations
    if len(gens) and np.any(np.diff(gens) < 0):
        report.reason = "enumeration is not generation-major"
        return
    marks = _generation_marks(gens)
    if len(marks) < 5:
        report.reason = f"only {len(marks)} generations; the ratio test needs 5"
        return
    report.fit = fit_growth(report.partial_sums, marks)
    report.verdict = report.fit.verdict
    report.reason = (
        f"last increment ratios {', '.join(f'{q:.4g}' for q in report.fit.ratios)} "
        f"vs threshold {RATIO_THRESHOLD}"
    )


def boundary_window(family: DiskFamily, radius: float, center=None) -> OuterDisk:
    """Open disk window of ``radius`` around a boundary point of the packing.

    The default center is the contact point of the two largest disks, which
    lies on the boundary of both.
    """
    if not isinstance(family, DiskFamily):
        raise ModelMismatchError("windows apply to disk families")
    if not radius > 0:
        raise ValueError("window radius must be positive")
    if center is None:
        if len(family) < 2:
            raise ValueError("default window center needs two disks")
        a, b = (family[int(i)] for i in np.argsort(-family.r, kind="stable")[:2])
        t = a.r / (a.r + b.r)
        center = (a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    return OuterDisk(tuple(float(c) for c in center), float(radius))


def perimeter_partial_sums(family, window=None, exponent: float | None = None) -> DivergenceReport:
    """Partial sums ``S_n`` of member perimeters (inside ``window``) in family order.

    The report also carries the diameter sums, so one pass gives both series.
    """
    if len(family) == 0:
        raise ValueError("empty family")
    per = member_perimeters(family, window)
    dim = family.dim
    exponent = dim - 1 if exponent is None else exponent
    diam = diameters(family)
    gens = family.generations
    report = DivergenceReport(
        ids=_ids(family),
        generations=gens,
        sizes=family.r if isinstance(family, DiskFamily) else diam,
        increments=per,
        partial_sums=np.cumsum(per),
        diameter_sums=np.cumsum(diam**exponent),
        generation_increments=_per_generation(gens, per),
        dim=dim,
        exponent=exponent,
    )
    _verdict(report, family)
    return report


def diameter_partial_sums(family, exponent: float | None = None) -> DivergenceReport:
    """Partial sums ``D_n`` of ``diam(E_k) ** exponent`` (default ``d - 1``)."""
    dim = family.dim
    exponent = dim - 1 if exponent is None else exponent
    diam = diameters(family)
    gens = family.generations
    terms = diam**exponent
    D = np.cumsum(terms)
    report = DivergenceReport(
        ids=_ids(family),
        generations=gens,
        sizes=family.r if isinstance(family, DiskFamily) else diam,
        increments=terms,
        partial_sums=D,
        diameter_sums=D,
        generation_increments=_per_generation(gens, terms),
        dim=dim,
        exponent=exponent,
    )
    if len(family):
        _verdict(report, family)
    return report
