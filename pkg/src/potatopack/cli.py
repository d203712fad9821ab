"""Command-line interface.

Exit codes: 0 pass, 1 check failed, 2 usage or malformed input,
3 generation failure, 4 model/operation mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import document
from .divergence import boundary_window, perimeter_partial_sums
from .errors import GenerationError, ModelMismatchError
from .packing import (
    GasketConfig,
    GreedyConfig,
    TilingConfig,
    generate_gasket,
    generate_greedy,
    generate_square_tiling,
)
from .sets import TANGENCY_TOL, AmbientBox, DiskFamily

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GENERATION, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    tol_vol: float | None = None
    tol_area: float | None = None
    tangency_tol: float = TANGENCY_TOL
    resolution: int = 4096
    rng_seed: int | None = None
    out: str | None = None

    def __post_init__(self):
        for name in ("tol_vol", "tol_area", "tangency_tol"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise UsageError(f"{name} must be positive")
        if self.resolution < 1 or self.resolution & (self.resolution - 1):
            raise UsageError("resolution must be a power of 2")


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not serializable: {type(v).__name__}")


def _load(path: str):
    return document.load(path)


# -- generate ----------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "gasket":
        cfg = GasketConfig(args.seed_curvatures, args.depth, args.min_radius, args.max_count)
        family = generate_gasket(cfg)
        family.validate(args.tangency_tol)
        config = {"seed_curvatures": list(cfg.seed_curvatures), "max_depth": cfg.max_depth,
                  "min_radius": cfg.min_radius, "max_count": cfg.max_count}
        seed = None
    elif args.kind == "greedy":
        x0, y0, x1, y1 = args.box
        cfg = GreedyConfig(AmbientBox(2, (x0, y0), (x1, y1)), args.seed, args.count, args.samples,
                           args.min_radius)
        family = generate_greedy(cfg)
        family.validate(args.tangency_tol)
        config = {"box": list(args.box), "target_count": cfg.target_count,
                  "candidate_samples": cfg.candidate_samples, "min_radius": cfg.min_radius}
        seed = cfg.rng_seed
    else:
        cfg = TilingConfig(args.levels, args.resolution)
        family = generate_square_tiling(cfg)
        config = {"levels": cfg.levels, "resolution": cfg.grid_resolution}
        seed = None
    prov = {"generator": args.kind, "config": config, "rng_seed": seed}
    _emit(document.dumps(document.to_document(family, prov)), args.out)
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def _run_config(args, **extra) -> RunConfig:
    return RunConfig(
        tol_vol=getattr(args, "tol_vol", None),
        tol_area=getattr(args, "tol_area", None),
        tangency_tol=getattr(args, "tangency_tol", TANGENCY_TOL),
        out=getattr(args, "out", None),
        **extra,
    )


def cmd_verify(args) -> int:
    from .perimeter import axiom_suite
    from .theorem import member_perimeters, tail_union_check, validate_hypotheses

    if args.check == "axioms":
        result = axiom_suite(args.grid, args.trials, args.seed, args.dim)
        _emit(_json({"check": "axioms", "report": result}), args.out)
        return EXIT_OK if result["all_pass"] else EXIT_FAIL

    run = _run_config(args)
    family, prov = _load(args.input)
    base = {"check": args.check, "input": args.input, "config": asdict(run), "provenance": prov}
    if args.check == "hypotheses":
        report = validate_hypotheses(family, run.tol_vol, run.tol_area, run.tangency_tol)
        _emit(_json({**base, "report": report.to_dict()}), args.out)
        return EXIT_OK if report.all_pass else EXIT_FAIL
    if args.check == "divergence":
        window = None
        if args.window_radius is not None:
            window = boundary_window(family, args.window_radius, args.window_center)
        elif args.window_center is not None:
            raise UsageError("--window-center needs --window-radius")
        report = perimeter_partial_sums(family, window)
        if args.csv:
            Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        summary = report.summary()
        summary["expect"] = args.expect
        summary["window"] = None if window is None else {"center": list(window.center),
                                                         "radius": window.radius}
        _emit(_json({**base, "report": summary}), args.out)
        if args.expect is None:
            return EXIT_OK
        return EXIT_OK if report.verdict == args.expect else EXIT_FAIL
    if args.check == "tailunion":
        top = min(args.max_index, len(family))
        per = member_perimeters(family)
        checked = violations = equal = 0
        worst = 0.0
        first_violation = None
        for n in range(top):
            for m in range(n + 1, top + 1):
                t = tail_union_check(family, n, m, args.rel_tol, per)
                checked += 1
                equal += t.equal
                if t.rhs > 0:
                    worst = max(worst, abs(t.lhs - t.rhs) / t.rhs)
                if not t.holds:
                    violations += 1
                    first_violation = first_violation or [n, m, t.lhs, t.rhs]
        report = {"pairs": checked, "violations": violations, "equalities": equal,
                  "strict_inequalities": checked - equal, "max_relative_gap": worst,
                  "first_violation": first_violation, "max_index": top}
        _emit(_json({**base, "report": report}), args.out)
        return EXIT_OK if violations == 0 else EXIT_FAIL
    raise UsageError(f"unknown check {args.check!r}")


# -- slice / dimension -------------------------------------------------------


def _require_disks(family) -> DiskFamily:
    if not isinstance(family, DiskFamily):
        raise ModelMismatchError("this command needs a disk-model document")
    return family


def cmd_slice(args) -> int:
    from .slicing import crossing_statistics

    family, prov = _load(args.input)
    family = _require_disks(family)
    if args.lines < 100:
        raise UsageError("need at least 100 lines")
    stats = crossing_statistics(family, args.lines, args.seed, vertical=args.vertical)
    _emit(stats.to_csv(), args.out)
    summary = {"input": args.input, "config": {"lines": args.lines, "seed": args.seed, "vertical": args.vertical},
               "provenance": prov, "report": stats.summary()}
    if args.summary:
        Path(args.summary).write_text(_json(summary), encoding="utf-8")
    else:
        sys.stderr.write(_json(summary["report"]))
    return EXIT_OK if stats.within_3sigma and stats.parity_ok else EXIT_FAIL


def cmd_dimension(args) -> int:
    from .dimension import box_counting, parse_scales, rasterize_residual

    try:
        scales = parse_scales(args.scales)
    except ValueError as exc:
        raise UsageError(f"bad --scales {args.scales!r}") from exc
    if len(scales) < 4:
        raise UsageError("need at least 4 scales")
    run = RunConfig(resolution=args.resolution, out=args.out)
    family, prov = _load(args.input)
    family = _require_disks(family)
    residual = rasterize_residual(family, run.resolution, conservative=args.conservative)
    est = box_counting(residual, scales)
    _emit(est.to_csv(), args.out)
    summary = {"input": args.input, "config": {**asdict(run), "scales": scales, "conservative": args.conservative},
               "provenance": prov, "report": {**est.summary(), "lower_bound": family.dim - 1,
                                              "consistent": est.slope >= family.dim - 1}}
    if args.summary:
        Path(args.summary).write_text(_json(summary), encoding="utf-8")
    else:
        sys.stderr.write(_json(summary["report"]))
    return EXIT_OK if est.slope >= family.dim - 1 else EXIT_FAIL


# -- parser ------------------------------------------------------------------


def _tolerance_flags(p):
    p.add_argument("--tol-vol", type=float, default=None)
    p.add_argument("--tol-area", type=float, default=None)
    p.add_argument("--tangency-tol", type=float, default=TANGENCY_TOL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potatopack",
        description="Generate packings and check the perimeter divergence theorem numerically.",
        epilog="exit codes: 0 pass, 1 check failed, 2 usage, 3 generation, 4 model mismatch",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a PackingDocument")
    gsub = gen.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("gasket")
    g.add_argument("--depth", type=int, default=6)
    g.add_argument("--seed-curvatures", type=_floats, default=(-1.0, 2.0, 2.0))
    g.add_argument("--min-radius", type=float, default=1e-9)
    g.add_argument("--max-count", type=int, default=2_000_000)
    g.add_argument("--tangency-tol", type=float, default=TANGENCY_TOL)
    g.add_argument("--out")
    g = gsub.add_parser("greedy")
    g.add_argument("--count", type=int, default=200)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--samples", type=int, default=64)
    g.add_argument("--min-radius", type=float, default=1e-6)
    g.add_argument("--box", type=_floats, default=(0.0, 0.0, 1.0, 1.0))
    g.add_argument("--tangency-tol", type=float, default=TANGENCY_TOL)
    g.add_argument("--out")
    g = gsub.add_parser("squares")
    g.add_argument("--levels", type=int, default=1)
    g.add_argument("--resolution", type=int, default=None)
    g.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser("verify", help="run theorem checks")
    vsub = ver.add_subparsers(dest="check", required=True)
    v = vsub.add_parser("hypotheses")
    v.add_argument("input")
    _tolerance_flags(v)
    v.add_argument("--out")
    v = vsub.add_parser("divergence")
    v.add_argument("input")
    v.add_argument("--expect", choices=("divergent", "finite"))
    v.add_argument("--window-radius", type=float, default=None,
                   help="restrict perimeters to an open disk of this radius")
    v.add_argument("--window-center", type=_floats, default=None,
                   help="x,y of the window (default: contact of the two largest disks)")
    v.add_argument("--csv")
    v.add_argument("--out")
    v = vsub.add_parser("tailunion")
    v.add_argument("input")
    v.add_argument("--max-index", type=int, default=100)
    v.add_argument("--rel-tol", type=float, default=1e-9)
    _tolerance_flags(v)
    v.add_argument("--out")
    v = vsub.add_parser("axioms")
    v.add_argument("--grid", type=int, default=128)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--out")
    ver.set_defaults(func=cmd_verify)

    s = sub.add_parser("slice", help="random line slicing statistics (CSV)")
    s.add_argument("input")
    s.add_argument("--lines", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--vertical", action="store_true", help="slice with vertical lines")
    s.add_argument("--out")
    s.add_argument("--summary")
    s.set_defaults(func=cmd_slice)

    d = sub.add_parser("dimension", help="box-counting dimension of the residual (CSV)")
    d.add_argument("input")
    d.add_argument("--scales", default="5:10")
    d.add_argument("--resolution", type=int, default=4096)
    d.add_argument("--conservative", action="store_true")
    d.add_argument("--out")
    d.add_argument("--summary")
    d.set_defaults(func=cmd_dimension)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (UsageError, document.DocumentError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
