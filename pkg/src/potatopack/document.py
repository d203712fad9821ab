"""PackingDocument: the JSON interchange format for packing families.

Floats are written with Python's shortest round-trip ``repr``, so
load -> dump reproduces a file byte for byte.
"""
from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import Any

import numpy as np

from .sets import AmbientBox, Disk, DiskFamily, GridFamily, GridSet, OuterDisk

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed or inconsistent PackingDocument."""


def _ambient_to_dict(amb) -> dict:
    if isinstance(amb, OuterDisk):
        return {"kind": "disk", "params": {"center": list(amb.center), "radius": amb.radius}}
    return {
        "kind": "box",
        "params": {
            "min_corner": list(amb.min_corner),
            "max_corner": list(amb.max_corner),
            "resolution": amb.resolution,
        },
    }


def _ambient_from_dict(d: dict):
    kind, p = d["kind"], d["params"]
    if kind == "disk":
        return OuterDisk(tuple(p["center"]), p["radius"])
    if kind == "box":
        mn = p["min_corner"]
        return AmbientBox(len(mn), tuple(mn), tuple(p["max_corner"]), int(p.get("resolution", 1)))
    raise DocumentError(f"unknown ambient kind {kind!r}")


def _gridset_to_dict(k: int, s: GridSet, generation: int) -> dict:
    if s.is_box():
        lo, hi = s.bounding_box()
        geometry = {"lo": list(lo), "hi": list(hi)}
        kind = "cellbox"
    else:
        packed = np.packbits(s.cells.ravel())
        geometry = {"encoding": "packbits-base64", "data": base64.b64encode(packed.tobytes()).decode("ascii")}
        kind = "bitmap"
    return {"id": k, "kind": kind, "geometry": geometry, "generation": generation, "parents": []}


def _gridset_from_dict(amb: AmbientBox, d: dict) -> GridSet:
    g = d["geometry"]
    if d["kind"] == "cellbox":
        return GridSet.from_box(amb, g["lo"], g["hi"])
    if d["kind"] == "bitmap":
        if g.get("encoding") != "packbits-base64":
            raise DocumentError(f"unknown bitmap encoding {g.get('encoding')!r}")
        raw = np.frombuffer(base64.b64decode(g["data"]), dtype=np.uint8)
        n = int(np.prod(amb.shape))
        bits = np.unpackbits(raw)[:n]
        if len(bits) != n:
            raise DocumentError("bitmap shorter than the grid")
        return GridSet(amb, bits.reshape(amb.shape).astype(bool))
    raise DocumentError(f"unknown grid set kind {d['kind']!r}")


def to_document(family, provenance: dict | None = None) -> dict:
    """Serialize a family to a PackingDocument dict."""
    if isinstance(family, DiskFamily):
        sets = [
            {
                "id": k,
                "kind": "disk",
                "geometry": {"center": [d.x, d.y], "radius": d.r},
                "generation": d.generation,
                "parents": list(d.parents),
            }
            for k, d in enumerate(family.disks)
        ]
        model = "disks"
    elif isinstance(family, GridFamily):
        gens = family.generations
        sets = [_gridset_to_dict(k, s, int(gens[k])) for k, s in enumerate(family.sets)]
        model = "grid"
    else:
        raise TypeError(f"cannot serialize {type(family).__name__}")
    prov = {"generator": None, "config": {}, "rng_seed": None}
    prov.update(provenance or {})
    return {
        "format_version": FORMAT_VERSION,
        "model": model,
        "ambient": _ambient_to_dict(family.ambient),
        "sets": sets,
        "provenance": prov,
    }


def from_document(doc: dict) -> tuple[Any, dict]:
    """Rebuild ``(family, provenance)`` from a PackingDocument dict."""
    try:
        if doc.get("format_version") != FORMAT_VERSION:
            raise DocumentError(f"unsupported format_version {doc.get('format_version')!r}")
        amb = _ambient_from_dict(doc["ambient"])
        sets = doc["sets"]
        ids = [s["id"] for s in sets]
        if ids != list(range(len(sets))):
            raise DocumentError("set ids must be unique and dense from 0")
        model = doc["model"]
        if model == "disks":
            disks = []
            for s in sets:
                if s["kind"] != "disk":
                    raise DocumentError(f"set {s['id']}: kind {s['kind']!r} in a disk document")
                g = s["geometry"]
                cx, cy = g["center"]
                disks.append(Disk(s["id"], float(cx), float(cy), float(g["radius"]),
                                  int(s.get("generation", 0)), tuple(int(p) for p in s.get("parents", []))))
            family = DiskFamily(amb, tuple(disks))
        elif model == "grid":
            if not isinstance(amb, AmbientBox):
                raise DocumentError("grid documents need a box ambient")
            family = GridFamily(amb, tuple(_gridset_from_dict(amb, s) for s in sets),
                                tuple(int(s.get("generation", 0)) for s in sets))
        else:
            raise DocumentError(f"unknown model {model!r}")
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed document: {exc}") from exc
    return family, doc.get("provenance", {})


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False, allow_nan=False) + "\n"


def save(path: str | Path, family, provenance: dict | None = None) -> None:
    Path(path).write_text(dumps(to_document(family, provenance)), encoding="utf-8")


def load(path: str | Path):
    """Read a PackingDocument file; returns ``(family, provenance)``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document root must be an object")
    return from_document(doc)
