import math

import numpy as np
import pytest

from potatopack.errors import ModelMismatchError
from potatopack.packing import TilingConfig, generate_square_tiling
from potatopack.sets import AmbientBox, Disk, DiskFamily, OuterDisk
from potatopack.slicing import crossing_statistics, interval_structure_check, slice_line


def fam(*disks, ambient=None):
    return DiskFamily(ambient or AmbientBox(2, (-2, -2), (2, 2)), disks)


def test_slice_line_examples():
    f = fam(Disk(0, 0.0, 0.0, 1.0))
    s = slice_line(f, 0.0)
    assert s.crossings == 2 and s.sets_met == (0,) and s.tangent_hits == 0
    s = slice_line(f, 1.0)
    assert s.crossings == 0 and s.tangent_hits == 1
    assert slice_line(f, 1.5).crossings == 0


def test_slice_line_rejects_grids():
    with pytest.raises(ModelMismatchError):
        slice_line(generate_square_tiling(TilingConfig(1)), 0.5)


def test_single_disk_statistics():
    r, H = 0.3, 4.0
    s = crossing_statistics(fam(Disk(0, 0.5, 0.2, r)), 20_000, 4)
    assert s.analytic_mean == pytest.approx(4 * r / H)
    assert s.within_3sigma


def test_empty_family_statistics():
    s = crossing_statistics(fam(), 500, 0)
    assert s.mean_crossings == 0 and s.analytic_mean == 0


def test_too_few_lines():
    with pytest.raises(ValueError):
        crossing_statistics(fam(Disk(0, 0.0, 0.0, 1.0)), 99, 0)


def test_fast_counts_match_slice_line(gasket6):
    s = crossing_statistics(gasket6, 300, 2)
    for off, c in zip(s.offsets, s.crossings):
        assert slice_line(gasket6, off).crossings == c


def test_vertical_lines():
    s = crossing_statistics(fam(Disk(0, 0.5, 0.2, 0.3)), 1000, 1, vertical=True)
    assert s.within_3sigma and s.window == (-2, 2)


def test_sets_met_monotone_in_depth(gasket10):
    means = [crossing_statistics(gasket10.up_to_generation(g), 2000, 7).mean_sets_met for g in range(4, 11)]
    assert all(b > a for a, b in zip(means, means[1:]))


def test_interval_tangent_pair_contact():
    f = fam(Disk(0, -1.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0), ambient=OuterDisk((0, 0), 2.0))
    rep = interval_structure_check(f, 0.0)
    assert rep.ok
    assert rep.contacts == ((0, 1, 0.0),)


def test_interval_single_disk():
    rep = interval_structure_check(fam(Disk(0, 0.0, 0.0, 1.0)), 0.25)
    assert rep.ok and rep.residual_endpoints == 2 and len(rep.intervals) == 1


def test_interval_detects_overlap():
    rep = interval_structure_check(fam(Disk(0, 0.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0)), 0.1)
    assert not rep.ok


def test_interval_generic_gasket_lines(gasket10):
    rng = np.random.default_rng(8)
    for off in rng.uniform(-0.99, 0.99, 25):
        rep = interval_structure_check(gasket10, float(off), depth=8)
        assert rep.ok, rep.problems
        assert rep.residual_endpoints + 2 * len(rep.contacts) >= 2 * len(rep.intervals) - 2


def test_interval_needs_a_disk():
    with pytest.raises(ValueError):
        interval_structure_check(fam(Disk(0, 0.0, 0.0, 1.0)), 1.5)
