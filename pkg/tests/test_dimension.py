import numpy as np
import pytest

from potatopack.dimension import (
    box_counting,
    fit_loglog,
    parse_scales,
    rasterize_residual,
    shifted_box_counts,
)
from potatopack.errors import ModelMismatchError
from potatopack.packing import TilingConfig, generate_square_tiling
from potatopack.sets import AmbientBox, Disk, DiskFamily, GridSet, OuterDisk

SCALES = list(range(5, 11))


def test_rasterize_empty_family():
    amb = AmbientBox.unit(2)
    res = rasterize_residual(DiskFamily(amb, ()), 64)
    assert res.count == 64 * 64


def test_rasterize_empty_disk_ambient_counts_centers_inside():
    res = rasterize_residual(DiskFamily(OuterDisk((0, 0), 1), ()), 256)
    xs = -1 + (np.arange(256) + 0.5) * (2 / 256)
    expected = int(np.count_nonzero(xs[None, :] ** 2 + xs[:, None] ** 2 < 1))
    assert res.count == expected


def test_rasterize_covering_disk():
    amb = AmbientBox.unit(2)
    res = rasterize_residual(DiskFamily(amb, (Disk(0, 0.5, 0.5, 0.75),)), 64)
    assert res.count == 0


def test_rasterize_guards():
    f = DiskFamily(AmbientBox.unit(2), ())
    with pytest.raises(ValueError):
        rasterize_residual(f, 100)
    with pytest.raises(ValueError):
        rasterize_residual(f, 2**15)
    with pytest.raises(ModelMismatchError):
        rasterize_residual(generate_square_tiling(TilingConfig(1)), 64)


def test_conservative_keeps_more(gasket6):
    plain = rasterize_residual(gasket6, 512)
    cons = rasterize_residual(gasket6, 512, conservative=True)
    assert cons.count >= plain.count
    assert np.all(cons.cells[plain.cells])


def test_gasket_depth8_residual_nontrivial(gasket10):
    res = rasterize_residual(gasket10.up_to_generation(8), 4096)
    assert 0 < res.count < 4096 * 4096


def test_full_square_slope():
    full = GridSet.full(AmbientBox.unit(2, 1024))
    est = box_counting(full, SCALES)
    assert est.counts == tuple(4**j for j in SCALES)
    assert abs(est.slope - 2.0) <= 0.02


def test_segment_slope():
    amb = AmbientBox.unit(2, 1024)
    seg = GridSet.from_box(amb, (300, 0), (301, 1024))
    est = box_counting(seg, SCALES)
    assert abs(est.slope - 1.0) <= 0.05


@pytest.mark.parametrize("make", ["full", "segment"])
def test_shifted_origin_stability(make):
    amb = AmbientBox.unit(2, 1024)
    s = GridSet.full(amb) if make == "full" else GridSet.from_box(amb, (300, 0), (301, 1024))
    est = box_counting(s, SCALES)
    shifted = shifted_box_counts(s, SCALES)
    for a, b in zip(est.counts, shifted):
        assert b <= a * 4 and a <= b * 4
    assert abs(fit_loglog(SCALES, shifted)[0] - est.slope) < 0.05


def test_box_counting_errors():
    amb = AmbientBox.unit(2, 64)
    with pytest.raises(ValueError):
        box_counting(GridSet.full(amb), [1, 2, 3])
    with pytest.raises(ValueError):
        box_counting(GridSet.empty(amb), [1, 2, 3, 4])
    with pytest.raises(ValueError):
        box_counting(GridSet.full(amb), [4, 5, 6, 7])


def test_counts_monotone(gasket10):
    res = rasterize_residual(gasket10.up_to_generation(6), 1024)
    est = box_counting(res, SCALES)
    assert all(b >= a for a, b in zip(est.counts, est.counts[1:]))
    assert 0 <= est.slope <= 2


def test_parse_scales():
    assert parse_scales("5:10") == SCALES
    assert parse_scales("5,7,9") == [5, 7, 9]


def test_csv(gasket6):
    est = box_counting(rasterize_residual(gasket6, 1024), SCALES)
    lines = est.to_csv().splitlines()
    assert lines[0] == "scale,count,fit_residual" and len(lines) == 7
