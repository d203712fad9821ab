import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from potatopack.errors import GridMismatchError, ModelMismatchError, OverlapError
from potatopack.perimeter import (
    axiom_suite,
    check_additivity,
    check_axiom_C,
    check_axiom_L,
    check_axiom_T_prime,
    check_axiom_Z,
    disk_perimeter,
    face_count,
    grid_perimeter,
    kissing_measure,
    measure,
    shared_faces,
    union_perimeter,
)
from potatopack.sets import AmbientBox, Disk, DiskFamily, GridSet, OuterDisk

GRID10 = AmbientBox(2, (0, 0), (10, 10), 10)  # h = 1


def cell(*idx, amb=GRID10):
    return GridSet.from_cells(amb, [idx])


# -- measure -----------------------------------------------------------------


def test_measure_examples():
    assert measure(GridSet.empty(GRID10)) == 0
    assert measure(cell(3, 3)) == 1
    assert measure(GridSet.full(AmbientBox.unit(2, 4))) == 1


def test_measure_additive_over_disjoint_cells():
    a = GridSet.from_box(GRID10, (0, 0), (3, 3))
    b = GridSet.from_box(GRID10, (5, 5), (7, 9))
    assert measure(a.union(b)) == measure(a) + measure(b)


def test_ambient_box_rejects_bad_corners():
    with pytest.raises(ValueError):
        AmbientBox(2, (0, 0), (1, 0), 4)
    with pytest.raises(ValueError):
        AmbientBox(2, (0, 0), (1, 1), 0)
    with pytest.raises(ValueError):
        GridSet(AmbientBox.unit(2, 4), np.zeros((4, 5), bool))


# -- grid perimeter ----------------------------------------------------------


def test_grid_perimeter_examples():
    single = cell(4, 4)
    assert grid_perimeter(single) == 4
    assert grid_perimeter(single.complement()) == 4
    assert grid_perimeter(GridSet.from_cells(GRID10, [(4, 4), (4, 5)])) == 6
    assert grid_perimeter(GridSet.empty(GRID10)) == 0


def test_box_frontier_faces_not_counted():
    corner = cell(0, 0)
    assert face_count(corner) == 2
    assert grid_perimeter(GridSet.full(GRID10)) == 0


def test_grid_perimeter_scales_with_face_area():
    amb = AmbientBox.unit(3, 4)  # h = 1/4, faces have area 1/16
    s = GridSet.from_cells(amb, [(1, 1, 1)])
    assert face_count(s) == 6
    assert grid_perimeter(s) == 6 / 16


# -- disk perimeter ----------------------------------------------------------


def test_disk_perimeter_examples():
    window = AmbientBox(2, (-5, -5), (5, 5))
    inside = Disk(0, 0.0, 0.0, 1.0)
    outside = Disk(1, 20.0, 0.0, 1.0)
    on_edge = Disk(2, -5.0, 0.0, 1.0)
    per = disk_perimeter([inside, outside, on_edge], window)
    assert per[0] == pytest.approx(2 * math.pi, rel=1e-12)
    assert per[1] == 0
    assert per[2] == pytest.approx(math.pi, rel=1e-12)


def _monte_carlo_arc(disk, window, n=200_000, seed=0):
    theta = np.random.default_rng(seed).uniform(0, 2 * math.pi, n)
    px = disk.x + disk.r * np.cos(theta)
    py = disk.y + disk.r * np.sin(theta)
    (x0, y0), (x1, y1) = window.min_corner, window.max_corner
    inside = (px > x0) & (px < x1) & (py > y0) & (py < y1)
    frac = inside.mean()
    return 2 * math.pi * disk.r * frac, 2 * math.pi * disk.r * math.sqrt(frac * (1 - frac) / n)


@pytest.mark.parametrize("disk", [Disk(0, -5.0, 0.0, 1.0), Disk(0, -4.6, 4.3, 1.0), Disk(0, 0.0, 4.9, 0.5)])
def test_disk_clipping_matches_monte_carlo(disk):
    window = AmbientBox(2, (-5, -5), (5, 5))
    exact = disk_perimeter([disk], window)[0]
    mc, sigma = _monte_carlo_arc(disk, window)
    assert abs(exact - mc) <= 4 * sigma + 1e-12


def test_disk_window_clipping_closed_form():
    # unit circle centered on the rim of a radius-2 disk: chord angle 2*acos(1/4)
    per = disk_perimeter([Disk(0, 2.0, 0.0, 1.0)], OuterDisk((0, 0), 2.0))[0]
    assert per == pytest.approx(2 * math.acos(0.25), rel=1e-12)


def test_disk_perimeter_rejects_non_disks():
    with pytest.raises(ModelMismatchError):
        disk_perimeter([cell(1, 1)])


def test_empty_disk_family_has_zero_perimeter():
    assert disk_perimeter(DiskFamily(OuterDisk((0, 0), 1), ()), OuterDisk((0, 0), 1)).sum() == 0


@given(st.floats(1e-6, 1e6), st.floats(-10, 10), st.floats(-10, 10))
def test_full_interior_disk_is_circumference(r, x, y):
    window = OuterDisk((x, y), 3 * r)
    per = disk_perimeter([Disk(0, x + 0.5 * r, y, r)], window)[0]
    assert abs(per - 2 * math.pi * r) <= 1e-12 * 2 * math.pi * r


def test_union_perimeter_of_overlapping_disks():
    # two unit disks at distance 1 overlap; union boundary = 2 * (2pi - 2pi/3)
    a, b = Disk(0, 0.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0)
    assert union_perimeter([a, b]) == pytest.approx(2 * (2 * math.pi - 2 * math.pi / 3), rel=1e-12)
    nested = Disk(2, 0.1, 0.0, 0.2)
    assert union_perimeter([a, nested]) == pytest.approx(2 * math.pi, rel=1e-12)


# -- axioms ------------------------------------------------------------------


def test_t_prime_examples():
    A = GridSet.from_box(GRID10, (3, 3), (6, 6))
    B = cell(4, 4)
    assert face_count(A) == 12 and face_count(A.difference(B)) == 16 and face_count(B) == 4
    assert check_axiom_T_prime(A, B)
    assert check_axiom_T_prime(A, GridSet.empty(GRID10))
    assert face_count(A) == face_count(A.difference(GridSet.empty(GRID10)))
    assert check_axiom_T_prime(A, A)


def test_t_prime_errors():
    A = GridSet.from_box(GRID10, (3, 3), (6, 6))
    with pytest.raises(ValueError):
        check_axiom_T_prime(A, cell(0, 0))
    with pytest.raises(GridMismatchError):
        check_axiom_T_prime(A, GridSet.empty(AmbientBox.unit(2, 10)))


def test_c_examples():
    rng = np.random.default_rng(0)
    assert check_axiom_C(GridSet(AmbientBox.unit(2, 64), rng.random((64, 64)) < 0.5))
    assert grid_perimeter(GridSet.empty(GRID10)) == grid_perimeter(GridSet.full(GRID10)) == 0
    assert check_axiom_C(cell(2, 7))


def test_z_examples():
    A = GridSet.from_box(GRID10, (1, 1), (4, 4))
    assert check_axiom_Z(A, GridSet(GRID10, A.cells))
    assert check_axiom_Z(A, A.union(cell(8, 8)))  # vacuous
    assert check_axiom_Z(GridSet.empty(GRID10), GridSet.empty(GRID10))


def _dyadic(base: GridSet, levels):
    return [base.refine(2**k) for k in levels]


def test_l_constant_sequence():
    A = GridSet.from_box(AmbientBox.unit(2, 4), (1, 1), (3, 2))
    assert check_axiom_L(_dyadic(A, range(1, 6)), A)


def test_l_with_vanishing_bump():
    A = GridSet.from_box(AmbientBox.unit(2, 4), (1, 1), (3, 2))
    seq = []
    for k in range(1, 7):
        fine = A.refine(2**k)
        n = fine.ambient.resolution
        # one extra cell of side h_n sitting on top of the block
        cells = fine.cells.copy()
        cells[n // 2, n // 2] = True
        assert not fine.cells[n // 2, n // 2]
        seq.append(GridSet(fine.ambient, cells))
        assert abs(grid_perimeter(seq[-1]) - grid_perimeter(A)) <= 4 * fine.h + 1e-15
    assert check_axiom_L(seq, A)


def test_l_thin_slab_to_empty():
    base = AmbientBox.unit(2, 4)
    seq = []
    for k in range(2, 8):
        amb = AmbientBox.unit(2, 2**k)
        seq.append(GridSet.from_box(amb, (0, 0), (1, 2**k)))
    assert check_axiom_L(seq, GridSet.empty(base))


def test_l_needs_four_terms():
    A = GridSet.empty(AmbientBox.unit(2, 4))
    with pytest.raises(ValueError):
        check_axiom_L([A, A, A], A)


def test_l_rejects_non_convergent_sequence():
    amb = AmbientBox.unit(2, 4)
    A = GridSet.empty(amb)
    far = GridSet.from_box(amb, (0, 0), (2, 2))
    with pytest.raises(ValueError):
        check_axiom_L([far.refine(2**k) for k in range(4)], A)


# -- kissing / additivity ----------------------------------------------------


def test_kissing_examples():
    assert kissing_measure(Disk(0, -1.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0)).value == 0
    assert kissing_measure(cell(2, 2), cell(3, 3)).value == 0
    km = kissing_measure(cell(2, 2), cell(2, 3))
    assert km.value == 1 and km.method == "shared-face-area"
    assert math.isinf(kissing_measure(Disk(0, 0.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0)).value)
    with pytest.raises(ModelMismatchError):
        kissing_measure(cell(1, 1), Disk(0, 0.0, 0.0, 1.0))


def test_additivity_examples():
    assert check_additivity(cell(2, 2), cell(2, 3)) == (False, 2)
    assert check_additivity(cell(2, 2), cell(3, 3)) == (True, 0)
    additive, defect = check_additivity(Disk(0, -1.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0))
    assert additive and defect == 0
    with pytest.raises(OverlapError):
        check_additivity(cell(2, 2), cell(2, 2))
    with pytest.raises(OverlapError):
        check_additivity(Disk(0, 0.0, 0.0, 1.0), Disk(1, 1.0, 0.0, 1.0))


# -- properties --------------------------------------------------------------

grids = st.integers(1, 3).flatmap(
    lambda d: st.integers(2, 12 if d < 3 else 6).flatmap(lambda n: arrays(np.bool_, (n,) * d))
)


def _gs(a):
    return GridSet(AmbientBox.unit(a.ndim, a.shape[0]), a)


@settings(max_examples=200)
@given(grids)
def test_property_complement(a):
    assert check_axiom_C(_gs(a))


@settings(max_examples=200)
@given(grids, st.randoms())
def test_property_t_prime_and_additivity(a, rnd):
    A = _gs(a)
    mask = np.array([rnd.random() < 0.5 for _ in range(a.size)]).reshape(a.shape)
    B = GridSet(A.ambient, a & mask)
    C = GridSet(A.ambient, ~a & mask)
    assert check_axiom_T_prime(A, B)
    additive, defect = check_additivity(A, C)
    assert defect == 2 * kissing_measure(A, C).value
    assert additive == (shared_faces(A, C) == 0)


@settings(max_examples=200)
@given(grids, st.randoms())
def test_property_stability_and_isoperimetry(a, rnd):
    A = _gs(a)
    flips = np.array([rnd.random() < 0.1 for _ in range(a.size)]).reshape(a.shape) & ~a
    grown = GridSet(A.ambient, a | flips)
    k = grown.count - A.count
    assert abs(grid_perimeter(grown) - grid_perimeter(A)) <= 2 * a.ndim * k * A.ambient.face_area + 1e-12
    if 0 < A.count < a.size:
        assert grid_perimeter(A) > 0


def test_axiom_suite_small():
    result = axiom_suite(grid=32, trials=50, seed=1, dim=3)
    assert result["all_pass"], result
