"""Domain model, exact cube splitting, and Mobius transport."""

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeeze.errors import DomainError
from squeeze.geometry import (
    Disk,
    Domain,
    MobiusMap,
    PointComponent,
    Poly,
    Rect,
    annulus_as_disk_pair,
    component_gap,
    hausdorff_distance,
    lebesgue_measure,
    mobius_apply,
    split_cube,
    two_disk_domain,
    unit_cube,
)


def test_rect_basic():
    r = Rect(Fraction(0), Fraction(1), Fraction(0), Fraction(2))
    assert r.diameter() == pytest.approx(math.sqrt(5))
    assert r.contains(0.5 + 1.0j)
    assert not r.contains(1.5 + 0.5j)
    assert r.distance(2.0 + 0.0j) == pytest.approx(1.0)


def test_rect_rejects_empty():
    with pytest.raises(DomainError):
        Rect(1.0, 0.0, 0.0, 1.0)


def test_disk_rejects_bad_radius():
    with pytest.raises(DomainError):
        Disk(0.0, 0.0, 0.0)


def test_poly_orientation_normalized():
    ccw = Poly((0j, 1 + 0j, 1 + 1j))
    cw = Poly((0j, 1 + 1j, 1 + 0j))
    assert ccw.pts[1] == cw.pts[1] or set(ccw.pts) == set(cw.pts)
    # shoelace area positive for both after normalization
    for p in (ccw, cw):
        area = 0.0
        pts = p.pts
        for a, b in zip(pts, pts[1:] + pts[:1]):
            area += a.real * b.imag - b.real * a.imag
        assert area > 0


def test_poly_rejects_degenerate():
    with pytest.raises(DomainError):
        Poly((0j, 1 + 0j))
    with pytest.raises(DomainError):
        Poly((0j, 1 + 0j, 2 + 0j))


def test_component_gap_disk_disk_exact():
    assert component_gap(Disk(0, 0, 1), Disk(4, 0, 1)) == pytest.approx(2.0)


def test_component_gap_rect_rect_exact():
    g = component_gap(Rect(0, 1, 0, 1), Rect(2, 3, 2, 3))
    assert g == pytest.approx(math.sqrt(2))


def test_component_gap_point():
    assert component_gap(PointComponent(3, 0), Disk(0, 0, 1)) == pytest.approx(2.0)


def test_domain_rejects_overlap():
    with pytest.raises(DomainError):
        Domain((Disk(0, 0, 1), Disk(1, 0, 1)))


def test_domain_contains_and_clearance():
    dom = two_disk_domain()
    assert dom.contains(0j)
    assert not dom.contains(2 + 0j)
    assert dom.clearance(0j) == pytest.approx(1.0)


def test_domain_json_round_trip(tmp_path):
    dom = Domain(
        (Rect(0, 1, 0, 1), Disk(3, 0, 0.5), Poly((5 + 0j, 6 + 0j, 5.5 + 1j)),
         PointComponent(-2, -2)),
        label="mixed",
    )
    path = tmp_path / "dom.json"
    dom.save(path)
    back = Domain.load(path)
    assert back.label == "mixed"
    assert len(back.components) == 4
    assert isinstance(back.components[3], PointComponent)
    # on-disk shape is plain JSON with a components list
    raw = json.loads(path.read_text())
    assert {c["kind"] for c in raw["components"]} == {"rect", "disk", "poly", "point"}


def test_domain_load_rejects_unknown_kind(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"label": "x", "components": [{"kind": "blob"}]}))
    with pytest.raises(DomainError):
        Domain.load(path)


def test_split_cube_exact():
    cube = unit_cube()
    kids = split_cube(cube, 4, "vertical")
    xs = [(k.rect.a, k.rect.b) for k in kids]
    assert xs == [(Fraction(0), Fraction(1, 4)), (Fraction(3, 4), Fraction(1))]
    for k in kids:
        assert k.depth == cube.depth + 1


def test_split_cube_rejects_too_small():
    cube = unit_cube()
    with pytest.raises(DomainError):
        split_cube(cube, 2, "vertical")


def test_measure_two_level_hierarchy():
    cubes = [unit_cube()]
    for k, axis in ((8, "vertical"), (8, "horizontal")):
        cubes = [c for cube in cubes for c in split_cube(cube, k, axis)]
    assert lebesgue_measure([c.rect for c in cubes]) == Fraction(9, 16)


@given(st.integers(min_value=3, max_value=40))
@settings(max_examples=20, deadline=None)
def test_split_measure_formula(k):
    cube = unit_cube()
    kids = split_cube(cube, k, "vertical")
    total = lebesgue_measure([c.rect for c in kids])
    assert total == (1 - Fraction(2, k))


def test_hausdorff_identical_is_zero():
    dom = two_disk_domain()
    assert hausdorff_distance(dom, dom) < 1e-12


def test_hausdorff_shifted_disks():
    a = Domain((Disk(0, 0, 1),))
    b = Domain((Disk(0.5, 0, 1),))
    d = hausdorff_distance(a, b, samples=2048)
    assert d == pytest.approx(0.5, abs=2e-3)


def test_mobius_circle_exact():
    T = MobiusMap.inversion_about(0.0)  # z -> 1/z
    img = T.map_circle(4.0 + 0.0j, 1.0)
    assert img[0] == pytest.approx(4.0 / 15.0)
    assert img[1] == pytest.approx(1.0 / 15.0)


def test_mobius_pole_on_circle_rejected():
    T = MobiusMap.inversion_about(1.0)
    with pytest.raises(DomainError):
        T.map_circle(0.0j, 1.0)


def test_mobius_apply_rejects_pole_in_component():
    dom = Domain((Disk(0, 0, 1),))
    with pytest.raises(DomainError):
        mobius_apply(dom, MobiusMap.inversion_about(0.5))


def test_mobius_apply_pole_in_domain_ok():
    dom = two_disk_domain()
    img = mobius_apply(dom, MobiusMap.inversion_about(0.9))
    assert len(img.components) == 2
    assert all(isinstance(c, Disk) for c in img.components)


def test_annulus_chart_disjoint():
    dom, T, i_out, i_in = annulus_as_disk_pair(0.25)
    assert len(dom.components) == 2
    assert {i_out, i_in} == {0, 1}
    assert dom.min_gap() > 0.1


@given(
    st.floats(min_value=0.3, max_value=3.0),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0),
)
@settings(max_examples=30, deadline=None)
def test_affine_disk_maps_exactly(scale, bx, by):
    T = MobiusMap(scale, complex(bx, by), 0.0, 1.0)
    c, r = T.map_circle(1.0 + 2.0j, 0.7)
    assert c == pytest.approx(scale * (1 + 2j) + complex(bx, by))
    assert r == pytest.approx(scale * 0.7)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
@settings(max_examples=50, deadline=None)
def test_inversion_involution(px, py):
    z = complex(px, py)
    T = MobiusMap.inversion_about(0.0)
    if abs(z) > 1e-6:
        assert T(T(z)) == pytest.approx(z, rel=1e-9)


def test_is_connected_under_resolution():
    # a near-closed C shape: the 5e-3 mouth disappears at coarse resolution
    outer = [2 + 2j, -2 + 2j, -2 - 2j, 2 - 2j, 2 - 0.0025j, 1 - 0.0025j,
             1 - 1j, -1 - 1j, -1 + 1j, 1 + 1j, 1 + 0.0025j, 2 + 0.0025j]
    dom = Domain((Poly(tuple(outer)),))
    assert not dom.is_connected(resolution=64)
    assert dom.is_connected(resolution=2048)
