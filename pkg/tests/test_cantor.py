"""Hierarchy construction and certificate tests."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeeze.cantor import (
    ROW_KEYS,
    Theorem1State,
    Theorem2State,
    Thm2Params,
    build_theorem1,
    build_theorem2_stage,
    certify_theorem1,
    extend_theorem1,
    initial_theorem2,
    offset_curve_points,
    stage_axis,
    step_trend_ladder,
    verify_stage,
)
from squeeze.errors import CertificateError, ConfigError
from squeeze.geometry import (
    Disk,
    Domain,
    PointComponent,
    Poly,
    Rect,
    lebesgue_measure,
    two_disk_domain,
)
from squeeze.hyperbolic import winding_number
from squeeze.slitmap import SolverParams, r_value

SMOKE_SOLVER = SolverParams(order=8, boundary_points=64, corner_poles=6, tol=2e-2)


def test_stage_axis_alternates():
    assert [stage_axis(j) for j in (1, 2, 3, 4)] == [
        "vertical", "horizontal", "vertical", "horizontal"]


def test_depth_one_k8():
    state = build_theorem1(Fraction(1, 2), 1, [8])
    assert len(state.cubes) == 2
    assert state.measure == Fraction(3, 4)
    assert state.schedule == (8,)
    a, b = state.cubes
    assert a.rect.b == Fraction(3, 8) and b.rect.a == Fraction(5, 8)


def test_depth_two_product_formula():
    state = build_theorem1(Fraction(1, 2), 2, [8, 8])
    assert len(state.cubes) == 4
    # two slabs of absolute width 1/4 removed, one per axis
    assert state.measure == Fraction(9, 16) == Fraction(3, 4) ** 2


def test_auto_schedule_meets_bound_eps01():
    state = build_theorem1(Fraction(1, 10), 3)
    assert state.measure >= Fraction(9, 10)
    assert lebesgue_measure(state.cubes) == state.measure


def test_desk_scale_construction():
    state = build_theorem1(Fraction(1, 4), 3)
    assert state.schedule == (22, 22, 49)
    assert state.measures == (
        Fraction(1), Fraction(10, 11), Fraction(100, 121), Fraction(4460, 5929))
    assert state.measure >= Fraction(3, 4)
    assert [len(s) for s in state.stages] == [1, 2, 4, 8]
    axes = [c.lineage[-1][0] for c in (state.stages[1][0], state.stages[2][0],
                                       state.stages[3][0])]
    assert axes == ["vertical", "horizontal", "vertical"]


def test_diameters_shrink_by_stage():
    state = build_theorem1(Fraction(1, 4), 3)
    diams = [max(c.rect.diameter() for c in stage) for stage in state.stages]
    assert all(b < a for a, b in zip(diams, diams[1:]))


def test_schedule_length_mismatch():
    with pytest.raises(ConfigError):
        build_theorem1(Fraction(1, 2), 2, [8])


def test_schedule_too_aggressive():
    with pytest.raises(ConfigError, match="too aggressive"):
        build_theorem1(Fraction(1, 2), 3, [3, 3, 3])


def test_measure_bound_violated():
    with pytest.raises(CertificateError, match="measure bound"):
        build_theorem1(Fraction(1, 10), 1, [3])


@pytest.mark.parametrize("eps", [0, 1, -1, Fraction(7, 5)])
def test_epsilon_range(eps):
    with pytest.raises(ConfigError):
        build_theorem1(eps, 2)


def test_depth_validation():
    with pytest.raises(ConfigError):
        build_theorem1(Fraction(1, 2), 0)


@settings(max_examples=25, deadline=None)
@given(num=st.integers(1, 17), depth=st.integers(1, 3))
def test_auto_schedule_always_meets_bound(num, depth):
    eps = Fraction(num, 20)
    state = build_theorem1(eps, depth)
    assert state.measure >= 1 - eps
    assert len(state.cubes) == 2 ** depth


def test_serialization_roundtrip(tmp_path):
    state = build_theorem1(Fraction(1, 4), 3)
    assert Theorem1State.from_json(state.to_json()) == state
    p = tmp_path / "state.json"
    state.save(p)
    assert Theorem1State.load(p) == state


def test_from_json_kind_check():
    with pytest.raises(ConfigError, match="kind"):
        Theorem1State.from_json({"kind": "nonsense"})


def test_extend_matches_direct_build():
    partial = build_theorem1(Fraction(1, 4), 2, [22, 22])
    extended = extend_theorem1(partial, 1, [49])
    assert extended == build_theorem1(Fraction(1, 4), 3)


# ---- offset curves ----


def test_offset_curve_distance_and_winding():
    rect = Rect(0.0, 1.0, 0.0, 0.5)
    pts = offset_curve_points(rect, 0.1, 256)
    dists = [rect.distance(z) for z in pts]
    assert max(abs(d - 0.1) for d in dists) < 1e-9
    assert winding_number(pts, rect.anchor()) == 1


def test_offset_curve_deterministic():
    rect = Rect(0.0, 1.0, 0.0, 1.0)
    a = offset_curve_points(rect, 0.05, 64)
    b = offset_curve_points(rect, 0.05, 64)
    assert np.array_equal(a, b)


def test_offset_curve_rejects_nonpositive():
    with pytest.raises(ConfigError):
        offset_curve_points(Rect(0, 1, 0, 1), 0.0, 8)


# ---- certificates ----


def test_certify_depth_one_golden():
    state = build_theorem1(Fraction(1, 2), 1, [8])
    report = certify_theorem1(state, delta=0.1)
    rows = report["rows"]
    assert len(rows) == 2 * 8 + 1
    assert all(tuple(r) == ROW_KEYS for r in rows)
    assert report["failures"] == 0
    assert all(r["pass"] for r in rows)
    control = rows[-1]
    assert control["witness"] == "control:disk"
    assert control["value"] == 1.0
    # regression baseline from the first verified run
    assert report["min_lower"] == pytest.approx(0.659078419003, abs=1e-6)
    rerun = certify_theorem1(state, delta=0.1)
    assert json.dumps(report, sort_keys=True) == json.dumps(rerun, sort_keys=True)


def test_certify_rejects_delta_below_clearance():
    state = build_theorem1(Fraction(1, 2), 1, [8])
    with pytest.raises(ConfigError, match="clearance"):
        certify_theorem1(state, delta=1e-5)


def test_step_trend_ladder_nondecreasing():
    ladder = step_trend_ladder()
    assert sorted(ladder) == [4, 8, 16]
    for i in range(3):
        seq = [ladder[k][i] for k in (4, 8, 16)]
        assert all(b >= a - 1e-3 for a, b in zip(seq, seq[1:]))
    assert ladder[4][0] == pytest.approx(0.4245666, abs=1e-3)
    assert ladder[16][2] > 0.97


# ---- refinement ladder toward a smooth domain ----


def test_polygon_refinement_ladder_converges():
    def ngon(cx, r, n):
        return Poly(tuple(
            complex(cx + r * math.cos(2 * math.pi * (k + 0.5) / n),
                    r * math.sin(2 * math.pi * (k + 0.5) / n))
            for k in range(n)))

    target = r_value(two_disk_domain(), 0.0).lower
    params = SolverParams(tol=1e-4)
    gaps = []
    for n in (12, 16, 32, 64):
        dom = Domain((ngon(-2.0, 1.0, n), ngon(2.0, 1.0, n)))
        gaps.append(abs(r_value(dom, 0.0, params).lower - target))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


# ---- interleaved construction ----


def test_initial_state():
    state = initial_theorem2()
    assert state.stage == 0
    assert len(state.cubes) == 1
    assert state.loops == () and state.circles == () and state.certificates == ()


def test_two_stages_structure():
    params = Thm2Params(max_loops=1, max_points=1, samples_per_loop=2,
                        solver=SMOKE_SOLVER)
    st1 = build_theorem2_stage(initial_theorem2(), params)
    assert st1.stage == 1
    assert len(st1.cubes) == 8
    assert [l.stage for l in st1.loops] == [1]
    assert [c.stage for c in st1.circles] == [1]
    assert st1.loops[0].offset > 0
    assert all(r["pass"] for r in st1.certificates)

    st2 = build_theorem2_stage(st1, params)
    assert st2.stage == 2
    assert len(st2.cubes) == 36
    assert [l.stage for l in st2.loops] == [1, 2]
    assert all(r["pass"] for r in st2.certificates)
    assert all(tuple(r) == ROW_KEYS for r in st2.certificates)

    # each refinement quarters every cube, so diameters shrink fast
    d1 = max(c.rect.diameter() for c in st1.cubes)
    d2 = max(c.rect.diameter() for c in st2.cubes)
    assert d2 < d1 / 2

    # placement thresholds 1 - 1/j - slack, re-check thresholds 1-5/j and 3/j
    seen = {}
    for r in st2.certificates:
        seen.setdefault((r["stage"], r["kind"]), set()).add(round(r["threshold"], 9))
    assert seen[(1, "lower")] <= {-4.0, round(1 - 1 / 1 - 0.05, 9)}
    assert seen[(1, "upper")] == {3.0}
    assert round(0.45, 9) in seen[(2, "lower")] and -1.5 in seen[(2, "lower")]
    assert seen[(2, "upper")] == {1.5}


def test_small_cubes_inside_their_circles():
    params = Thm2Params(max_loops=1, max_points=1, samples_per_loop=2,
                        solver=SMOKE_SOLVER)
    st1 = build_theorem2_stage(initial_theorem2(), params)
    circle = st1.circles[0]
    # the marked cube was refined, but every piece inside the disk of
    # radius delta descends from it; check the pieces near the center
    inside = [c for c in st1.cubes
              if abs(c.rect.anchor() - circle.center) < circle.radius]
    assert inside
    for cube in inside:
        r = cube.rect
        far = max(abs(complex(x, y) - circle.center)
                  for x in (float(r.a), float(r.b)) for y in (float(r.c), float(r.d)))
        assert far < circle.radius


def test_loops_avoid_all_cubes():
    params = Thm2Params(max_loops=1, max_points=1, samples_per_loop=2,
                        solver=SMOKE_SOLVER)
    st1 = build_theorem2_stage(initial_theorem2(), params)
    dom = st1.domain()
    for loop in st1.loops:
        assert min(dom.clearance(complex(z)) for z in loop.pts) > 0


def test_theorem2_serialization(tmp_path):
    params = Thm2Params(max_loops=1, max_points=1, samples_per_loop=2,
                        solver=SMOKE_SOLVER)
    st1 = build_theorem2_stage(initial_theorem2(), params)
    assert Theorem2State.from_json(st1.to_json()) == st1
    p = tmp_path / "mixed.json"
    st1.save(p)
    assert Theorem2State.load(p) == st1


# ---- stage verification ----


def test_verify_stage_empty():
    report = verify_stage(two_disk_domain(), [], [], {"lower": 0.5, "upper": 0.5})
    assert report["rows"] == []
    assert report["passed"] is True
    assert report["failures"] == 0


def test_verify_stage_disk_control():
    dom = Domain((Disk(0.0, 0.0, 1.0),), label="control")
    loop = [complex(3 + 0.5 * math.cos(t), 0.5 * math.sin(t))
            for t in np.linspace(0, 2 * math.pi, 32, endpoint=False)]
    report = verify_stage(dom, [tuple(loop)], [], {"lower": 1 - 5 / 6, "upper": 1.0})
    assert report["passed"] is True
    assert all(r["value"] == 1.0 for r in report["rows"])


def test_verify_stage_point_circle_upper():
    # circle of radius 1e-3 around a removed point, next obstacle 2 away;
    # the punctured-disk witness gives tanh(pi / log(R/r)), far above the
    # 0.1 one might hope for at this modest ratio
    dom = Domain((Disk(3.0, 0.0, 1.0), PointComponent(0.0, 0.0)))
    report = verify_stage(dom, [], [(0.0 + 0.0j, 1e-3)], {"lower": 0.0, "upper": 0.5})
    assert len(report["rows"]) == 1
    row = report["rows"][0]
    expected = math.tanh(math.pi / math.log(2.0 / 1e-3))
    assert row["value"] == pytest.approx(expected, abs=2e-3)
    assert row["value"] > 0.1
    assert row["pass"]
    assert report["passed"] is True


def test_verify_stage_rows_deterministic():
    dom = Domain((Disk(3.0, 0.0, 1.0), PointComponent(0.0, 0.0)))
    kw = dict(loops=[], circles=[(0.0 + 0.0j, 1e-2)],
              thresholds={"lower": 0.0, "upper": 1.0})
    a = verify_stage(dom, **kw)
    b = verify_stage(dom, **kw)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
