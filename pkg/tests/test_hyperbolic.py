"""Hyperbolic length bounds and the two-point distance gap."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeeze.errors import NoWitnessError
from squeeze.geometry import Disk, Domain, PointComponent, Rect
from squeeze.hyperbolic import (
    AnnulusModel,
    DiskModel,
    PuncturedDiskModel,
    circle_loop,
    hyperbolic_length,
    kobayashi_length_upper,
    metric_density,
    poincare_distance_disk,
    squeeze_upper_from_loop,
    sublemma_gap,
    winding_number,
)


def test_poincare_distance_known_value():
    assert poincare_distance_disk(0.0, 0.5) == pytest.approx(math.log(3.0))


def test_poincare_distance_symmetric():
    a, b = 0.3 + 0.1j, -0.2 + 0.4j
    assert poincare_distance_disk(a, b) == pytest.approx(poincare_distance_disk(b, a))


@given(
    st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False),
    st.floats(min_value=0.0, max_value=2 * math.pi),
)
@settings(max_examples=60, deadline=None)
def test_poincare_distance_rotation_invariant(a, b, phi):
    w = complex(math.cos(phi), math.sin(phi))
    d1 = poincare_distance_disk(a, b)
    d2 = poincare_distance_disk(w * a, w * b)
    assert d2 == pytest.approx(d1, rel=1e-9, abs=1e-12)


def test_disk_density_at_center():
    assert metric_density(DiskModel(0j, 1.0), 0j) == pytest.approx(2.0)


def test_punctured_density_value():
    model = PuncturedDiskModel(0j, 1.0)
    assert metric_density(model, 1.0 / math.e + 0j) == pytest.approx(math.e)


def test_annulus_core_circle_length():
    # geodesic core of {0.25 < |z| < 1} has length 2 pi^2 / log 4
    model = AnnulusModel(0j, 0.25, 1.0)
    loop = circle_loop(0j, 0.5, n=4096)
    exact = 2.0 * math.pi**2 / math.log(4.0)
    assert hyperbolic_length(model, loop) == pytest.approx(exact, rel=1e-6)


def test_length_scale_invariant():
    model1 = AnnulusModel(0j, 0.25, 1.0)
    model2 = AnnulusModel(0j, 2.5, 10.0)
    loop1 = circle_loop(0j, 0.5, n=1024)
    loop2 = circle_loop(0j, 5.0, n=1024)
    assert hyperbolic_length(model1, loop1) == pytest.approx(
        hyperbolic_length(model2, loop2), rel=1e-12
    )


def test_sublemma_gap_exact_at_one():
    assert sublemma_gap(1.0) == pytest.approx(math.log(1.5))


def test_sublemma_gap_limit():
    assert sublemma_gap(1e-6) == pytest.approx(math.log(2.0), abs=1e-3)
    assert sublemma_gap(1e-8) == pytest.approx(math.log(2.0), abs=1e-5)


def test_squeeze_upper_from_loop_monotone():
    ls = [0.5, 1.0, 2.0, 4.0]
    us = [squeeze_upper_from_loop(x) for x in ls]
    assert us == sorted(us)
    assert all(0 < u < 1 for u in us)
    assert squeeze_upper_from_loop(2.0) == pytest.approx(math.tanh(1.0))


def test_winding_number():
    loop = circle_loop(0j, 1.0, n=256)
    assert winding_number(loop, 0j) == 1
    assert winding_number(loop, 3.0 + 0j) == 0


def test_kobayashi_punctured_witness():
    dom = Domain((Disk(0, 0, 1), PointComponent(5, 0)))
    loop = circle_loop(5 + 0j, 0.5, n=512)
    est = kobayashi_length_upper(dom, loop)
    assert isinstance(est.model, PuncturedDiskModel)
    assert est.squeeze_upper() < 1.0
    # shrinking the loop toward the puncture shrinks the bound
    est2 = kobayashi_length_upper(dom, circle_loop(5 + 0j, 0.1, n=512))
    assert est2.squeeze_upper() < est.squeeze_upper()


def test_kobayashi_annulus_witness():
    dom = Domain((Rect(-0.1, 0.1, -0.1, 0.1), Disk(0, 4, 0.5), Disk(4, 0, 0.5)))
    loop = circle_loop(0j, 1.0, n=512)
    est = kobayashi_length_upper(dom, loop)
    assert isinstance(est.model, AnnulusModel)
    assert 0.0 < est.squeeze_upper() < 1.0


def test_kobayashi_rejects_loop_outside_domain():
    dom = Domain((Disk(0, 0, 1),))
    with pytest.raises(Exception):
        kobayashi_length_upper(dom, circle_loop(0j, 0.5, n=128))


def test_kobayashi_no_witness_when_nothing_enclosed():
    dom = Domain((Disk(0, 0, 1), Disk(4, 0, 1)))
    loop = circle_loop(2 + 5j, 0.3, n=256)
    est = kobayashi_length_upper(dom, loop)
    # contractible loop: disk witness, bound from the loop's length
    assert est.contractible
    assert est.squeeze_upper() < 1.0


def test_kobayashi_everything_enclosed_fails():
    dom = Domain((Disk(0, 0, 1), Disk(4, 0, 1)))
    loop = circle_loop(2 + 0j, 20.0, n=512)
    with pytest.raises(NoWitnessError):
        kobayashi_length_upper(dom, loop)


def test_puncture_ladder_strictly_decreasing():
    # witness radius is d, loop radius d^2/9, so the modulus log(9/d) grows
    uppers = []
    for d in (1e-1, 1e-2, 1e-3):
        dom = Domain((Disk(0, 0, 1), PointComponent(1.0 + d, 0.0)))
        loop = circle_loop(1.0 + d + 0j, d * d / 9.0, n=512)
        est = kobayashi_length_upper(dom, loop)
        uppers.append(est.squeeze_upper())
        assert est.squeeze_upper() == pytest.approx(
            math.tanh(math.pi / math.log(9.0 / d)), rel=1e-5
        )
    assert uppers[0] > uppers[1] > uppers[2]
    assert uppers[2] < 0.35


@given(st.floats(min_value=0.05, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_upper_bound_in_unit_interval(length):
    u = squeeze_upper_from_loop(length)
    assert 0.0 < u < 1.0
