import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rubber_rolling.frames import (
    FrameInvariants,
    SphericalCurve,
    darboux_frame,
    frame_invariants,
    frame_rotation_vector,
    reconstruct_spherical_curve,
    rolling_invariant_relations,
)


def latitude_circle(a, theta, n=2000, fraction=0.9):
    s = np.linspace(0, 2 * math.pi * a * math.sin(theta) * fraction, n)
    phi = s / (a * math.sin(theta))
    pts = a * np.column_stack(
        [math.sin(theta) * np.cos(phi), math.sin(theta) * np.sin(phi), math.cos(theta) * np.ones_like(phi)]
    )
    return s, pts


@pytest.mark.parametrize("a,theta", [(1.0, 0.3), (2.0, 0.7), (0.5, 1.2)])
def test_latitude_circle_invariants(a, theta):
    s, pts = latitude_circle(a, theta)
    curve = SphericalCurve(s, pts, a)
    inv = frame_invariants(curve, s[len(s) // 2])
    assert inv.kappa_g == pytest.approx(math.cos(theta) / (a * math.sin(theta)), abs=1e-6)
    assert inv.kappa_n == pytest.approx(-1.0 / a, abs=1e-6)
    assert abs(inv.tau_g) < 1e-6


def test_orientation_flips_signs():
    s, pts = latitude_circle(1.0, 0.5)
    up = frame_invariants(SphericalCurve(s, pts, 1.0, 1), s[500])
    down = frame_invariants(SphericalCurve(s, pts, 1.0, -1), s[500])
    assert down.kappa_g == pytest.approx(-up.kappa_g)
    assert down.kappa_n == pytest.approx(-up.kappa_n)


def test_frame_orthonormal_and_rotation_vector():
    curve = reconstruct_spherical_curve(lambda s: 0.4 + 0.3 * math.sin(s), 1.5, 3.0, (0, 0, 1), (1, 0, 0))
    s0, h = 1.3, 1e-3
    F = darboux_frame(curve, s0)
    assert np.allclose(F @ F.T, np.eye(3), atol=1e-10)
    d = frame_rotation_vector(frame_invariants(curve, s0)) @ F
    dF = (darboux_frame(curve, s0 + h) - darboux_frame(curve, s0 - h)) / (2 * h)
    for e, de in zip(F, dF):
        assert np.allclose(de, np.cross(d, e), atol=1e-5)


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-1, 1), st.floats(0.5, 3))
def test_reconstruction_roundtrip(c0, c1, radius):
    curve = reconstruct_spherical_curve(lambda s: c0 + c1 * s, radius, 2.0, (1, 2, 3), (0, 1, 0))
    assert np.abs(np.linalg.norm(curve.points, axis=1) - radius).max() < 1e-10
    for s in (0.5, 1.0, 1.5):
        inv = frame_invariants(curve, s)
        assert inv.kappa_g == pytest.approx(c0 + c1 * s, abs=1e-6)
        assert inv.kappa_n == pytest.approx(-1.0 / radius, abs=1e-6)


def test_from_points_and_csv(tmp_path):
    s, pts = latitude_circle(1.0, 0.6, n=500)
    curve = SphericalCurve.from_points(pts)
    assert curve.radius == pytest.approx(1.0)
    p = tmp_path / "curve.csv"
    curve.to_csv(p)
    back = SphericalCurve.from_csv(p)
    assert np.array_equal(back.s, curve.s)
    assert np.array_equal(back.points, curve.points)


def test_rejects_points_off_sphere():
    s, pts = latitude_circle(1.0, 0.6, n=50)
    pts[10] *= 1.01
    with pytest.raises(ValueError):
        SphericalCurve(s, pts, 1.0)


def test_rejects_evaluation_near_ends():
    s, pts = latitude_circle(1.0, 0.6, n=500)
    curve = SphericalCurve(s, pts, 1.0)
    with pytest.raises(ValueError):
        frame_invariants(curve, s[0])


def test_rolling_relations():
    res = rolling_invariant_relations(FrameInvariants(0.3, -1.0, 0.01), FrameInvariants(0.3, 2.0, 0.02))
    assert res["kappa_g"] == 0.0
    assert res["tau_g"] == pytest.approx(0.01)
