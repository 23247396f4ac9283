import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rubber_rolling import reduction as rd
from rubber_rolling.dynamics import (
    BodyParams,
    SceneParams,
    default_initial_state,
    full_state_projector,
    rubber_field,
)
from rubber_rolling.so3 import StepperSpec, hat, integrate, rotation_exp
from rubber_rolling.verification import scene_for_ratio, verify

BODY = BodyParams(1.0, (1.0, 2.0, 3.0), 0.5)
SCENE = SceneParams(1.3, 0.5)

unit_seed = st.integers(0, 10**6)


def unit_and_tangent(seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(3)
    g /= np.linalg.norm(g)
    v = rng.standard_normal(3)
    return g, v - (v @ g) * g


def tangent_basis(g):
    e1 = np.cross(g, [1.0, 0.0, 0.0]) if abs(g[0]) < 0.9 else np.cross(g, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    return np.column_stack([e1, np.cross(g, e1)])


@settings(max_examples=30)
@given(unit_seed, st.sampled_from([0.37, 1.0, -2.0, 0.0]))
def test_connection_form_annihilates_horizontal_and_reproduces_vertical(seed, ratio):
    _, scene = scene_for_ratio(ratio)
    g, gd = unit_and_tangent(seed)
    r = scene.ratio
    assert np.allclose(rd.connection_form(g, -r * gd, (1 + r) * np.cross(gd, g), scene), 0, atol=1e-13)
    rho = np.random.default_rng(seed + 1).standard_normal(3)
    assert np.allclose(rd.connection_form(g, *rd.vertical_generator(g, rho), scene), rho, atol=1e-13)


@settings(max_examples=30)
@given(unit_seed)
def test_split_tangent(seed):
    rng = np.random.default_rng(seed)
    g, v = unit_and_tangent(seed)
    sigma = rng.standard_normal(3)
    (hv, hs), (vv, vs) = rd.split_tangent(g, v, sigma, SCENE)
    assert np.allclose(hv + vv, v) and np.allclose(hs + vs, sigma)
    assert np.allclose(rd.connection_form(g, hv, hs, SCENE), 0, atol=1e-13)


@settings(max_examples=30)
@given(unit_seed)
def test_horizontal_motion_satisfies_constraints(seed):
    g, qd = unit_and_tangent(seed)
    q = SCENE.a * g
    R = rotation_exp(np.random.default_rng(seed).standard_normal(3))
    w = rd.connection_omega(q, qd, SCENE)
    assert np.abs(rd.constraint_forms(R, q, hat(w) @ R, qd, SCENE)).max() < 1e-13
    S = rotation_exp([0.3, -0.1, 0.7])
    assert rd.equivariance_residual(q, qd, S, SCENE, R) < 1e-13


def test_lift_velocity_has_no_twist():
    g, gd = unit_and_tangent(3)
    qd, W = rd.horizontal_lift(g, gd, np.eye(3), SCENE)
    assert abs(W @ g) < 1e-15
    assert np.allclose(qd, -SCENE.b * gd)


def test_connection_rejects_plane():
    with pytest.raises(ValueError):
        rd.connection_omega([0, 0, 1], [1, 0, 0], SceneParams.plane(0.5))


def test_curvature_coefficients():
    assert rd.curvature_2form([0, 0, 1], SceneParams(2.0, 1.0))[0] == pytest.approx(0.75)
    assert rd.curvature_2form([0, 0, 1], SceneParams(1.0, 1.0))[0] == 0.0
    s = SceneParams(2.0, 0.5)
    assert 1 - s.ratio**2 == pytest.approx(-s.b**2 * rd.base_curvature_density(s))


@pytest.mark.parametrize("theta", [0.1, 0.3, 0.6, 1.2])
def test_holonomy_equal_radii_is_trivial(theta):
    assert rd.holonomy_circle(theta, 1.0, 1.0).holonomy == pytest.approx(-1.0, abs=1e-14)


@pytest.mark.parametrize("theta", [0.1, 0.3, 0.6])
def test_loop_holonomy_matches_closed_form(theta):
    loop = rd.holonomy_loop(theta, 1.0, 0.5)
    assert loop.holonomy == pytest.approx(rd.holonomy_circle(theta, 1.0, 0.5).holonomy, abs=1e-6)


def test_small_loop_holonomy_is_area_times_density():
    a, b, theta = 1.0, 0.5, 1e-2
    angle = rd.loop_rotation_angle(rd.holonomy_loop(theta, a, b))
    area = 2 * math.pi * a * a * (1 - math.cos(theta))
    assert angle == pytest.approx(area * abs(rd.base_curvature_density(SceneParams(a, b))), rel=1e-3)


def test_momentum_map():
    assert np.allclose(rd.momentum_map([1, 0, 0], [0, 1, 0], [0, 0, 2]), [3, 0, 0])


@settings(max_examples=20)
@given(unit_seed)
def test_reduced_legendre_is_lagrangian_gradient(seed):
    g, gd = unit_and_tangent(seed)
    h = 1e-6
    grad = np.array([
        (rd.reduced_lagrangian(g, gd + h * e, SCENE, BODY) - rd.reduced_lagrangian(g, gd - h * e, SCENE, BODY)) / (2 * h)
        for e in np.eye(3)
    ])
    p = rd.reduced_legendre(g, gd, SCENE, BODY)
    P = np.eye(3) - np.outer(g, g)
    assert np.allclose(P @ grad, P @ p, atol=1e-8)
    assert np.allclose(rd.legendre_matrix(g, SCENE, BODY) @ gd, p, atol=1e-13)
    assert np.allclose(rd.inverse_legendre(g, p, SCENE, BODY), gd, atol=1e-12)


@pytest.mark.parametrize("ratio", [0.37, 1.0, -2.0, 0.0])
def test_legendre_determinant_on_tangent_plane(ratio):
    body, scene = scene_for_ratio(ratio)
    for seed in range(10):
        g, _ = unit_and_tangent(seed)
        E = tangent_basis(g)
        det = np.linalg.det(E.T @ rd.legendre_matrix(g, scene, body) @ E)
        assert det == pytest.approx((1 + scene.ratio) ** 2 * rd.legendre_determinant(g, scene, body), rel=1e-12)


def test_reduced_flow_matches_full_dynamics():
    x0 = default_initial_state(BODY)
    times = np.linspace(0, 5, 11)
    full = integrate(rubber_field(BODY, SCENE), x0, (0, 5), StepperSpec(dt=1e-3), full_state_projector, t_eval=times)
    y0 = rd.reduced_state_from_full(x0, BODY, SCENE)
    red = integrate(rd.reduced_field(BODY, SCENE), y0, (0, 5), StepperSpec(dt=1e-3), rd.reduced_projector, t_eval=times)
    assert np.abs(full.x[:, 9:12] - red.x[:, :3]).max() < 1e-9
    H = [rd.reduced_hamiltonian(y[:3], y[3:], SCENE, BODY) for y in red.x]
    assert max(abs(h / H[0] - 1) for h in H) < 1e-10


@pytest.mark.parametrize("ratio", [0.37, 1.0, 2.0, -2.0, 0.0])
def test_conformal_form_is_closed(ratio):
    body, scene = scene_for_ratio(ratio)
    assert rd.omega_nh_closedness_check(scene, body, 40, 7) < 1e-6


@pytest.mark.parametrize("ratio", [0.37, 2.0, -2.0])
def test_unscaled_form_is_not_closed(ratio):
    body, scene = scene_for_ratio(ratio)
    assert rd.omega_nh_closedness_check(scene, body, 40, 7, exponent=0.0) > 1e-2


def test_hamilton_equations_in_chart():
    body, scene = scene_for_ratio(0.37)
    for z in rd.sample_chart_points(20, 3):
        assert rd.hamilton_residual(z, scene, body) < 1e-6


def _form(entries):
    def form(z):
        W = np.zeros((4, 4))
        for (i, j), c in entries(z).items():
            W[i, j], W[j, i] = c, -c
        return W

    return form


def test_exterior_derivative_of_exact_form_vanishes():
    # d(x0 x1 dx2) = x1 dx0^dx2 + x0 dx1^dx2 is closed.
    exact = _form(lambda z: {(0, 2): z[1], (1, 2): z[0]})
    assert rd.exterior_derivative_residual(exact, np.array([0.3, 0.2, -0.5, 0.1])) < 1e-9


def test_exterior_derivative_detects_volume_form():
    # d of x2 dx0^dx1 - x1 dx0^dx2 + x0 dx1^dx2 is 3 dx0^dx1^dx2.
    vol = _form(lambda z: {(0, 1): z[2], (0, 2): -z[1], (1, 2): z[0]})
    assert rd.exterior_derivative_residual(vol, np.array([0.3, 0.2, -0.5, 0.1])) == pytest.approx(3.0, rel=1e-6)


def test_tampered_exponent_fails_verify(monkeypatch):
    monkeypatch.setattr(SceneParams, "exponent", property(lambda self: 0.5 * (self.ratio - 1.0) + 0.25))
    report = verify("reduction", seed=42)
    failed = {r.name for r in report.results if not r.passed}
    assert not report.passed
    assert "reduction.closedness_0.37" in failed
