import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rubber_rolling import reduction as rd
from rubber_rolling import spheroconical as sc
from rubber_rolling.dynamics import BodyParams, SceneParams
from rubber_rolling.so3 import IntegrationError
from rubber_rolling.verification import scene_for_ratio

I = (1.0, 2.0, 3.0)
comp = st.floats(-1, 1).filter(lambda v: abs(v) > 1e-2)


@given(comp, comp, comp)
def test_roundtrip(x, y, z):
    g = np.array([x, y, z]) / math.sqrt(x * x + y * y + z * z)
    pt = sc.lambda_from_gamma(g, I)
    assert I[0] < pt.lambda1 < I[1] < pt.lambda2 < I[2]
    assert np.allclose(sc.gamma_from_lambda(pt, I), g, atol=1e-12)
    assert pt.octant == tuple(int(np.sign(v)) for v in g)


@settings(max_examples=50)
@given(comp, comp, comp)
def test_roots_solve_quadric(x, y, z):
    g = np.array([x, y, z]) / math.sqrt(x * x + y * y + z * z)
    for lam in sc.lambda_roots(g, I):
        # sum g_i^2 / (I_i - l) = 0 cleared of denominators.
        poly = sum(g[i] ** 2 * np.prod([I[j] - lam for j in range(3) if j != i]) for i in range(3))
        assert abs(poly) < 1e-12


def test_coordinate_plane_raises():
    with pytest.raises(sc.BoundaryError):
        sc.lambda_from_gamma([0.0, 0.6, 0.8], I)


def test_interlacing_is_checked():
    with pytest.raises(ValueError):
        sc.SpheroConicalPoint(2.5, 1.5, (1, 1, 1)).check(I)


def numeric_partials(pt, h=1e-6):
    out = []
    for k in range(2):
        d = np.zeros(2)
        d[k] = h
        p = sc.SpheroConicalPoint(pt.lambda1 + d[0], pt.lambda2 + d[1], pt.octant)
        m = sc.SpheroConicalPoint(pt.lambda1 - d[0], pt.lambda2 - d[1], pt.octant)
        out.append((sc.gamma_from_lambda(p, I) - sc.gamma_from_lambda(m, I)) / (2 * h))
    return np.array(out)


@pytest.mark.parametrize("seed", range(5))
def test_partials_metric_and_area_against_finite_differences(seed):
    for pt, ld in sc.sample_interior(20, I, seed):
        J = numeric_partials(pt)
        assert np.allclose(sc.lambda_partials(pt, I), J, atol=1e-7)
        k1, k2 = sc.metric_coefficients(pt, I)["standard"]
        assert J[0] @ J[0] == pytest.approx(k1, rel=1e-6)
        assert J[1] @ J[1] == pytest.approx(k2, rel=1e-6)
        assert abs(J[0] @ J[1]) < 1e-6 * max(k1, k2)
        g = sc.gamma_from_lambda(pt, I)
        assert g @ np.cross(J[0], J[1]) == pytest.approx(sc.area_form_signed(pt, I), rel=1e-6)
        gd = ld @ J
        A = np.diag(I)
        assert g @ (A @ np.cross(gd, g)) == pytest.approx(sc.gyroscopic_lambda(pt, ld, I), rel=1e-6, abs=1e-9)


def test_velocity_maps_are_inverse():
    for pt, ld in sc.sample_interior(20, I, 3):
        g = sc.gamma_from_lambda(pt, I)
        gd = sc.gamma_dot_from_lambda(pt, ld, I)
        assert abs(g @ gd) < 1e-12
        assert np.allclose(sc.lambda_dot_from_gamma(g, gd, I), ld, atol=1e-10)


def test_closed_form_identities():
    for pt, _ in sc.sample_interior(50, I, 4):
        for pair in (sc.inverse_inertia_identity(pt, I), sc.pair_sum_identity(pt, I)):
            assert pair[0] == pytest.approx(pair[1], rel=1e-12)


@pytest.mark.parametrize("ratio", [0.37, 1.0, -2.0, 0.0])
def test_energy_determinant_and_jk_in_lambda(ratio):
    body, scene = scene_for_ratio(ratio)
    for pt, ld in sc.sample_interior(30, I, 5):
        g = sc.gamma_from_lambda(pt, I)
        J = sc.lambda_partials(pt, I)
        gd = ld @ J
        T = rd.reduced_lagrangian(g, gd, scene, body)
        assert sc.reduced_energy_lambda(pt, ld, scene, body) == pytest.approx(T, rel=1e-10)
        F = rd.legendre_determinant(g, scene, body)
        assert sc.legendre_determinant_lambda(pt, scene, body) == pytest.approx(F, rel=1e-10)
        tri = g @ np.cross(J[0], J[1])
        assert sc.jk_lambda(pt, ld, scene, body) == pytest.approx(rd.jk_term(g, gd, scene, body) * tri, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("normalization", sc.NORMALIZATIONS)
def test_darboux_energy_matches_kinetic(normalization):
    body, scene = scene_for_ratio(0.37)
    for pt, ld in sc.sample_interior(20, I, 6):
        s = sc.darboux_momenta(pt, ld, scene, body, normalization)
        assert sc.hamiltonian_lambda(s, scene, body, normalization) == pytest.approx(
            sc.reduced_energy_lambda(pt, ld, scene, body), rel=1e-12
        )


def test_normalizations_differ_by_constant():
    body, scene = scene_for_ratio(0.37)
    for l1, l2 in [(1.2, 2.3), (1.9, 2.9)]:
        ratio = sc.darboux_factor(l1, l2, scene, body, "full") / sc.darboux_factor(l1, l2, scene, body, "product")
        assert ratio == pytest.approx(sc.conformal_prefactor(scene), rel=1e-14)


def test_unknown_normalization():
    body, scene = scene_for_ratio(0.37)
    with pytest.raises(ValueError):
        sc.darboux_factor(1.5, 2.5, scene, body, "other")


@pytest.mark.parametrize("normalization", sc.NORMALIZATIONS)
def test_closed_form_partials_match_fd(normalization):
    body, scene = scene_for_ratio(-2.0)
    for pt, ld in sc.sample_interior(10, I, 8):
        s = sc.darboux_momenta(pt, ld, scene, body, normalization)
        a = sc.hamiltonian_partials(s, scene, body, normalization)
        b = sc.hamiltonian_partials_fd(s, scene, body, normalization)
        assert np.allclose(a, b, rtol=1e-6, atol=1e-10 * np.abs(a).max())


@pytest.mark.parametrize("ratio", [0.4, 1.0, 2.0, -2.0, 0.0])
@pytest.mark.parametrize("normalization", sc.NORMALIZATIONS)
def test_xnh_is_conformal_to_xh(ratio, normalization):
    body, scene = scene_for_ratio(ratio)
    assert sc.xnh_equals_f_xh_check(scene, body, 30, 9, normalization) < 1e-6


def test_xnh_wrong_exponent_fails():
    body, scene = scene_for_ratio(0.4)
    assert sc.xnh_equals_f_xh_check(scene, body, 30, 9, exponent=-0.5) > 1e-2


def test_darboux_run_conserves_and_writes(tmp_path):
    body, scene = scene_for_ratio(0.4)
    s0 = sc.darboux_momenta(sc.SpheroConicalPoint(1.5, 2.5, (1, 1, 1)), np.array([0.005, -0.004]), scene, body)
    tr = sc.integrate_darboux(s0, scene, body, 5.0, 1e-3)
    H = [sc.hamiltonian_lambda(sc.DarbouxState.from_array(y), scene, body) for y in tr.x]
    assert max(abs(h / H[0] - 1) for h in H) < 1e-10
    assert np.all(np.diff(tr.x[:, 4]) > 0)
    p = tmp_path / "d.csv"
    sc.write_darboux_csv(p, tr, scene, body)
    rows = sc.read_darboux_csv(p)
    assert rows.shape == (len(tr.t), len(sc.DARBOUX_COLUMNS))


def test_darboux_stops_at_boundary():
    body, scene = scene_for_ratio(0.4)
    s0 = sc.darboux_momenta(sc.SpheroConicalPoint(1.05, 2.5, (1, 1, 1)), np.array([-0.2, 0.0]), scene, body)
    tr = sc.integrate_darboux(s0, scene, body, 50.0, 1e-4)
    assert tr.status == "event"
    assert sc.boundary_distance(tr.x[-1, 0], tr.x[-1, 1], I) < 1e-2


def test_leaving_chart_is_an_integration_error():
    body, scene = scene_for_ratio(0.4)
    s0 = sc.darboux_momenta(sc.SpheroConicalPoint(1.05, 2.5, (1, 1, 1)), np.array([-2.0, 0.0]), scene, body)
    with pytest.raises(IntegrationError):
        sc.integrate_darboux(s0, scene, body, 50.0, 1e-4)


def test_separable_after_product_power():
    # (l2 - l1) Pi^r 2H is a sum of one-variable terms for every ratio r,
    # so the plane multiplier (l2 - l1) alone separates exactly when r = 0.
    for ratio in (0.0, 0.5, 1.0, -2.0):
        body, scene = scene_for_ratio(ratio)
        m = body.mu * body.b**2
        P = (0.7, -0.4)

        def G(l1, l2):
            H = sc.hamiltonian_lambda(sc.DarbouxState(l1, l2, *P), scene, body)
            return (l2 - l1) * ((l1 + m) * (l2 + m)) ** scene.ratio * 2 * H

        h = 1e-3
        for l1, l2 in [(1.3, 2.4), (1.7, 2.8), (1.5, 2.1)]:
            mixed = (G(l1 + h, l2 + h) - G(l1 + h, l2 - h) - G(l1 - h, l2 + h) + G(l1 - h, l2 - h)) / (4 * h * h)
            assert abs(mixed) < 1e-6 * abs(G(l1, l2))


@pytest.mark.parametrize("ratio,separable", [(0.0, True), (1.0, False), (0.5, False), (2.0, False)])
def test_separability_matrix(ratio, separable):
    body, scene = scene_for_ratio(ratio)
    res = sc.separability_check(scene, body, 50, 42)
    assert res.separable is separable
    if separable:
        assert res.residual < 1e-8
    else:
        assert res.residual > 1e-3


def test_separability_near_plane_is_linear_in_ratio():
    # Small b/a is a plane proxy only in the limit: the residual is O(b/a).
    vals = []
    for ratio in (1e-3, 1e-2):
        body, scene = scene_for_ratio(ratio)
        vals.append(sc.separability_check(scene, body, 50, 42).residuals["plane"])
    assert vals[1] / vals[0] == pytest.approx(10.0, rel=0.05)


def test_separability_is_scale_invariant():
    base = sc.separability_check(SceneParams(math.inf, 0.5), BodyParams(1.0, I, 0.5), 30, 1)
    scaled = sc.separability_check(SceneParams(math.inf, 0.5), BodyParams(1.0, tuple(3 * v for v in I), 0.5), 30, 1)
    assert scaled.residual < 1e-8 and base.residual < 1e-8


def test_darboux_requires_distinct_inertia():
    body = BodyParams(1.0, (1.0, 1.0, 3.0), 0.5)
    with pytest.raises(ValueError):
        sc.lambda_from_gamma([0.5, 0.5, 0.7071], body.inertia)
