import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.spatial.transform import Rotation

from rubber_rolling.so3 import (
    IntegrationError,
    StepperSpec,
    cross,
    hat,
    integrate,
    project_rotation,
    rotation_angle,
    rotation_exp,
    rotation_log,
    vee,
)

finite = st.floats(-10, 10, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


@given(vec3, vec3)
def test_hat_is_cross_product(u, v):
    assert np.allclose(hat(u) @ v, np.cross(u, v), atol=1e-12)
    assert np.allclose(cross(u, v), np.cross(u, v), atol=1e-12)


@given(vec3)
def test_hat_vee_roundtrip(u):
    m = hat(u)
    assert np.allclose(m, -m.T)
    assert np.array_equal(vee(m), u)


def test_vee_rejects_non_skew():
    with pytest.raises(ValueError):
        vee(np.eye(3))


@given(st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)))
def test_exp_matches_scipy(w):
    w = np.array(w)
    assert np.allclose(rotation_exp(w), Rotation.from_rotvec(w).as_matrix(), atol=1e-12)


@given(st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)))
def test_log_inverts_exp(w):
    w = np.array(w)
    assert np.allclose(rotation_log(rotation_exp(w)), w, atol=1e-9)
    assert rotation_angle(rotation_exp(w)) == pytest.approx(np.linalg.norm(w), abs=1e-9)


def test_log_near_pi():
    w = np.array([0.0, 0.0, math.pi - 1e-9])
    assert np.allclose(rotation_exp(rotation_log(rotation_exp(w))), rotation_exp(w), atol=1e-8)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_projection_is_nearest_rotation(seed):
    rng = np.random.default_rng(seed)
    R = Rotation.random(random_state=seed).as_matrix()
    P = project_rotation(R + 1e-3 * rng.standard_normal((3, 3)))
    assert np.allclose(P.T @ P, np.eye(3), atol=1e-13)
    assert np.linalg.det(P) == pytest.approx(1.0, abs=1e-13)
    assert np.allclose(project_rotation(R), R, atol=1e-13)


def test_projection_rejects_reflection():
    with pytest.raises(ValueError):
        project_rotation(np.diag([1.0, 1.0, -1.0]))


def oscillator(t, x):
    return np.array([x[1], -x[0]])


def test_rk4_fourth_order():
    errs = []
    for dt in (0.1, 0.05):
        tr = integrate(oscillator, [1.0, 0.0], (0.0, 2.0), StepperSpec(dt=dt))
        errs.append(abs(tr.final[0] - math.cos(2.0)))
    assert 14 < errs[0] / errs[1] < 18


def test_rk45_matches_scipy_oracle():
    def f(t, x):
        return np.array([x[1], -math.sin(x[0]) - 0.1 * x[1]])

    tr = integrate(f, [1.0, 0.0], (0.0, 10.0), StepperSpec(method="rk45", dt=1.0, atol=1e-12, rtol=1e-12))
    ref = solve_ivp(f, (0, 10), [1.0, 0.0], method="DOP853", rtol=1e-13, atol=1e-13)
    assert np.allclose(tr.final, ref.y[:, -1], atol=1e-9)


def test_backwards_span_recovers_initial_state():
    fwd = integrate(oscillator, [1.0, 0.0], (0.0, 3.0), StepperSpec(dt=1e-3))
    back = integrate(oscillator, fwd.final, (3.0, 0.0), StepperSpec(dt=1e-3))
    assert back.t[-1] == 0.0
    assert np.allclose(back.final, [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("method", ["rk4", "rk45"])
def test_t_eval_is_hit_exactly(method):
    times = [0.0, 0.3, 0.7777, 1.5]
    tr = integrate(oscillator, [1.0, 0.0], (0.0, 1.5), StepperSpec(method=method, dt=0.01), t_eval=times)
    assert list(tr.t) == times
    assert np.allclose(tr.x[:, 0], np.cos(times), atol=1e-7)


def test_stop_event():
    tr = integrate(oscillator, [1.0, 0.0], (0.0, 10.0), StepperSpec(dt=1e-2), stop=lambda t, x: x[0] < 0)
    assert tr.status == "event"
    assert tr.t[-1] == pytest.approx(math.pi / 2, abs=2e-2)


def test_projector_is_applied():
    def drift(t, x):
        return np.array([1.0, 0.0])

    tr = integrate(drift, [1.0, 0.0], (0.0, 1.0), StepperSpec(dt=0.1), projector=lambda x: x / np.linalg.norm(x))
    assert np.allclose(np.linalg.norm(tr.x, axis=1), 1.0)


def test_sample_every_keeps_endpoint():
    tr = integrate(oscillator, [1.0, 0.0], (0.0, 1.0), StepperSpec(dt=0.01), sample_every=30)
    assert tr.t[0] == 0.0 and tr.t[-1] == pytest.approx(1.0, abs=1e-13)
    assert len(tr) == 5


def test_blowup_raises_with_time():
    with pytest.raises(IntegrationError) as exc:
        integrate(lambda t, x: x * x, [1.0], (0.0, 2.0), StepperSpec(method="rk45", dt=0.1))
    assert 0.9 < exc.value.t <= 1.0


@pytest.mark.parametrize("kwargs", [{"dt": 0.0}, {"dt": -1.0}, {"method": "euler"}, {"atol": 0.0}])
def test_stepper_spec_validation(kwargs):
    with pytest.raises(ValueError):
        StepperSpec(**kwargs)
