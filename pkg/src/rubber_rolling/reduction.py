"""Chaplygin reduction of rubber rolling to the Poisson sphere.

The rubber constraints define a principal connection on ``SO(3) x S_a``. This
module evaluates the connection and its curvature at the section ``R = I``,
integrates holonomy around circles, and works with the compressed system on
``T S^2``:

* ``T_red = (1/2)(1+b/a)^2 [mu b^2 |gdot|^2 + (A(g x gdot), g x gdot)]``
* ``p = G(g) gdot = (1+b/a)^2 [mu b^2 gdot + A(g x gdot) x g]``
* ``omega_nh = omega_can + (J,K)`` with ``(J,K) = jk_term * dArea`` on the unit sphere
* ``f = F^((b-a)/(2a))`` makes ``f omega_nh`` closed.

Wedge convention: 2-forms in a chart ``z`` are stored as antisymmetric
matrices ``W`` with ``omega = (1/2) sum W[i, j] dz_i ^ dz_j``, and
``omega_can = sum_i dp_i ^ dx_i``. The area form on the unit sphere is oriented
by the outward normal, ``dArea = sin(theta) dtheta ^ dphi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import BodyParams, SceneParams, _check_pair, kappa
from .so3 import StepperSpec, cross, hat, integrate, rotation_angle, rotation_log

CHART_POLE_MARGIN = 0.1


def _k2(scene: SceneParams) -> float:
    return (1.0 + scene.ratio) ** 2


# --- connection and curvature ----------------------------------------------


def connection_omega(q: np.ndarray, q_dot: np.ndarray, scene: SceneParams) -> np.ndarray:
    """Space angular velocity ``(1/a^2)(1 + a/b) q x qdot`` of the horizontal motion."""
    if scene.is_plane:
        raise ValueError("the connection is written for a finite fixed sphere")
    a, b = scene.a, scene.b
    return (1.0 + a / b) / (a * a) * cross(np.asarray(q, float), np.asarray(q_dot, float))


def horizontal_lift(
    gamma: np.ndarray, gamma_dot: np.ndarray, R: np.ndarray, scene: SceneParams
) -> tuple[np.ndarray, np.ndarray]:
    """``(qdot, Omega)`` lifting ``gdot``: ``qdot = -b R gdot``, ``Omega = (1+b/a) gdot x g``."""
    g = np.asarray(gamma, float)
    gd = np.asarray(gamma_dot, float)
    R = np.asarray(R, float)
    return -scene.b * (R @ gd), (1.0 + scene.ratio) * cross(gd, g)


def connection_form(
    gamma: np.ndarray, v: np.ndarray, sigma: np.ndarray, scene: SceneParams
) -> np.ndarray:
    """Connection 1-form at the section point ``(gamma, I)``.

    ``v`` is the contact-point velocity scaled by ``1/a`` and ``sigma`` the body
    angular velocity. Horizontal vectors ``(-(b/a) gdot, (1+b/a) gdot x g)`` map
    to zero and vertical generators ``(rho x g, rho)`` map to ``rho``.
    """
    g = np.asarray(gamma, float)
    v = np.asarray(v, float)
    s = np.asarray(sigma, float)
    r = scene.ratio
    # Expanded so that the plane (r = 0) needs no 1/r.
    return (1.0 + r) * cross(g, v) - r * s + (r + 1.0) * (s @ g) * g


def vertical_generator(gamma: np.ndarray, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Infinitesimal generator ``(rho x g, rho)`` of the symmetry group at ``(gamma, I)``."""
    rho = np.asarray(rho, float)
    return cross(rho, np.asarray(gamma, float)), rho


def split_tangent(
    gamma: np.ndarray, v: np.ndarray, sigma: np.ndarray, scene: SceneParams
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Split ``(v, sigma)`` into horizontal and vertical parts at ``(gamma, I)``."""
    rho = connection_form(gamma, v, sigma, scene)
    vv, vs = vertical_generator(gamma, rho)
    v = np.asarray(v, float)
    sigma = np.asarray(sigma, float)
    return (v - vv, sigma - vs), (vv, vs)


def constraint_forms(
    R: np.ndarray, q: np.ndarray, R_dot: np.ndarray, q_dot: np.ndarray, scene: SceneParams
) -> np.ndarray:
    """Rubber constraints evaluated on a tangent vector ``(Rdot, qdot)`` at ``(R, q)``.

    Returns the no-slip residual ``(1 + b/a) qdot - (b/a) omega x q`` (3 entries)
    and the no-twist residual ``(omega, q)/a``, where ``omega`` is the space
    angular velocity ``vee(Rdot R^T)``.
    """
    W = np.asarray(R_dot, float) @ np.asarray(R, float).T
    w = 0.5 * np.array([W[2, 1] - W[1, 2], W[0, 2] - W[2, 0], W[1, 0] - W[0, 1]])
    q = np.asarray(q, float)
    r = scene.ratio
    slip = (1.0 + r) * np.asarray(q_dot, float) - r * cross(w, q)
    return np.concatenate([slip, [(w @ q) / scene.a]])


def equivariance_residual(
    q: np.ndarray, q_dot: np.ndarray, S: np.ndarray, scene: SceneParams, R: Optional[np.ndarray] = None
) -> float:
    """Residual of the constraint forms at ``(R S, q)`` on the right translate of a
    horizontal vector at ``(R, q)``."""
    R = np.eye(3) if R is None else np.asarray(R, float)
    w = connection_omega(q, q_dot, scene)
    R_dot = hat(w) @ R
    base = np.abs(constraint_forms(R, q, R_dot, q_dot, scene)).max()
    moved = np.abs(constraint_forms(R @ S, q, R_dot @ S, q_dot, scene)).max()
    return float(max(base, moved))


def curvature_2form(gamma: np.ndarray, scene: SceneParams) -> tuple[float, np.ndarray]:
    """Curvature ``(1 - b^2/a^2) gamma dArea`` on the unit Poisson sphere."""
    r = scene.ratio
    return 1.0 - r * r, np.asarray(gamma, float).copy()


def base_curvature_density(scene: SceneParams) -> float:
    """Frame rotation per unit area of ``S_a``: ``1/a^2 - 1/b^2``.

    Related to the unit-sphere coefficient by ``1 - b^2/a^2 = -b^2 (1/a^2 - 1/b^2)``.
    """
    a, b = scene.a, scene.b
    return (0.0 if scene.is_plane else 1.0 / (a * a)) - 1.0 / (b * b)


@dataclass(frozen=True)
class Holonomy:
    holonomy: float
    frame_rotation: float


def holonomy_circle(theta: float, a: float, b: float) -> Holonomy:
    """Closed-form holonomy ``-cos(theta) sqrt(1 + (a/b)^2 tan^2 theta)`` of the
    circle at polar angle ``theta`` on ``S_a``, and the frame rotation
    ``2 pi - 2 pi |holonomy|``."""
    if not 0.0 < theta < 0.5 * math.pi:
        raise ValueError("theta must lie in (0, pi/2)")
    h = -math.cos(theta) * math.sqrt(1.0 + (a / b) ** 2 * math.tan(theta) ** 2)
    return Holonomy(h, 2.0 * math.pi * (1.0 - abs(h)))


@dataclass(frozen=True)
class LoopHolonomy:
    holonomy: float
    frame_rotation: float
    final_rotation: np.ndarray


def holonomy_loop(theta: float, a: float, b: float, steps: int = 4000) -> LoopHolonomy:
    """Transport a frame around the circle at polar angle ``theta`` with the connection.

    Integrates ``R' = hat(omega) R`` over the azimuth with RK4. The holonomy is
    the total spin of ``Rot_z(-phi) R(phi)`` in turns, with the sign chosen so
    that vanishing loops give ``-1``.
    """
    scene = SceneParams(a, b)
    st, ct = math.sin(theta), math.cos(theta)

    def f(phi: float, x: np.ndarray) -> np.ndarray:
        q = a * np.array([st * math.cos(phi), st * math.sin(phi), ct])
        qd = a * np.array([-st * math.sin(phi), st * math.cos(phi), 0.0])
        w = connection_omega(q, qd, scene)
        return (hat(w) @ x.reshape(3, 3)).ravel()

    def proj(x: np.ndarray) -> np.ndarray:
        u, _, vt = np.linalg.svd(x.reshape(3, 3))
        return (u @ vt).ravel()

    traj = integrate(f, np.eye(3).ravel(), (0.0, 2 * math.pi), StepperSpec(dt=2 * math.pi / steps), proj)
    spin = 0.0
    prev = None
    for phi, x in zip(traj.t, traj.x):
        c, s = math.cos(phi), math.sin(phi)
        rz = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
        m = rz @ x.reshape(3, 3)
        if prev is not None:
            spin += float(np.linalg.norm(rotation_log(m @ prev.T)))
        prev = m
    hol = -spin / (2 * math.pi)
    final = traj.x[-1].reshape(3, 3)
    return LoopHolonomy(hol, 2 * math.pi * (1 - abs(hol)), final)


def folded_angle(angle: float) -> float:
    """Reduce an angle to the rotation angle in [0, pi] of the same rotation."""
    r = math.fmod(abs(angle), 2 * math.pi)
    return min(r, 2 * math.pi - r)


def loop_rotation_angle(loop: LoopHolonomy) -> float:
    """Rotation angle of the transported frame after one loop."""
    return rotation_angle(loop.final_rotation)


# --- momentum map and kinetic energy ---------------------------------------


def momentum_map(m: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``J = m + q x r`` for the rotation-group action on ``SO(3) x S_a``."""
    return np.asarray(m, float) + cross(np.asarray(q, float), np.asarray(r, float))


def full_kinetic_energy(Omega: np.ndarray, q_dot: np.ndarray, body: BodyParams, scene: SceneParams) -> float:
    """``T = (1/2)(A Omega, Omega) + (1/2) mu (1 + b/a)^2 |qdot|^2``."""
    Omega = np.asarray(Omega, float)
    q_dot = np.asarray(q_dot, float)
    return 0.5 * float(Omega @ (body.A @ Omega)) + 0.5 * body.mu * _k2(scene) * float(q_dot @ q_dot)


def full_legendre(Omega: np.ndarray, q_dot: np.ndarray, body: BodyParams, scene: SceneParams):
    """Momenta ``(A Omega, mu (1+b/a)^2 qdot)`` conjugate to ``(Omega, qdot)``."""
    return body.A @ np.asarray(Omega, float), body.mu * _k2(scene) * np.asarray(q_dot, float)


def jk_term(gamma: np.ndarray, gamma_dot: np.ndarray, scene: SceneParams, body: BodyParams) -> float:
    """Coefficient of the area form in ``(J,K)``: ``(1 - b/a)(1 + b/a)^2 (g, A(gdot x g))``."""
    g = np.asarray(gamma, float)
    gd = np.asarray(gamma_dot, float)
    r = scene.ratio
    return (1.0 - r) * (1.0 + r) ** 2 * float(g @ (body.A @ cross(gd, g)))


def reduced_lagrangian(gamma, gamma_dot, scene: SceneParams, body: BodyParams) -> float:
    g = np.asarray(gamma, float)
    gd = np.asarray(gamma_dot, float)
    w = cross(g, gd)
    return 0.5 * _k2(scene) * (body.mu * body.b**2 * float(gd @ gd) + float(w @ (body.A @ w)))


def legendre_matrix(gamma: np.ndarray, scene: SceneParams, body: BodyParams) -> np.ndarray:
    """Matrix of ``v -> G(g) v = (1+b/a)^2 [mu b^2 v + A(g x v) x g]`` on R^3."""
    g = np.asarray(gamma, float)
    H = hat(g)
    # A(g x v) x g = -hat(g) A hat(g) v
    return _k2(scene) * (body.mu * body.b**2 * np.eye(3) - H @ body.A @ H)


def reduced_legendre(gamma, gamma_dot, scene: SceneParams, body: BodyParams) -> np.ndarray:
    g = np.asarray(gamma, float)
    gd = np.asarray(gamma_dot, float)
    return _k2(scene) * (body.mu * body.b**2 * gd + cross(body.A @ cross(g, gd), g))


def inverse_legendre(gamma, p_gamma, scene: SceneParams, body: BodyParams) -> np.ndarray:
    """Tangent velocity ``gdot`` with ``G(g) gdot = p`` (``p`` tangent at ``g``)."""
    g = np.asarray(gamma, float)
    M = legendre_matrix(g, scene, body)
    P = np.eye(3) - np.outer(g, g)
    return np.linalg.solve(P @ M @ P + np.outer(g, g), P @ np.asarray(p_gamma, float))


def legendre_determinant(gamma, scene: SceneParams, body: BodyParams) -> float:
    """``F(g) = I1 I2 I3 (1+b/a)^2 [(A^-1 g, g) + mu b^2 sum (g_j^2+g_k^2)/(I_j I_k) + mu^2 b^4/(I1 I2 I3)]``.

    The determinant of ``G`` restricted to ``T_g S^2`` in an orthonormal basis is
    ``(1+b/a)^2 F(g)``.
    """
    g = np.asarray(gamma, float)
    i1, i2, i3 = body.inertia
    m = body.mu * body.b**2
    g1, g2, g3 = g * g
    s = (g2 + g3) / (i2 * i3) + (g1 + g3) / (i1 * i3) + (g1 + g2) / (i1 * i2)
    prod = i1 * i2 * i3
    return prod * _k2(scene) * (g1 / i1 + g2 / i2 + g3 / i3 + m * s + m * m / prod)


def conformal_factor(gamma, scene: SceneParams, body: BodyParams, exponent: Optional[float] = None) -> float:
    """``F(g)^((b-a)/(2a))``; ``exponent`` overrides the power (used by negative controls)."""
    e = scene.exponent if exponent is None else exponent
    return legendre_determinant(gamma, scene, body) ** e


def reconstruct_contact_point(R: np.ndarray, gamma: np.ndarray, a: float) -> np.ndarray:
    """Contact point ``a R g`` on the fixed sphere."""
    return a * (np.asarray(R, float) @ np.asarray(gamma, float))


# --- compressed dynamics ----------------------------------------------------


def reduced_acceleration(gamma, gamma_dot, scene: SceneParams, body: BodyParams) -> np.ndarray:
    """``gddot`` of the compressed rubber flow, computed through the horizontal lift."""
    _check_pair(body, scene)
    g = np.asarray(gamma, float)
    gd = np.asarray(gamma_dot, float)
    k = kappa(scene)
    d = body.a_tilde_diag()
    w = (1.0 + scene.ratio) * cross(gd, g)
    L = d * w
    ag = g / d
    wxl = cross(w, L)
    tau = (wxl @ ag + k * (w @ cross(w, g))) / (g @ ag)
    w_dot = (tau * g - wxl) / d
    return k * (cross(gd, w) + cross(g, w_dot))


def reduced_tangent_field(body: BodyParams, scene: SceneParams):
    """Vector field on ``(g, gdot)`` in R^6 of the compressed rubber flow."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate([y[3:], reduced_acceleration(y[:3], y[3:], scene, body)])

    return f


def reduced_field(body: BodyParams, scene: SceneParams):
    """Vector field on ``(g, p_g)`` in R^6 (the reduced cotangent flow)."""
    k2 = _k2(scene)
    m = body.mu * body.b**2
    A = body.A

    def f(t: float, y: np.ndarray) -> np.ndarray:
        g, p = y[:3], y[3:]
        gd = inverse_legendre(g, p, scene, body)
        gdd = reduced_acceleration(g, gd, scene, body)
        p_dot = k2 * (m * gdd + cross(A @ cross(g, gdd), g) + cross(A @ cross(g, gd), gd))
        return np.concatenate([gd, p_dot])

    return f


def reduced_projector(y: np.ndarray) -> np.ndarray:
    g = y[:3] / np.linalg.norm(y[:3])
    p = y[3:] - (y[3:] @ g) * g
    return np.concatenate([g, p])


def reduced_hamiltonian(gamma, p_gamma, scene: SceneParams, body: BodyParams) -> float:
    """``H = (1/2)(p, G^-1 p)`` on the cotangent bundle of the sphere."""
    gd = inverse_legendre(gamma, p_gamma, scene, body)
    return 0.5 * float(np.asarray(p_gamma, float) @ gd)


def reduced_state_from_full(x: np.ndarray, body: BodyParams, scene: SceneParams) -> np.ndarray:
    """``(g, p_g)`` of a flat full state."""
    g = x[9:12]
    w = x[12:15] / body.a_tilde_diag()
    gd = kappa(scene) * cross(g, w)
    return np.concatenate([g, reduced_legendre(g, gd, scene, body)])


# --- exterior-derivative check in a spherical chart -------------------------


def _sphere_chart(theta: float, phi: float):
    st, ct, sp, cp = math.sin(theta), math.cos(theta), math.sin(phi), math.cos(phi)
    g = np.array([st * cp, st * sp, ct])
    J = np.array([[ct * cp, ct * sp, -st], [-st * sp, st * cp, 0.0]])  # rows d/dtheta, d/dphi
    # second derivatives [i][j]
    H = np.array(
        [
            [[-st * cp, -st * sp, -ct], [-ct * sp, ct * cp, 0.0]],
            [[-ct * sp, ct * cp, 0.0], [-st * cp, -st * sp, 0.0]],
        ]
    )
    return g, J, H


def nh_form_matrix(
    z: np.ndarray, scene: SceneParams, body: BodyParams, exponent: Optional[float] = None
) -> np.ndarray:
    """Antisymmetric matrix of ``f (omega_can + (J,K))`` in chart ``z = (theta, phi, u1, u2)``.

    The fibre coordinates are the chart velocities, ``gdot = u1 d/dtheta + u2 d/dphi``,
    so this is the form pulled back to ``T S^2`` by the reduced Legendre map.
    The momentum derivatives are analytic; only the outer ``d`` is numerical.
    """
    theta, phi, u1, u2 = (float(v) for v in z)
    g, J, H = _sphere_chart(theta, phi)
    u = np.array([u1, u2])
    w = u @ J
    G = legendre_matrix(g, scene, body)
    p_amb = G @ w
    k2 = _k2(scene)
    m = body.mu * body.b**2
    A = body.A
    W = np.zeros((4, 4))
    # d p_i / d z_a for p_i = J_i . p_amb
    dp = np.zeros((4, 2))
    for j in range(2):
        wj = u @ H[j]
        dG = k2 * (m * wj + cross(A @ (cross(J[j], w) + cross(g, wj)), g) + cross(A @ cross(g, w), J[j]))
        for i in range(2):
            dp[j, i] = H[i, j] @ p_amb + J[i] @ dG
    for j in range(2):
        for i in range(2):
            dp[2 + j, i] = J[i] @ (G @ J[j])
    for a_ in range(4):
        for i in range(2):
            W[a_, i] += dp[a_, i]
            W[i, a_] -= dp[a_, i]
    jk = jk_term(g, w, scene, body) * math.sin(theta)
    W[0, 1] += jk
    W[1, 0] -= jk
    return conformal_factor(g, scene, body, exponent) * W


def exterior_derivative_residual(form, z: np.ndarray, h: float = 1e-5) -> float:
    """Largest coefficient of ``d omega`` at ``z`` by central differences of ``form``."""
    z = np.asarray(z, float)
    n = len(z)
    D = np.zeros((n, n, n))
    for a_ in range(n):
        e = np.zeros(n)
        e[a_] = h
        D[a_] = (form(z + e) - form(z - e)) / (2 * h)
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                worst = max(worst, abs(D[i, j, k] + D[j, k, i] + D[k, i, j]))
    return worst


def sample_chart_points(count: int, seed: int, speed: float = 1.0) -> np.ndarray:
    """Chart points ``(theta, phi, u1, u2)`` with the polar angle kept off the poles."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        theta = math.acos(rng.uniform(-1.0, 1.0))
        if theta < CHART_POLE_MARGIN or theta > math.pi - CHART_POLE_MARGIN:
            continue
        phi = rng.uniform(0.0, 2 * math.pi)
        u = rng.uniform(-speed, speed, 2)
        pts.append([theta, phi, u[0], u[1]])
    return np.array(pts)


def omega_nh_closedness_check(
    scene: SceneParams,
    body: BodyParams,
    sample_count: int = 200,
    rng_seed: int = 42,
    exponent: Optional[float] = None,
    h: float = 1e-5,
) -> float:
    """Max finite-difference coefficient of ``d[f (omega_can + (J,K))]`` over chart samples."""
    _check_pair(body, scene)

    def form(z):
        return nh_form_matrix(z, scene, body, exponent)

    return max(exterior_derivative_residual(form, z, h) for z in sample_chart_points(sample_count, rng_seed))


def chart_energy(z: np.ndarray, scene: SceneParams, body: BodyParams) -> float:
    theta, phi, u1, u2 = (float(v) for v in z)
    g, J, _ = _sphere_chart(theta, phi)
    return reduced_lagrangian(g, np.array([u1, u2]) @ J, scene, body)


def chart_velocity(z: np.ndarray, scene: SceneParams, body: BodyParams) -> np.ndarray:
    """Compressed rubber flow written in the chart ``(theta, phi, u1, u2)``."""
    theta, phi, u1, u2 = (float(v) for v in z)
    g, J, H = _sphere_chart(theta, phi)
    u = np.array([u1, u2])
    w = u @ J
    acc = reduced_acceleration(g, w, scene, body)
    # acc = J^T u_dot + sum_ij H_ij u_i u_j ; solve for u_dot in the tangent plane
    rest = acc - np.einsum("i,j,ijk->k", u, u, H)
    u_dot = np.linalg.lstsq(J.T, rest, rcond=None)[0]
    return np.array([u1, u2, u_dot[0], u_dot[1]])


def hamilton_residual(z: np.ndarray, scene: SceneParams, body: BodyParams, h: float = 1e-6) -> float:
    """Max entry of ``i_X omega_nh + dH`` for the compressed flow ``X`` at ``z``."""
    z = np.asarray(z, float)
    W = nh_form_matrix(z, scene, body, exponent=0.0)
    X = chart_velocity(z, scene, body)
    dH = np.zeros(4)
    for a_ in range(4):
        e = np.zeros(4)
        e[a_] = h
        dH[a_] = (chart_energy(z + e, scene, body) - chart_energy(z - e, scene, body)) / (2 * h)
    # (i_X omega)_b = sum_a X_a W[a, b]
    return float(np.abs(X @ W + dH).max())
