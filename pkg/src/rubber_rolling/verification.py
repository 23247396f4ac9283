"""Registered invariant checks and the verification report.

Each check returns a residual; it passes when ``residual < tolerance`` (or
``residual > tolerance`` for sensitivity checks, marked ``above=True``).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import frames, reduction
from . import spheroconical as sc
from .dynamics import (
    BodyParams,
    SceneParams,
    default_initial_state,
    duistermaat_identities,
    full_state_projector,
    marble_field,
    marble_gamma_L_field,
    marble_integrals,
    marble_measure_density,
    weighted_divergence,
    rubber_constraint,
    rubber_energy,
    rubber_field,
)
from .so3 import StepperSpec, hat, integrate, project_rotation, rotation_exp, vee

SCOPES = ("so3", "frames", "dynamics", "reduction", "spheroconical")
DEFAULT_INERTIA = (1.0, 2.0, 3.0)
DEFAULT_MU = 1.0
MARBLE_KAPPAS = (-1.0, 0.5, 1.0, 2.0)
CLOSEDNESS_RATIOS = (0.37, 1.0, 2.0, -2.0, 0.0)
SEPARABILITY_RATIOS = (0.0, 1.0, 0.5, 2.0, -2.0)
HOLONOMY_THETAS = (0.1, 0.3, 0.6)


def scene_for_ratio(ratio: float, radius: float = 0.5, mu: float = DEFAULT_MU, inertia=DEFAULT_INERTIA):
    """Body of physical radius ``radius`` and a scene with ``b/a = ratio`` (0 is the plane)."""
    b = radius if ratio >= 0 else -radius
    body = BodyParams(mu, inertia, b)
    scene = SceneParams.plane(b) if ratio == 0 else SceneParams(b / ratio, b)
    return body, scene


@dataclass(frozen=True)
class Check:
    name: str
    scope: str
    fn: Callable[[int], float]
    tolerance: float
    above: bool = False


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    wall: float
    above: bool = False

    def line(self) -> str:
        op = ">" if self.above else "<"
        flag = "PASS" if self.passed else "FAIL"
        return f"{self.name:<44} residual={self.residual:.3e} {op} {self.tolerance:.1e}  {flag}  {self.wall:7.2f}s"


@dataclass
class VerificationReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def text(self) -> str:
        n_ok = sum(r.passed for r in self.results)
        return "\n".join(self.lines() + [f"{n_ok}/{len(self.results)} checks passed"])


# --- so3 --------------------------------------------------------------------


def _hat_vee(seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        v, w = rng.normal(size=3), rng.normal(size=3)
        worst = max(worst, np.abs(hat(v) @ w - np.cross(v, w)).max(), np.abs(vee(hat(v)) - v).max())
    return worst


def _polar(seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        R = rotation_exp(rng.normal(size=3))
        Q = project_rotation(R + 1e-6 * rng.normal(size=(3, 3)))
        worst = max(worst, np.abs(Q.T @ Q - np.eye(3)).max(), abs(np.linalg.det(Q) - 1))
    return worst


def _rk4_order(seed: int) -> float:
    def f(t, x):
        return np.array([x[1], -x[0]])

    errs = []
    for dt in (0.1, 0.05):
        tr = integrate(f, [1.0, 0.0], (0.0, 2.0), StepperSpec(dt=dt))
        errs.append(abs(tr.final[0] - math.cos(2.0)))
    return abs(math.log2(errs[0] / errs[1]) - 4.0)


def _rk45_accuracy(seed: int) -> float:
    def f(t, x):
        return np.array([x[1], -x[0]])

    tr = integrate(f, [1.0, 0.0], (0.0, 10.0), StepperSpec(method="rk45", dt=0.5))
    return abs(tr.final[0] - math.cos(10.0))


# --- frames -----------------------------------------------------------------


def _reconstruct_roundtrip(seed: int) -> float:
    def kg(s):
        return 0.7 + 0.2 * math.sin(s)

    c = frames.reconstruct_spherical_curve(kg, 2.0, 5.0, [0, 0, 2.0], [1.0, 0, 0])
    return max(abs(frames.frame_invariants(c, s).kappa_g - kg(s)) for s in np.linspace(0.2, 4.8, 25))


def rolling_kappa_g_residual(a: float, b: float, t_end: float = 3.0, stride: int = 25) -> float:
    """Largest ``|kappa_g(base) - kappa_g(body)|`` along a rubber trajectory.

    The base curve ``q = a R g`` is oriented so that its normal agrees with the
    rotated exterior normal of the body curve ``Q = -b g``.
    """
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, b)
    scene = SceneParams(a, b)
    tr = integrate(rubber_field(body, scene), default_initial_state(body), (0.0, t_end), StepperSpec(),
                   full_state_projector)
    R = tr.x[:, :9].reshape(-1, 3, 3)
    g = tr.x[:, 9:12]
    q = a * np.einsum("nij,nj->ni", R, g)
    base = frames.SphericalCurve.from_points(q, a, orientation=-1 if b > 0 else 1)
    ball = frames.SphericalCurve.from_points(-b * g, abs(b))
    margin = int(np.ceil(2 * max(base.fd_step(), ball.fd_step()) / min(np.diff(base.s).min(), np.diff(ball.s).min()))) + 2
    worst = 0.0
    for k in range(margin, len(tr.t) - margin, stride):
        i1 = frames.frame_invariants(base, base.s[k])
        i2 = frames.frame_invariants(ball, ball.s[k])
        worst = max(worst, frames.rolling_invariant_relations(i1, i2)["kappa_g"])
    return worst


def _sphere_invariants(seed: int) -> float:
    theta = 0.8
    s = np.linspace(0, 4.0, 2001)
    a = 1.5
    rho = a * math.sin(theta)
    pts = np.column_stack([rho * np.cos(s / rho), rho * np.sin(s / rho), np.full_like(s, a * math.cos(theta))])
    c = frames.SphericalCurve(s, pts, a)
    inv = frames.frame_invariants(c, 2.0)
    return max(abs(inv.kappa_n + 1 / a), abs(inv.tau_g), abs(inv.kappa_g - 1 / (a * math.tan(theta))))


# --- dynamics ---------------------------------------------------------------


def rubber_run(a: float = 1.0, b: float = 0.5, t_end: float = 100.0, dt: float = 1e-3):
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, b)
    scene = SceneParams(a, b)
    tr = integrate(rubber_field(body, scene), default_initial_state(body), (0.0, t_end), StepperSpec(dt=dt),
                   full_state_projector, sample_every=10)
    return body, tr


def rubber_drifts(body, tr) -> tuple[float, float]:
    H = np.array([rubber_energy(x[12:15], body) for x in tr.x])
    c = max(abs(rubber_constraint(x[9:12], x[12:15], body)) for x in tr.x)
    return float(np.abs(H / H[0] - 1).max()), float(c)


@lru_cache(maxsize=None)
def marble_run(kappa_value: float, t_end: float = 50.0, radius: float = 0.5) -> np.ndarray:
    """Max drift of ``(f1, f2, f3, f4)`` along a marble run from the default data."""
    scene = SceneParams.from_kappa(kappa_value, radius)
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, scene.b)
    x0 = default_initial_state(body)
    tr = integrate(marble_field(body, scene, radius), x0, (0.0, t_end), StepperSpec(), full_state_projector,
                   sample_every=10)
    f = np.array([marble_integrals(x[9:12], x[12:15], body, radius) for x in tr.x])
    return np.abs(f - f[0]).max(axis=0)


@lru_cache(maxsize=None)
def _rubber_default_drifts() -> tuple[float, float]:
    return rubber_drifts(*rubber_run())


def marble_divergence(kappa_value: float, count: int, seed: int, radius: float = 0.5) -> float:
    scene = SceneParams.from_kappa(kappa_value, radius)
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, scene.b)
    field = marble_gamma_L_field(body, scene, radius)
    rng = np.random.default_rng(seed)

    def density(y):
        return marble_measure_density(y[:3], body, radius)

    worst = 0.0
    for _ in range(count):
        g = rng.normal(size=3)
        y = np.concatenate([g / np.linalg.norm(g), rng.uniform(-1, 1, 3)])
        worst = max(worst, abs(weighted_divergence(field, density, y)))
    return worst


def duistermaat_residual(count: int, seed: int, radius: float = 0.5) -> float:
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, radius)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        g = rng.normal(size=3)
        g /= np.linalg.norm(g)
        ids = duistermaat_identities(g, rng.uniform(-1, 1, 3), body, radius)
        worst = max(worst, *(abs(l - r) for l, r in ids.values()))
    return worst


# --- reduction --------------------------------------------------------------


def split_residual(seed: int, ratio: float = 0.5) -> float:
    body, scene = scene_for_ratio(ratio)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        g = rng.normal(size=3)
        g /= np.linalg.norm(g)
        gd = np.cross(g, rng.normal(size=3))
        rho = rng.normal(size=3)
        hv = -scene.ratio * gd
        hs = (1 + scene.ratio) * np.cross(gd, g)
        worst = max(worst, np.abs(reduction.connection_form(g, hv, hs, scene)).max())
        vv, vs = reduction.vertical_generator(g, rho)
        worst = max(worst, np.abs(reduction.connection_form(g, vv, vs, scene) - rho).max())
    return worst


def equivariance_check(seed: int, ratio: float = 0.5) -> float:
    _, scene = scene_for_ratio(ratio)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        q = rng.normal(size=3)
        q = scene.a * q / np.linalg.norm(q)
        S = rotation_exp(rng.normal(size=3))
        # tangent basis at q
        e1 = np.cross(q, rng.normal(size=3))
        e2 = np.cross(q, e1) / scene.a
        for qd in (e1, e2):
            worst = max(worst, reduction.equivariance_residual(q, qd, S, scene))
    return worst


def holonomy_loop_residual(theta: float, a: float = 1.0, b: float = 0.5) -> float:
    loop = reduction.holonomy_loop(theta, a, b)
    closed = reduction.holonomy_circle(theta, a, b)
    return max(
        abs(loop.holonomy - closed.holonomy),
        abs(reduction.loop_rotation_angle(loop) - reduction.folded_angle(closed.frame_rotation)),
    )


def small_loop_relative(a: float = 1.0, b: float = 0.5, theta: float = 1e-2) -> float:
    loop = reduction.holonomy_loop(theta, a, b)
    density = (2 * math.pi - 2 * math.pi * abs(loop.holonomy)) / (2 * math.pi * a * a * (1 - math.cos(theta)))
    expected = reduction.base_curvature_density(SceneParams(a, b))
    return abs(density / expected - 1)


def zero_curvature(a: float = 1.3) -> float:
    coef, _ = reduction.curvature_2form(np.array([0.0, 0.0, 1.0]), SceneParams(a, a))
    worst = abs(coef)
    for theta in HOLONOMY_THETAS:
        worst = max(worst, abs(reduction.holonomy_loop(theta, a, a).frame_rotation))
    return worst


def reduced_energy_drift(a: float = 1.0, b: float = 0.5, t_end: float = 20.0) -> float:
    body = BodyParams(DEFAULT_MU, DEFAULT_INERTIA, b)
    scene = SceneParams(a, b)
    tr = integrate(rubber_field(body, scene), default_initial_state(body), (0.0, t_end), StepperSpec(),
                   full_state_projector, sample_every=20)
    H = []
    for x in tr.x:
        y = reduction.reduced_state_from_full(x, body, scene)
        H.append(reduction.reduced_hamiltonian(y[:3], y[3:], scene, body))
    H = np.array(H)
    return float(np.abs(H / H[0] - 1).max())


def compressed_hamilton_residual(seed: int, ratio: float = 0.37) -> float:
    body, scene = scene_for_ratio(ratio)
    return max(reduction.hamilton_residual(z, scene, body) for z in reduction.sample_chart_points(50, seed))


# --- spheroconical ------------------------------------------------------------


def sc_roundtrip(count: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        g = rng.normal(size=3)
        g /= np.linalg.norm(g)
        if np.abs(g).min() < 1e-3:
            continue
        pt = sc.lambda_from_gamma(g, DEFAULT_INERTIA)
        worst = max(worst, np.abs(sc.gamma_from_lambda(pt, DEFAULT_INERTIA) - g).max())
    return worst


def sc_metric_identities(count: int, seed: int) -> float:
    A = np.diag(DEFAULT_INERTIA)
    worst = 0.0
    for pt, _ in sc.sample_interior(count, DEFAULT_INERTIA, seed):
        g = sc.gamma_from_lambda(pt, DEFAULT_INERTIA)
        J = sc.lambda_partials(pt, DEFAULT_INERTIA)
        coef = sc.metric_coefficients(pt, DEFAULT_INERTIA)
        forms = {
            "inertia": lambda u, v: u @ A @ v,
            "standard": lambda u, v: u @ v,
            "twisted": lambda u, v: np.cross(g, u) @ A @ np.cross(g, v),
        }
        for name, form in forms.items():
            k1, k2 = coef[name]
            scale = max(abs(k1), abs(k2))
            worst = max(
                worst,
                abs(form(J[0], J[0]) - k1) / scale,
                abs(form(J[1], J[1]) - k2) / scale,
                abs(form(J[0], J[1])) / scale,
            )
    return worst


def sc_coordinate_identities(count: int, seed: int, ratio: float = 0.37) -> float:
    body, scene = scene_for_ratio(ratio)
    I = DEFAULT_INERTIA
    worst = 0.0
    for pt, ld in sc.sample_interior(count, I, seed):
        g = sc.gamma_from_lambda(pt, I)
        J = sc.lambda_partials(pt, I)
        gd = ld @ J
        tri = g @ np.cross(J[0], J[1])
        res = [
            abs(tri - sc.area_form_signed(pt, I)) / abs(tri),
            abs(g @ (body.A @ np.cross(gd, g)) - sc.gyroscopic_lambda(pt, ld, I)),
            abs(np.subtract(*sc.inverse_inertia_identity(pt, I))),
            abs(np.subtract(*sc.pair_sum_identity(pt, I))),
            abs(reduction.jk_term(g, gd, scene, body) * tri - sc.jk_lambda(pt, ld, scene, body)),
        ]
        T = reduction.reduced_lagrangian(g, gd, scene, body)
        res.append(abs(T - sc.reduced_energy_lambda(pt, ld, scene, body)) / max(T, 1e-300))
        s = sc.darboux_momenta(pt, ld, scene, body)
        res.append(abs(2 * sc.hamiltonian_lambda(s, scene, body) - 2 * T) / max(T, 1e-300))
        worst = max(worst, *res)
    return worst


def sc_F_identity(count: int, seed: int, ratio: float = 0.37) -> float:
    body, scene = scene_for_ratio(ratio)
    worst = 0.0
    for pt, _ in sc.sample_interior(count, DEFAULT_INERTIA, seed):
        g = sc.gamma_from_lambda(pt, DEFAULT_INERTIA)
        F = reduction.legendre_determinant(g, scene, body)
        worst = max(worst, abs(F - sc.legendre_determinant_lambda(pt, scene, body)) / F)
    return worst


def legendre_det_residual(count: int, seed: int, ratio: float = 0.37) -> float:
    body, scene = scene_for_ratio(ratio)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        g = rng.normal(size=3)
        g /= np.linalg.norm(g)
        e1 = np.cross(g, rng.normal(size=3))
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(g, e1)
        G = reduction.legendre_matrix(g, scene, body)
        B = np.array([e1, e2])
        det = np.linalg.det(B @ G @ B.T)
        F = reduction.legendre_determinant(g, scene, body)
        worst = max(worst, abs(det - (1 + scene.ratio) ** 2 * F) / det)
    return worst


def time_change_residual(ratio: float = 0.4, t_end: float = 10.0) -> float:
    """Darboux flow mapped back to real time against the full rubber flow."""
    body, scene = scene_for_ratio(ratio)
    I = DEFAULT_INERTIA
    pt = sc.SpheroConicalPoint(1.5, 2.5, (1, 1, 1))
    ld = np.array([0.02, -0.015])
    g = sc.gamma_from_lambda(pt, I)
    gd = sc.gamma_dot_from_lambda(pt, ld, I)
    s0 = sc.darboux_momenta(pt, ld, scene, body)
    tau_end = 10 * t_end * sc.darboux_factor(I[1], I[2], scene, body) + 10 * t_end * sc.darboux_factor(I[0], I[1], scene, body)
    tr = sc.integrate_darboux(s0, scene, body, tau_end, 1e-3, t_end=t_end)
    inside = np.flatnonzero(tr.x[:, 4] <= t_end)
    keep = np.unique(np.r_[inside[::50], inside[-1]])
    ts = tr.x[keep, 4]
    w = (1 + scene.ratio) * np.cross(gd, g)
    x0 = np.concatenate([np.eye(3).ravel(), g, body.a_tilde_diag() * w])
    full = integrate(rubber_field(body, scene), x0, (0.0, ts[-1]), StepperSpec(), full_state_projector, t_eval=ts)
    worst = 0.0
    for k, i in enumerate(keep):
        gl = sc.gamma_from_lambda(sc.SpheroConicalPoint(tr.x[i, 0], tr.x[i, 1], pt.octant), I)
        worst = max(worst, np.abs(gl - full.x[k, 9:12]).max())
    if ts[-1] < t_end - 0.01:
        return math.inf
    return worst


def darboux_energy_drift(ratio: float = 0.4, tau_end: float = 50.0) -> float:
    body, scene = scene_for_ratio(ratio)
    # slow enough to stay inside one octant for the whole run
    s0 = sc.darboux_momenta(sc.SpheroConicalPoint(1.5, 2.5, (1, 1, 1)), np.array([0.005, -0.004]), scene, body)
    tr = sc.integrate_darboux(s0, scene, body, tau_end, 1e-3)
    if tr.status != "completed":
        return math.inf
    H = np.array([sc.hamiltonian_lambda(sc.DarbouxState.from_array(y), scene, body) for y in tr.x[::10]])
    return float(np.abs(H / H[0] - 1).max())


# --- registry ---------------------------------------------------------------


def _ratio_label(r: float) -> str:
    return "plane" if r == 0 else f"{r:g}"


def registered_checks() -> list[Check]:
    checks = [
        Check("so3.hat_vee", "so3", _hat_vee, 1e-14),
        Check("so3.polar_projection", "so3", _polar, 1e-13),
        Check("so3.rk4_order", "so3", _rk4_order, 0.1),
        Check("so3.rk45_accuracy", "so3", _rk45_accuracy, 1e-8),
        Check("frames.reconstruct_roundtrip", "frames", _reconstruct_roundtrip, 1e-6),
        Check("frames.circle_invariants", "frames", _sphere_invariants, 1e-6),
        Check("frames.rolling_kappa_g", "frames", lambda s: rolling_kappa_g_residual(1.0, 0.5), 1e-5),
        Check("frames.rolling_kappa_g_internal", "frames", lambda s: rolling_kappa_g_residual(2.0, -0.7), 1e-5),
    ]
    def rubber(i):
        return lambda seed: _rubber_default_drifts()[i]

    checks += [
        Check("dynamics.rubber_energy_drift", "dynamics", rubber(0), 1e-8),
        Check("dynamics.rubber_constraint", "dynamics", rubber(1), 1e-8),
    ]
    for k in MARBLE_KAPPAS:
        checks.append(Check(f"dynamics.marble_f123_kappa_{k:g}", "dynamics", lambda s, k=k: float(marble_run(k)[:3].max()), 1e-9))
    checks += [
        Check("dynamics.marble_f4_kappa_1", "dynamics", lambda s: float(marble_run(1.0)[3]), 1e-9),
        Check("dynamics.marble_f4_kappa_0.5", "dynamics", lambda s: float(marble_run(0.5)[3]), 1e-4, above=True),
    ]
    for k in MARBLE_KAPPAS:
        checks.append(Check(f"dynamics.marble_divergence_kappa_{k:g}", "dynamics", lambda s, k=k: marble_divergence(k, 1000, s), 1e-6))
    checks.append(Check("dynamics.duistermaat_identities", "dynamics", lambda s: duistermaat_residual(200, s), 1e-6))

    for r in CLOSEDNESS_RATIOS:
        def fn(seed, r=r):
            body, scene = scene_for_ratio(r)
            return reduction.omega_nh_closedness_check(scene, body, 200, seed)

        checks.append(Check(f"reduction.closedness_{_ratio_label(r)}", "reduction", fn, 1e-6))

    def negative(seed):
        body, scene = scene_for_ratio(0.5)
        return reduction.omega_nh_closedness_check(scene, body, 200, seed, exponent=-0.5)

    checks += [
        Check("reduction.closedness_wrong_exponent", "reduction", negative, 1e-2, above=True),
        Check("reduction.compressed_hamilton", "reduction", compressed_hamilton_residual, 1e-6),
        Check("reduction.connection_split", "reduction", split_residual, 1e-12),
        Check("reduction.equivariance", "reduction", equivariance_check, 1e-12),
        Check("reduction.reduced_energy_drift", "reduction", lambda s: reduced_energy_drift(), 1e-8),
    ]
    for th in HOLONOMY_THETAS:
        checks.append(Check(f"reduction.holonomy_loop_{th:g}", "reduction", lambda s, th=th: holonomy_loop_residual(th), 1e-6))
    checks += [
        Check("reduction.holonomy_small_loop", "reduction", lambda s: small_loop_relative(), 1e-3),
        Check("reduction.zero_curvature_equal_radii", "reduction", lambda s: zero_curvature(), 1e-9),
        Check("spheroconical.roundtrip", "spheroconical", lambda s: sc_roundtrip(1000, s), 1e-12),
        Check("spheroconical.metric_identities", "spheroconical", lambda s: sc_metric_identities(1000, s), 1e-10),
        Check("spheroconical.coordinate_identities", "spheroconical", lambda s: sc_coordinate_identities(1000, s), 1e-10),
        Check("spheroconical.F_identity", "spheroconical", lambda s: sc_F_identity(1000, s), 1e-10),
        Check("spheroconical.legendre_determinant", "spheroconical", lambda s: legendre_det_residual(100, s), 1e-10),
    ]

    def xnh(ratio, exponent=None):
        def fn(seed):
            body, scene = scene_for_ratio(ratio)
            return sc.xnh_equals_f_xh_check(scene, body, 200, seed, exponent=exponent)

        return fn

    checks += [
        Check("spheroconical.xnh_conformal_0.4", "spheroconical", xnh(0.4), 1e-6),
        Check("spheroconical.xnh_conformal_equal_radii", "spheroconical", xnh(1.0), 1e-8),
        Check("spheroconical.xnh_wrong_exponent", "spheroconical", xnh(0.4, -0.5), 1e-2, above=True),
        Check("spheroconical.time_change_trajectory", "spheroconical", lambda s: time_change_residual(), 1e-5),
        Check("spheroconical.hamiltonian_conservation", "spheroconical", lambda s: darboux_energy_drift(), 1e-9),
    ]
    for r in SEPARABILITY_RATIOS:
        separable = r in (0.0, -2.0)

        def fn(seed, r=r):
            body, scene = scene_for_ratio(r)
            return sc.separability_check(scene, body, 100, seed).residual

        checks.append(
            Check(
                f"spheroconical.separability_{_ratio_label(r)}",
                "spheroconical",
                fn,
                sc.SEPARABILITY_TOLERANCE if separable else 1e-3,
                above=not separable,
            )
        )
    return checks


def _run_check(args) -> CheckResult:
    check, seed = args
    t0 = time.perf_counter()
    try:
        res = float(check.fn(seed))
    except Exception:  # a crashing check is a failed check
        res = math.nan
    wall = time.perf_counter() - t0
    ok = (res > check.tolerance) if check.above else (res < check.tolerance)
    return CheckResult(check.name, res, check.tolerance, bool(ok), wall, check.above)


def _run_named(args) -> CheckResult:
    name, seed = args
    check = next(c for c in registered_checks() if c.name == name)
    return _run_check((check, seed))


def verify(scope: str = "all", seed: int = 42, jobs: int = 1) -> VerificationReport:
    """Run every registered check in ``scope`` (a module name or ``"all"``)."""
    if scope != "all" and scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}; expected 'all' or one of {SCOPES}")
    checks = [c for c in registered_checks() if scope == "all" or c.scope == scope]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_named, [(c.name, seed) for c in checks]))
    else:
        results = [_run_check((c, seed)) for c in checks]
    return VerificationReport(results)
