"""Sphero-conical coordinates on the Poisson sphere and the Darboux form of the
reduced rubber flow.

``(lambda1, lambda2)`` are the roots of ``sum_j g_j^2/(I_j - lambda) = 0`` with
``I1 < lambda1 < I2 < lambda2 < I3``. They fix ``g_j^2`` only, so each point
also carries the octant signs of ``g``.

Shorthand used throughout (all positive on the open domain):

    D1 = (l1 - I1)(I2 - l1)(I3 - l1),   D2 = (l2 - I1)(l2 - I2)(I3 - l2),
    m  = mu b^2,   Pi = (l1 + m)(l2 + m),   F = (1 + b/a)^2 Pi,
    c1 = (1/4)(1+b/a)^2 (l2 - l1)(l2 + m)/D1,   c2 = (1/4)(1+b/a)^2 (l2 - l1)(l1 + m)/D2.

The kinetic energy is ``(c1 l1'^2 + c2 l2'^2)/2`` and ``p_i = c_i l_i'``.

Darboux momenta are ``P = f p``. With ``normalization="product"`` (the default)
``f = Pi^e``; with ``"full"`` it is ``F^e`` (``e = (b-a)/(2a)``). The two differ
by the constant :func:`conformal_prefactor`. In either case ``H(l, P)`` is the
energy, ``f (omega_can + (J,K)) = d(P dl)`` and the reduced vector field is
``f X_H``, i.e. the Hamiltonian flow runs in the time ``dtau/dt = f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import BodyParams, SceneParams, _check_pair, read_table, write_table
from .reduction import reduced_acceleration
from .so3 import IntegrationError, StepperSpec, Trajectory, integrate

MIN_INERTIA_GAP = 1e-9
BOUNDARY_DISTANCE = 1e-8
NORMALIZATIONS = ("product", "full")
DARBOUX_COLUMNS = ["tau", "lambda1", "lambda2", "P1", "P2", "H", "t"]


class BoundaryError(ValueError):
    """The point lies on a coordinate plane, where the coordinates degenerate."""


def _inertias(inertia) -> tuple[float, float, float]:
    i1, i2, i3 = (float(v) for v in inertia)
    if not (i2 - i1 > MIN_INERTIA_GAP and i3 - i2 > MIN_INERTIA_GAP):
        raise ValueError("inertias must be strictly increasing (gap > 1e-9)")
    return i1, i2, i3


@dataclass(frozen=True)
class SpheroConicalPoint:
    lambda1: float
    lambda2: float
    octant: tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.octant) or len(self.octant) != 3:
            raise ValueError("octant signs must be +1 or -1")
        object.__setattr__(self, "octant", tuple(int(s) for s in self.octant))

    def check(self, inertia) -> None:
        i1, i2, i3 = _inertias(inertia)
        if not (i1 < self.lambda1 < i2 < self.lambda2 < i3):
            raise ValueError(f"interlacing violated: {i1} < {self.lambda1} < {i2} < {self.lambda2} < {i3}")


@dataclass(frozen=True)
class DarbouxState:
    lambda1: float
    lambda2: float
    P1: float
    P2: float

    def to_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.P1, self.P2])

    @classmethod
    def from_array(cls, y) -> "DarbouxState":
        return cls(*(float(v) for v in y[:4]))


def _D(l1: float, l2: float, inertia) -> tuple[float, float]:
    i1, i2, i3 = inertia
    return (l1 - i1) * (i2 - l1) * (i3 - l1), (l2 - i1) * (l2 - i2) * (i3 - l2)


# --- coordinate change ------------------------------------------------------


def gamma_from_lambda(pt: SpheroConicalPoint, inertia) -> np.ndarray:
    """Unit vector ``g`` with ``g_j^2 = prod_i (I_j - l_i) / prod_{k != j} (I_j - I_k)``."""
    pt.check(inertia)
    I = _inertias(inertia)
    sq = []
    for j in range(3):
        num = (I[j] - pt.lambda1) * (I[j] - pt.lambda2)
        den = 1.0
        for k in range(3):
            if k != j:
                den *= I[j] - I[k]
        sq.append(max(num / den, 0.0))
    return np.array(pt.octant, dtype=float) * np.sqrt(sq)


def lambda_roots(gamma, inertia) -> tuple[float, float]:
    """Roots of ``sum_j g_j^2 prod_{k != j}(I_k - l) = 0``, smaller first.

    Homogeneous of degree zero in ``g``. The smaller root comes from the
    product of roots to avoid cancellation.
    """
    g2 = np.asarray(gamma, float) ** 2
    i1, i2, i3 = inertia
    c2 = g2.sum()
    c1 = -(g2[0] * (i2 + i3) + g2[1] * (i1 + i3) + g2[2] * (i1 + i2))
    c0 = g2[0] * i2 * i3 + g2[1] * i1 * i3 + g2[2] * i1 * i2
    disc = max(c1 * c1 - 4.0 * c2 * c0, 0.0)
    q = 0.5 * (-c1 + math.sqrt(disc))
    return c0 / q, q / c2


def lambda_from_gamma(gamma, inertia) -> SpheroConicalPoint:
    """Sphero-conical point of an interior ``g`` (no zero component)."""
    g = np.asarray(gamma, float)
    I = _inertias(inertia)
    if np.any(np.abs(g) <= 1e-300) or np.any(np.abs(g) < 1e-14 * np.linalg.norm(g)):
        raise BoundaryError("gamma lies on a coordinate plane")
    l1, l2 = lambda_roots(g, I)
    return SpheroConicalPoint(l1, l2, tuple(int(s) for s in np.sign(g)))


def lambda_partials(pt: SpheroConicalPoint, inertia) -> np.ndarray:
    """Rows ``dg/dl_i = (1/2) g_j/(l_i - I_j)``."""
    g = gamma_from_lambda(pt, inertia)
    I = np.array(_inertias(inertia))
    return np.array([0.5 * g / (pt.lambda1 - I), 0.5 * g / (pt.lambda2 - I)])


def gamma_dot_from_lambda(pt: SpheroConicalPoint, lambda_dot, inertia) -> np.ndarray:
    return np.asarray(lambda_dot, float) @ lambda_partials(pt, inertia)


def lambda_dot_from_gamma(gamma, gamma_dot, inertia) -> np.ndarray:
    """Coordinate velocities of a tangent vector, using orthogonality of the partials."""
    pt = lambda_from_gamma(gamma, inertia)
    Jl = lambda_partials(pt, inertia)
    gd = np.asarray(gamma_dot, float)
    return np.array([gd @ Jl[0] / (Jl[0] @ Jl[0]), gd @ Jl[1] / (Jl[1] @ Jl[1])])


# --- metric and form coefficients -------------------------------------------


def metric_coefficients(pt: SpheroConicalPoint, inertia) -> dict:
    """Diagonal coefficients ``(k1, k2)`` of three quadratic forms in ``l'``.

    ``"inertia"``: ``(A gdot, gdot)``; ``"standard"``: ``|gdot|^2``;
    ``"twisted"``: ``(A(g x gdot), g x gdot)``. Cross terms vanish.
    """
    pt.check(inertia)
    i1, i2, i3 = _inertias(inertia)
    l1, l2 = pt.lambda1, pt.lambda2
    e1 = (l1 - i1) * (l1 - i2) * (l1 - i3)
    e2 = (l2 - i1) * (l2 - i2) * (l2 - i3)
    s1 = 0.25 * (l2 - l1) / e1
    s2 = 0.25 * (l1 - l2) / e2
    return {
        "inertia": (s1 * l1, s2 * l2),
        "standard": (s1, s2),
        "twisted": (s1 * l2, s2 * l1),
    }


def area_form_density(pt: SpheroConicalPoint, inertia) -> float:
    """Magnitude of ``(g, dg/dl1 x dg/dl2)``: ``(l2 - l1)/(4 sqrt(D1 D2))``.

    The signed triple product carries the factor ``sign(g1 g2 g3)``; see
    :func:`area_form_signed`.
    """
    pt.check(inertia)
    D1, D2 = _D(pt.lambda1, pt.lambda2, _inertias(inertia))
    return (pt.lambda2 - pt.lambda1) / (4.0 * math.sqrt(D1 * D2))


def area_form_signed(pt: SpheroConicalPoint, inertia) -> float:
    """Signed coefficient of ``dl1 ^ dl2`` in the outward area form."""
    o = pt.octant
    return o[0] * o[1] * o[2] * area_form_density(pt, inertia)


def gyroscopic_lambda(pt: SpheroConicalPoint, lambda_dot, inertia) -> float:
    """``(g, A(gdot x g)) = (s/2)(sqrt(D2/D1) l1' - sqrt(D1/D2) l2')``, ``s = sign(g1 g2 g3)``."""
    pt.check(inertia)
    D1, D2 = _D(pt.lambda1, pt.lambda2, _inertias(inertia))
    o = pt.octant
    ld = np.asarray(lambda_dot, float)
    return 0.5 * o[0] * o[1] * o[2] * (math.sqrt(D2 / D1) * ld[0] - math.sqrt(D1 / D2) * ld[1])


def inverse_inertia_identity(pt: SpheroConicalPoint, inertia) -> tuple[float, float]:
    """``((A^-1 g, g), l1 l2/(I1 I2 I3))``: the two sides of an exact identity."""
    g = gamma_from_lambda(pt, inertia)
    I = np.array(_inertias(inertia))
    return float(np.sum(g * g / I)), pt.lambda1 * pt.lambda2 / float(np.prod(I))


def pair_sum_identity(pt: SpheroConicalPoint, inertia) -> tuple[float, float]:
    """``(sum_cyc (g_j^2 + g_k^2)/(I_j I_k), (l1 + l2)/(I1 I2 I3))``."""
    g2 = gamma_from_lambda(pt, inertia) ** 2
    i1, i2, i3 = _inertias(inertia)
    lhs = (g2[1] + g2[2]) / (i2 * i3) + (g2[0] + g2[2]) / (i1 * i3) + (g2[0] + g2[1]) / (i1 * i2)
    return lhs, (pt.lambda1 + pt.lambda2) / (i1 * i2 * i3)


def jk_lambda(pt: SpheroConicalPoint, lambda_dot, scene: SceneParams, body: BodyParams) -> float:
    """Coefficient of ``dl1 ^ dl2`` in ``(J,K)``.

    ``(1/8)(1 - b/a)(1 + b/a)^2 (l2 - l1)(l1'/D1 - l2'/D2)``, in every octant.
    """
    pt.check(body.inertia)
    D1, D2 = _D(pt.lambda1, pt.lambda2, _inertias(body.inertia))
    r = scene.ratio
    ld = np.asarray(lambda_dot, float)
    return 0.125 * (1 - r) * (1 + r) ** 2 * (pt.lambda2 - pt.lambda1) * (ld[0] / D1 - ld[1] / D2)


def legendre_determinant_lambda(pt: SpheroConicalPoint, scene: SceneParams, body: BodyParams) -> float:
    """``F = (1 + b/a)^2 (l1 + mu b^2)(l2 + mu b^2)``."""
    m = body.mu * body.b**2
    return (1 + scene.ratio) ** 2 * (pt.lambda1 + m) * (pt.lambda2 + m)


def kinetic_coefficients(l1: float, l2: float, scene: SceneParams, body: BodyParams) -> tuple[float, float]:
    """``(c1, c2)`` with ``T = (c1 l1'^2 + c2 l2'^2)/2``."""
    D1, D2 = _D(l1, l2, _inertias(body.inertia))
    m = body.mu * body.b**2
    k = 0.25 * (1 + scene.ratio) ** 2 * (l2 - l1)
    return k * (l2 + m) / D1, k * (l1 + m) / D2


def reduced_energy_lambda(pt: SpheroConicalPoint, lambda_dot, scene: SceneParams, body: BodyParams) -> float:
    pt.check(body.inertia)
    c1, c2 = kinetic_coefficients(pt.lambda1, pt.lambda2, scene, body)
    ld = np.asarray(lambda_dot, float)
    return 0.5 * (c1 * ld[0] ** 2 + c2 * ld[1] ** 2)


# --- Darboux coordinates ----------------------------------------------------


def conformal_prefactor(scene: SceneParams) -> float:
    """Constant ``(1 + b/a)^(2e)`` bridging the two normalizations: ``F^e = prefactor * Pi^e``."""
    return (1 + scene.ratio) ** (2 * scene.exponent)


def darboux_factor(l1: float, l2: float, scene: SceneParams, body: BodyParams,
                   normalization: str = "product", exponent: Optional[float] = None) -> float:
    """``f`` with ``P = f p`` and ``dtau/dt = f``."""
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    m = body.mu * body.b**2
    if l1 + m <= 0 or l2 + m <= 0:
        raise ValueError("lambda + mu b^2 must be positive")
    e = scene.exponent if exponent is None else exponent
    f = ((l1 + m) * (l2 + m)) ** e
    if normalization == "full":
        f *= (1 + scene.ratio) ** (2 * e)
    return f


def darboux_momenta(pt: SpheroConicalPoint, lambda_dot, scene: SceneParams, body: BodyParams,
                    normalization: str = "product") -> DarbouxState:
    pt.check(body.inertia)
    c1, c2 = kinetic_coefficients(pt.lambda1, pt.lambda2, scene, body)
    f = darboux_factor(pt.lambda1, pt.lambda2, scene, body, normalization)
    ld = np.asarray(lambda_dot, float)
    return DarbouxState(pt.lambda1, pt.lambda2, f * c1 * ld[0], f * c2 * ld[1])


def hamiltonian_lambda(state: DarbouxState, scene: SceneParams, body: BodyParams,
                       normalization: str = "product") -> float:
    """``H = (1/2) sum P_i^2/(f^2 c_i)``."""
    l1, l2 = state.lambda1, state.lambda2
    c1, c2 = kinetic_coefficients(l1, l2, scene, body)
    f = darboux_factor(l1, l2, scene, body, normalization)
    return 0.5 * (state.P1**2 / c1 + state.P2**2 / c2) / (f * f)


def _hamiltonian_array(y, scene, body, normalization, exponent=None):
    l1, l2, P1, P2 = y
    c1, c2 = kinetic_coefficients(l1, l2, scene, body)
    f = darboux_factor(l1, l2, scene, body, normalization, exponent)
    return 0.5 * (P1**2 / c1 + P2**2 / c2) / (f * f)


def hamiltonian_partials(state: DarbouxState, scene: SceneParams, body: BodyParams,
                         normalization: str = "product", exponent: Optional[float] = None) -> np.ndarray:
    """Closed-form ``(H_l1, H_l2, H_P1, H_P2)``."""
    l1, l2, P1, P2 = state.to_array()
    i1, i2, i3 = _inertias(body.inertia)
    m = body.mu * body.b**2
    e = scene.exponent if exponent is None else exponent
    c1, c2 = kinetic_coefficients(l1, l2, scene, body)
    f = darboux_factor(l1, l2, scene, body, normalization, exponent)
    w1 = 1.0 / (f * f * c1)
    w2 = 1.0 / (f * f * c2)
    dlogD1 = 1 / (l1 - i1) - 1 / (i2 - l1) - 1 / (i3 - l1)
    dlogD2 = 1 / (l2 - i1) + 1 / (l2 - i2) - 1 / (i3 - l2)
    d = l2 - l1
    # d log w_i / d l_j
    g11 = -2 * e / (l1 + m) + 1 / d + dlogD1
    g12 = -2 * e / (l2 + m) - 1 / d - 1 / (l2 + m)
    g21 = -2 * e / (l1 + m) + 1 / d - 1 / (l1 + m)
    g22 = -2 * e / (l2 + m) - 1 / d + dlogD2
    a1 = 0.5 * P1 * P1 * w1
    a2 = 0.5 * P2 * P2 * w2
    return np.array([a1 * g11 + a2 * g21, a1 * g12 + a2 * g22, P1 * w1, P2 * w2])


def hamiltonian_partials_fd(state: DarbouxState, scene: SceneParams, body: BodyParams,
                            normalization: str = "product", exponent: Optional[float] = None) -> np.ndarray:
    """Central-difference ``(H_l1, H_l2, H_P1, H_P2)`` with step ``1e-6 max(1, |y_i|)``."""
    y = state.to_array()
    out = np.zeros(4)
    for i in range(4):
        h = 1e-6 * max(1.0, abs(y[i]))
        yp, ym = y.copy(), y.copy()
        yp[i] += h
        ym[i] -= h
        out[i] = (
            _hamiltonian_array(yp, scene, body, normalization, exponent)
            - _hamiltonian_array(ym, scene, body, normalization, exponent)
        ) / (2 * h)
    return out


def hamiltonian_flow(state: DarbouxState, scene: SceneParams, body: BodyParams,
                     normalization: str = "product", method: str = "closed") -> np.ndarray:
    """``(dl/dtau, dP/dtau) = (H_P, -H_l)``; ``method`` is ``"closed"`` or ``"fd"``."""
    if method == "closed":
        d = hamiltonian_partials(state, scene, body, normalization)
    elif method == "fd":
        d = hamiltonian_partials_fd(state, scene, body, normalization)
    else:
        raise ValueError("method must be 'closed' or 'fd'")
    return np.array([d[2], d[3], -d[0], -d[1]])


def boundary_distance(l1: float, l2: float, inertia) -> float:
    i1, i2, i3 = inertia
    return min(l1 - i1, i2 - l1, l2 - i2, i3 - l2)


def darboux_field(scene: SceneParams, body: BodyParams, normalization: str = "product"):
    """Field on ``(l1, l2, P1, P2, t)`` in the time ``tau``; the last entry is ``dt/dtau = 1/f``."""
    _check_pair(body, scene)

    def f(tau: float, y: np.ndarray) -> np.ndarray:
        s = DarbouxState.from_array(y)
        try:
            d = hamiltonian_partials(s, scene, body, normalization)
            fac = darboux_factor(s.lambda1, s.lambda2, scene, body, normalization)
        except (ValueError, ZeroDivisionError) as exc:
            # A stage left the chart; the step is too large for the boundary event.
            raise IntegrationError(f"left the sphero-conical chart: {exc}", tau) from None
        return np.array([d[2], d[3], -d[0], -d[1], 1.0 / fac])

    return f


def integrate_darboux(state: DarbouxState, scene: SceneParams, body: BodyParams, tau_end: float,
                      dtau: float = 1e-3, normalization: str = "product",
                      t_end: Optional[float] = None) -> Trajectory:
    """RK4 in ``tau`` on ``(l1, l2, P1, P2, t)``.

    Stops with status ``"event"`` when ``l`` comes within 1e-8 of an inertia
    value, or once ``t`` exceeds ``t_end``.
    """
    I = _inertias(body.inertia)

    def stop(tau, y):
        if boundary_distance(y[0], y[1], I) < BOUNDARY_DISTANCE:
            return True
        return t_end is not None and y[4] >= t_end

    y0 = np.concatenate([state.to_array(), [0.0]])
    return integrate(darboux_field(scene, body, normalization), y0, (0.0, tau_end), StepperSpec(dt=dtau), stop=stop)


def write_darboux_csv(path, traj: Trajectory, scene: SceneParams, body: BodyParams,
                      normalization: str = "product") -> None:
    H = [hamiltonian_lambda(DarbouxState.from_array(y), scene, body, normalization) for y in traj.x]
    rows = np.column_stack([traj.t, traj.x[:, :4], H, traj.x[:, 4]])
    write_table(path, DARBOUX_COLUMNS, rows)


def read_darboux_csv(path) -> np.ndarray:
    header, rows = read_table(path)
    if header != DARBOUX_COLUMNS:
        raise ValueError("not a Darboux trajectory table")
    return rows


# --- checks -----------------------------------------------------------------


def sample_interior(count: int, inertia, seed: int, margin: float = 0.1, speed: float = 1.0):
    """Random ``(point, lambda_dot)`` pairs with ``l`` kept a fraction ``margin`` of each
    interval away from its ends, random octants and ``l'`` uniform in ``[-speed, speed]``."""
    i1, i2, i3 = _inertias(inertia)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        u = rng.uniform(margin, 1 - margin, 2)
        oct_ = tuple(int(s) for s in rng.choice([-1, 1], 3))
        pt = SpheroConicalPoint(i1 + u[0] * (i2 - i1), i2 + u[1] * (i3 - i2), oct_)
        out.append((pt, rng.uniform(-speed, speed, 2)))
    return out


def darboux_of_tangent(gamma, gamma_dot, scene: SceneParams, body: BodyParams,
                       normalization: str = "product") -> np.ndarray:
    """``(l1, l2, P1, P2)`` of a point of ``T S^2``; extends 0-homogeneously off the sphere."""
    g = np.asarray(gamma, float)
    n = np.linalg.norm(g)
    pt = lambda_from_gamma(g / n, body.inertia)
    ld = lambda_dot_from_gamma(g / n, np.asarray(gamma_dot, float), body.inertia)
    s = darboux_momenta(pt, ld, scene, body, normalization)
    return s.to_array()


def xnh_residuals(scene: SceneParams, body: BodyParams, samples: int = 200, seed: int = 42,
                  normalization: str = "full", exponent: Optional[float] = None,
                  eps: float = 1e-4) -> np.ndarray:
    """Componentwise ``|X_nh - f X_H|`` in ``(l, P)`` at interior samples, one row per sample.

    ``X_nh`` is the compressed rubber flow pushed through the coordinate change
    by a fourth-order central difference along ``(gdot, gddot)``. ``exponent`` overrides the
    power in both ``P`` and ``f`` (negative control).
    """
    _check_pair(body, scene)
    rows = []
    for pt, ld in sample_interior(samples, body.inertia, seed):
        g = gamma_from_lambda(pt, body.inertia)
        gd = gamma_dot_from_lambda(pt, ld, body.inertia)
        gdd = reduced_acceleration(g, gd, scene, body)

        def phi(y):
            gg, vv = y[:3], y[3:]
            n = np.linalg.norm(gg)
            p0 = lambda_from_gamma(gg / n, body.inertia)
            lv = lambda_dot_from_gamma(gg / n, vv, body.inertia)
            c1, c2 = kinetic_coefficients(p0.lambda1, p0.lambda2, scene, body)
            f = darboux_factor(p0.lambda1, p0.lambda2, scene, body, normalization, exponent)
            return np.array([p0.lambda1, p0.lambda2, f * c1 * lv[0], f * c2 * lv[1]])

        y = np.concatenate([g, gd])
        v = np.concatenate([gd, gdd])
        x_nh = (8 * (phi(y + eps * v) - phi(y - eps * v)) - (phi(y + 2 * eps * v) - phi(y - 2 * eps * v))) / (
            12 * eps
        )
        state = DarbouxState.from_array(phi(y))
        d = hamiltonian_partials(state, scene, body, normalization, exponent)
        f = darboux_factor(state.lambda1, state.lambda2, scene, body, normalization, exponent)
        x_h = np.array([d[2], d[3], -d[0], -d[1]])
        rows.append(np.abs(x_nh - f * x_h))
    return np.array(rows)


def xnh_equals_f_xh_check(scene: SceneParams, body: BodyParams, samples: int = 200, seed: int = 42,
                          normalization: str = "full", exponent: Optional[float] = None) -> float:
    """Max componentwise residual of ``X_nh - f X_H`` (see :func:`xnh_residuals`)."""
    return float(xnh_residuals(scene, body, samples, seed, normalization, exponent).max())


def separability_multipliers(l1: float, l2: float, body: BodyParams) -> dict:
    """Candidate multipliers turning ``2H`` into a sum of one-variable terms."""
    m = body.mu * body.b**2
    return {
        "plane": l2 - l1,
        "product": (l2 - l1) / ((l1 + m) * (l2 + m)),
    }


@dataclass(frozen=True)
class SeparabilityResult:
    residual: float
    separable: bool
    multiplier: str
    residuals: dict


SEPARABILITY_TOLERANCE = 1e-8


def separability_check(scene: SceneParams, body: BodyParams, samples: int = 100, seed: int = 42,
                       tolerance: float = SEPARABILITY_TOLERANCE) -> SeparabilityResult:
    """Mixed-partial test of ``G = m(l) 2H(l, P)`` at fixed ``P``.

    For each multiplier the residual is the largest
    ``|d^2 G/dl1 dl2| w1 w2`` over samples, divided by the largest ``|G|``,
    where ``w1 = I2 - I1`` and ``w2 = I3 - I2``; this makes it invariant under
    rescaling of ``G`` and of the inertias. The verdict uses the best multiplier.
    """
    _check_pair(body, scene)
    I = _inertias(body.inertia)
    w1, w2 = I[1] - I[0], I[2] - I[1]
    h1, h2 = 1e-3 * w1, 1e-3 * w2
    rng = np.random.default_rng(seed + 1)
    pts = sample_interior(samples, I, seed)
    out = {}
    for name in ("plane", "product"):

        def G(l1, l2, P):
            mult = separability_multipliers(l1, l2, body)[name]
            return mult * 2 * _hamiltonian_array((l1, l2, P[0], P[1]), scene, body, "product")

        worst = 0.0
        scale = 0.0
        for pt, _ in pts:
            P = rng.uniform(-1, 1, 2)
            l1, l2 = pt.lambda1, pt.lambda2
            mixed = (
                G(l1 + h1, l2 + h2, P) - G(l1 + h1, l2 - h2, P) - G(l1 - h1, l2 + h2, P) + G(l1 - h1, l2 - h2, P)
            ) / (4 * h1 * h2)
            worst = max(worst, abs(mixed) * w1 * w2)
            scale = max(scale, abs(G(l1, l2, P)))
        out[name] = worst / scale
    best = min(out, key=out.get)
    return SeparabilityResult(float(out[best]), bool(out[best] < tolerance), best, {k: float(v) for k, v in out.items()})
