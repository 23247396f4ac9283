"""Rolling-ball dynamics: rubber (no slip, no twist), marble and sliding models.

A body of mass-scaled inertia ``A = diag(I1, I2, I3)``, mass ``mu`` and signed
radius ``b`` rolls over a fixed sphere of radius ``a`` (``a = inf`` is the
plane). ``b < 0`` means the ball rolls inside the fixed sphere. The body is
dynamically balanced: its centre of mass is its geometric centre.

State vectors are flat arrays so they can be fed straight to
:func:`rubber_rolling.so3.integrate`:

* full state (rubber / marble): ``R`` (9, row-major), ``gamma`` (3), ``L`` (3)
* sliding state: ``q`` (3), ``qdot`` (3), ``R`` (9), ``M`` (3)

``gamma`` is the unit normal at the contact point in body coordinates, and
``L`` is the angular momentum about the contact point in body coordinates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .so3 import cross, hat, project_rotation

CSV_DIGITS = 17


@dataclass(frozen=True)
class BodyParams:
    """Mass ``mu``, principal inertia ``inertia = (I1, I2, I3)`` and signed radius ``b``."""

    mu: float
    inertia: tuple[float, float, float]
    b: float

    def __post_init__(self):
        inertia = tuple(float(v) for v in self.inertia)
        if len(inertia) != 3:
            raise ValueError("inertia needs three principal moments")
        object.__setattr__(self, "inertia", inertia)
        if not self.mu > 0:
            raise ValueError("mass must be positive")
        if min(inertia) <= 0:
            raise ValueError("principal moments must be positive")
        if self.b == 0 or not math.isfinite(self.b):
            raise ValueError("radius b must be finite and non-zero")

    @property
    def A(self) -> np.ndarray:
        return np.diag(self.inertia)

    def a_tilde_diag(self, radius: Optional[float] = None) -> np.ndarray:
        """Diagonal of ``A + mu radius^2 I`` (``radius`` defaults to ``b``)."""
        rad = self.b if radius is None else radius
        return np.array(self.inertia) + self.mu * rad * rad

    def is_distinct(self, gap: float = 1e-9) -> bool:
        """Principal moments pairwise separated by more than ``gap``."""
        i1, i2, i3 = sorted(self.inertia)
        return i2 - i1 > gap and i3 - i2 > gap


@dataclass(frozen=True)
class SceneParams:
    """Fixed sphere radius ``a`` (``math.inf`` for the plane) and body radius ``b``."""

    a: float
    b: float

    def __post_init__(self):
        a = float(self.a)
        object.__setattr__(self, "a", a)
        if not (a > 0):
            raise ValueError("fixed-sphere radius must be positive (or inf for the plane)")
        if self.b == 0 or not math.isfinite(self.b):
            raise ValueError("radius b must be finite and non-zero")

    @classmethod
    def for_body(cls, a: float, body: BodyParams) -> "SceneParams":
        return cls(a, body.b)

    @classmethod
    def plane(cls, b: float) -> "SceneParams":
        return cls(math.inf, b)

    @classmethod
    def from_kappa(cls, kappa_value: float, radius: float) -> "SceneParams":
        """Scene with ``a/(a+b) = kappa_value`` for a ball of physical radius ``radius``.

        The sign of ``b`` is chosen so that ``a > 0``; ``kappa_value = 1`` gives
        the plane.
        """
        if radius <= 0:
            raise ValueError("radius must be positive")
        if kappa_value == 1:
            return cls(math.inf, radius)
        if kappa_value == 0:
            raise ValueError("kappa = 0 has no finite scene")
        ratio = kappa_value / (1.0 - kappa_value)
        b = radius if ratio > 0 else -radius
        return cls(ratio * b, b)

    @property
    def is_plane(self) -> bool:
        return math.isinf(self.a)

    @property
    def ratio(self) -> float:
        """``b/a``; zero for the plane."""
        return 0.0 if self.is_plane else self.b / self.a

    @property
    def kappa(self) -> float:
        return kappa(self)

    @property
    def exponent(self) -> float:
        """Conformal exponent ``(b - a)/(2a)``; ``-1/2`` for the plane."""
        return 0.5 * (self.ratio - 1.0)


def kappa(scene: SceneParams) -> float:
    """``a/(a+b)``; 1 for the plane. Undefined (ValueError) when ``b = -a``."""
    if scene.is_plane:
        return 1.0
    denom = scene.a + scene.b
    if abs(denom) <= 1e-15 * abs(scene.a):
        raise ValueError("kappa is undefined for b = -a")
    return scene.a / denom


def _check_pair(body: BodyParams, scene: SceneParams) -> None:
    if body.b != scene.b:
        raise ValueError(f"body radius {body.b} does not match scene radius {scene.b}")


@dataclass
class FullState:
    """Orientation ``R``, contact normal ``gamma`` and angular momentum ``L``."""

    R: np.ndarray
    gamma: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float).reshape(3, 3)
        self.gamma = np.asarray(self.gamma, dtype=float).reshape(3)
        self.L = np.asarray(self.L, dtype=float).reshape(3)

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.R.ravel(), self.gamma, self.L])

    @classmethod
    def from_array(cls, x: np.ndarray) -> "FullState":
        x = np.asarray(x, dtype=float)
        return cls(x[:9].reshape(3, 3), x[9:12], x[12:15])

    def validate(self, tol: float = 1e-10) -> None:
        """Raise ValueError if ``R`` is not a rotation or ``gamma`` not unit."""
        if np.abs(self.R.T @ self.R - np.eye(3)).max() > tol or np.linalg.det(self.R) <= 0:
            raise ValueError("R is not a rotation")
        if abs(np.linalg.norm(self.gamma) - 1.0) > tol:
            raise ValueError("gamma is not a unit vector")


def full_state_projector(x: np.ndarray) -> np.ndarray:
    """Re-orthonormalise ``R`` and renormalise ``gamma`` in a flat full state.

    One Newton-Schulz sweep ``R (3I - R^T R)/2`` converges quadratically to the
    polar factor, which is exact to rounding for the per-step drift of a stepper.
    """
    y = x.copy()
    R = x[:9].reshape(3, 3)
    y[:9] = (R @ (1.5 * np.eye(3) - 0.5 * (R.T @ R))).ravel()
    g = x[9:12]
    y[9:12] = g / math.sqrt(g @ g)
    return y


def _rot_rate(R, w0: float, w1: float, w2: float) -> list:
    """Row-major entries of ``R hat(w)``; row ``i`` is ``R_i x w``."""
    out = []
    for i in range(3):
        r0, r1, r2 = R[3 * i], R[3 * i + 1], R[3 * i + 2]
        out += [r1 * w2 - r2 * w1, r2 * w0 - r0 * w2, r0 * w1 - r1 * w0]
    return out


# --- rubber model -----------------------------------------------------------


def omega_from_L_rubber(L: np.ndarray, body: BodyParams) -> np.ndarray:
    """``Omega = (A + mu b^2 I)^{-1} L``."""
    return np.asarray(L, dtype=float) / body.a_tilde_diag()


def rubber_multiplier(gamma: np.ndarray, L: np.ndarray, body: BodyParams, scene: SceneParams) -> float:
    """Reaction multiplier ``tau`` that keeps ``(Omega, gamma) = 0``."""
    _check_pair(body, scene)
    d = body.a_tilde_diag()
    return _tau(np.asarray(gamma, float), np.asarray(L, float), d, kappa(scene))


def _tau(g: np.ndarray, L: np.ndarray, d: np.ndarray, k: float) -> float:
    w = L / d
    ag = g / d
    return (cross(w, L) @ ag + k * (w @ cross(w, g))) / (g @ ag)


def rubber_field(body: BodyParams, scene: SceneParams):
    """Flat-state vector field ``f(t, x)`` of the rubber model."""
    _check_pair(body, scene)
    d = body.a_tilde_diag()
    k = kappa(scene)

    d0, d1, d2 = (float(v) for v in d)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        v = x.tolist()
        g0, g1, g2, l0, l1, l2 = v[9:15]
        w0, w1, w2 = l0 / d0, l1 / d1, l2 / d2
        c0, c1, c2 = w1 * l2 - w2 * l1, w2 * l0 - w0 * l2, w0 * l1 - w1 * l0
        wg0, wg1, wg2 = w1 * g2 - w2 * g1, w2 * g0 - w0 * g2, w0 * g1 - w1 * g0
        num = c0 * g0 / d0 + c1 * g1 / d1 + c2 * g2 / d2 + k * (w0 * wg0 + w1 * wg1 + w2 * wg2)
        tau = num / (g0 * g0 / d0 + g1 * g1 / d1 + g2 * g2 / d2)
        return np.array(
            _rot_rate(v, w0, w1, w2)
            + [-k * wg0, -k * wg1, -k * wg2, tau * g0 - c0, tau * g1 - c1, tau * g2 - c2]
        )

    return f


def rhs_rubber(state: FullState, body: BodyParams, scene: SceneParams) -> FullState:
    """Time derivative of a rubber-rolling state, returned as a FullState."""
    return FullState.from_array(rubber_field(body, scene)(0.0, state.to_array()))


def rubber_energy(L: np.ndarray, body: BodyParams) -> float:
    """``H = (L, Omega)/2`` for the rubber model."""
    L = np.asarray(L, dtype=float)
    return 0.5 * float(L @ (L / body.a_tilde_diag()))


def rubber_constraint(gamma: np.ndarray, L: np.ndarray, body: BodyParams) -> float:
    """No-twist residual ``(Omega, gamma)``."""
    return float(omega_from_L_rubber(L, body) @ np.asarray(gamma, dtype=float))


def project_to_rubber_constraint(gamma: np.ndarray, L: np.ndarray, body: BodyParams) -> np.ndarray:
    """Shift ``L`` along ``gamma`` so that ``(A~^{-1} L, gamma) = 0``."""
    g = np.asarray(gamma, dtype=float)
    L = np.asarray(L, dtype=float)
    d = body.a_tilde_diag()
    return L - ((L / d) @ g) / (g @ (g / d)) * g


# --- marble model -----------------------------------------------------------


def omega_from_L_marble(gamma: np.ndarray, L: np.ndarray, body: BodyParams, r: float) -> np.ndarray:
    """Angular velocity of the marble model with ball radius ``r``.

    ``Omega = A~^{-1} L + alpha A~^{-1} gamma`` with ``A~ = A + mu r^2 I`` and
    ``alpha = mu r^2 (gamma, A~^{-1} L) / (1 - mu r^2 (gamma, A~^{-1} gamma))``.
    """
    g = np.asarray(gamma, dtype=float)
    L = np.asarray(L, dtype=float)
    d = body.a_tilde_diag(r)
    m = body.mu * r * r
    ag = g / d
    alpha = m * (ag @ L) / (1.0 - m * (g @ ag))
    return L / d + alpha * ag


def marble_field(body: BodyParams, scene: SceneParams, r: Optional[float] = None):
    """Flat-state vector field of the marble model (``r`` defaults to ``|b|``)."""
    r = abs(body.b) if r is None else float(r)
    d = body.a_tilde_diag(r)
    m = body.mu * r * r
    k = kappa(scene)

    d0, d1, d2 = (float(v) for v in d)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        v = x.tolist()
        g0, g1, g2, l0, l1, l2 = v[9:15]
        a0, a1, a2 = g0 / d0, g1 / d1, g2 / d2
        alpha = m * (a0 * l0 + a1 * l1 + a2 * l2) / (1.0 - m * (g0 * a0 + g1 * a1 + g2 * a2))
        w0, w1, w2 = l0 / d0 + alpha * a0, l1 / d1 + alpha * a1, l2 / d2 + alpha * a2
        return np.array(
            _rot_rate(v, w0, w1, w2)
            + [
                k * (g1 * w2 - g2 * w1),
                k * (g2 * w0 - g0 * w2),
                k * (g0 * w1 - g1 * w0),
                l1 * w2 - l2 * w1,
                l2 * w0 - l0 * w2,
                l0 * w1 - l1 * w0,
            ]
        )

    return f


def rhs_marble(state: FullState, body: BodyParams, scene: SceneParams, r: Optional[float] = None) -> FullState:
    """Time derivative of a marble state, returned as a FullState."""
    return FullState.from_array(marble_field(body, scene, r)(0.0, state.to_array()))


def marble_integrals(gamma: np.ndarray, L: np.ndarray, body: BodyParams, r: float) -> np.ndarray:
    """``(f1, f2, f3, f4) = ((L, Omega), |L|^2, |gamma|^2, (L, gamma))``."""
    g = np.asarray(gamma, dtype=float)
    L = np.asarray(L, dtype=float)
    w = omega_from_L_marble(g, L, body, r)
    return np.array([L @ w, L @ L, g @ g, L @ g])


def marble_chaplygin_function(gamma: np.ndarray, body: BodyParams, r: float) -> float:
    """``F = 1/(mu r^2) - (gamma, A~^{-1} gamma)``; positive on the unit sphere."""
    g = np.asarray(gamma, dtype=float)
    return 1.0 / (body.mu * r * r) - float(g @ (g / body.a_tilde_diag(r)))


def marble_measure_density(gamma: np.ndarray, body: BodyParams, r: float) -> float:
    """Invariant density ``F^{-1/2}`` of the marble flow in ``(gamma, L)``."""
    return marble_chaplygin_function(gamma, body, r) ** -0.5


def marble_gamma_L_field(body: BodyParams, scene: SceneParams, r: Optional[float] = None):
    """Vector field of the marble model restricted to ``(gamma, L)`` in R^6."""
    r = abs(body.b) if r is None else float(r)
    d = body.a_tilde_diag(r)
    m = body.mu * r * r
    k = kappa(scene)

    def f(y: np.ndarray) -> np.ndarray:
        g = y[:3]
        L = y[3:]
        ag = g / d
        alpha = m * (ag @ L) / (1.0 - m * (g @ ag))
        w = L / d + alpha * ag
        return np.concatenate([k * cross(g, w), cross(L, w)])

    return f


def weighted_divergence(
    field, density, y: np.ndarray, rel_step: float = 1e-6
) -> float:
    """Central-difference divergence of ``density(y) * field(y)`` at ``y``.

    The step on each coordinate is ``rel_step * max(1, |y_i|)``.
    """
    y = np.asarray(y, dtype=float)
    total = 0.0
    for i in range(len(y)):
        h = rel_step * max(1.0, abs(y[i]))
        yp = y.copy()
        ym = y.copy()
        yp[i] += h
        ym[i] -= h
        total += (density(yp) * field(yp)[i] - density(ym) * field(ym)[i]) / (2.0 * h)
    return total


def duistermaat_identities(gamma: np.ndarray, L: np.ndarray, body: BodyParams, r: float) -> dict:
    """The two identities that make ``F^{-1/2}`` an invariant density.

    Returns lhs/rhs pairs for ``div_gamma(gamma x Omega) = (gamma x A~^{-1}gamma, A~^{-1}L)/F``
    and ``(grad F, gamma x Omega) = 2 (gamma x A~^{-1}gamma, A~^{-1}L)``, with the
    divergence and gradient taken in R^3 by central differences.
    """
    g = np.asarray(gamma, dtype=float)
    L = np.asarray(L, dtype=float)
    d = body.a_tilde_diag(r)
    h = 1e-6
    div = 0.0
    grad = np.zeros(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        vp = cross(g + e, omega_from_L_marble(g + e, L, body, r))
        vm = cross(g - e, omega_from_L_marble(g - e, L, body, r))
        div += (vp[i] - vm[i]) / (2 * h)
        grad[i] = (
            marble_chaplygin_function(g + e, body, r) - marble_chaplygin_function(g - e, body, r)
        ) / (2 * h)
    Fm = marble_chaplygin_function(g, body, r)
    s = float(cross(g, g / d) @ (L / d))
    w = omega_from_L_marble(g, L, body, r)
    return {
        "divergence": (div, s / Fm),
        "gradient": (float(grad @ cross(g, w)), 2.0 * s),
    }


# --- sliding (skiding) model ------------------------------------------------


def skiding_field(body: BodyParams, scene: SceneParams):
    """Ball sliding without friction: free Euler top plus a geodesic centre path.

    Flat state ``(q, qdot, R, M)`` with ``q`` the contact point on the fixed
    sphere and ``M`` the body angular momentum about the centre. On the plane
    the contact point moves in a straight line.
    """
    inv = 1.0 / np.array(body.inertia)
    a = scene.a

    def f(t: float, x: np.ndarray) -> np.ndarray:
        q = x[0:3]
        v = x[3:6]
        R = x[6:15].reshape(3, 3)
        M = x[15:18]
        w = M * inv
        out = np.empty(18)
        out[0:3] = v
        out[3:6] = 0.0 if math.isinf(a) else -(v @ v) / (a * a) * q
        out[6:15] = (R @ hat(w)).ravel()
        out[15:18] = cross(M, w)
        return out

    return f


def skiding_energy(x: np.ndarray, body: BodyParams, scene: SceneParams) -> float:
    """Kinetic energy of the sliding ball, centre speed scaled by ``(1 + b/a)``."""
    v = x[3:6]
    M = x[15:18]
    scale = (1.0 + scene.ratio) ** 2
    return 0.5 * body.mu * scale * float(v @ v) + 0.5 * float(M @ (M / np.array(body.inertia)))


def skiding_projector(a: float):
    def proj(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        if not math.isinf(a):
            q = x[0:3]
            y[0:3] = a * q / math.sqrt(q @ q)
            y[3:6] = x[3:6] - (x[3:6] @ y[0:3]) / (a * a) * y[0:3]
        y[6:15] = project_rotation(x[6:15].reshape(3, 3)).ravel()
        return y

    return proj


# --- trajectories on disk ---------------------------------------------------

TRAJECTORY_COLUMNS = (
    ["t", "gamma1", "gamma2", "gamma3", "L1", "L2", "L3"]
    + [f"R{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + ["H", "constraint"]
)


def trajectory_rows(t: np.ndarray, x: np.ndarray, body: BodyParams) -> np.ndarray:
    """Rows of the rubber trajectory table for flat full states ``x``."""
    d = body.a_tilde_diag()
    g = x[:, 9:12]
    L = x[:, 12:15]
    H = 0.5 * np.sum(L * L / d, axis=1)
    c = np.sum((L / d) * g, axis=1)
    return np.column_stack([t, g, L, x[:, :9], H, c])


def write_trajectory_csv(path, t: np.ndarray, x: np.ndarray, body: BodyParams) -> None:
    """Write a rubber trajectory with a header row and 17 significant digits."""
    rows = trajectory_rows(np.asarray(t), np.asarray(x), body)
    write_table(path, TRAJECTORY_COLUMNS, rows)


def write_table(path, columns: Sequence[str], rows: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in np.asarray(rows):
            w.writerow([f"{v:.{CSV_DIGITS}g}" for v in row])


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Read a table written by :func:`write_table`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    return header, np.array(rows).reshape(-1, len(header))


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_trajectory_csv`: returns ``(t, flat states)``."""
    header, rows = read_table(path)
    if header != TRAJECTORY_COLUMNS:
        raise ValueError("not a rubber trajectory table")
    t = rows[:, 0]
    x = np.column_stack([rows[:, 7:16], rows[:, 1:4], rows[:, 4:7]])
    return t, x


def default_initial_state(body: BodyParams, gamma=None, L=None) -> np.ndarray:
    """Flat full state with ``R = I``, a generic ``gamma`` and a projected ``L``."""
    if gamma is None:
        gamma = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0) + np.array([0.013, -0.021, 0.007])
    g = np.asarray(gamma, dtype=float)
    g = g / np.linalg.norm(g)
    L = np.array([0.3, -0.2, 0.5]) if L is None else np.asarray(L, dtype=float)
    L = project_to_rubber_constraint(g, L, body)
    return np.concatenate([np.eye(3).ravel(), g, L])
