"""Rotation-group primitives and the ODE steppers used across the package.

The steppers are written for small state vectors (a few dozen entries) where
Python call overhead dominates, so they avoid per-step allocations beyond the
stage vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

Vector = np.ndarray
RHS = Callable[[float, np.ndarray], np.ndarray]
Projector = Callable[[np.ndarray], np.ndarray]

# Defaults shared by every integrator entry point.
DEFAULT_DT = 1e-3
DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-10
MIN_STEP = 1e-14


class IntegrationError(RuntimeError):
    """Raised when a stepper cannot make progress; ``t`` is the failure time."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t = {t:.17g})")
        self.t = t


def hat(v: Sequence[float]) -> np.ndarray:
    """Skew matrix with ``hat(v) @ w == cross(v, w)``."""
    x, y, z = (float(c) for c in v)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hat`; rejects matrices that are not skew."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m + m.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not skew-symmetric")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors without the overhead of ``np.cross``."""
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def project_rotation(m: np.ndarray) -> np.ndarray:
    """Nearest rotation in Frobenius norm (the orthogonal polar factor).

    Raises ``ValueError`` if ``det(m) <= 0``, where the nearest orthogonal
    matrix is not a rotation.
    """
    m = np.asarray(m, dtype=float).reshape(3, 3)
    if np.linalg.det(m) <= 0.0:
        raise ValueError("matrix has non-positive determinant; no nearest rotation")
    u, _, vt = np.linalg.svd(m)
    return u @ vt


def rotation_angle(r: np.ndarray) -> float:
    """Rotation angle in [0, pi] of a rotation matrix."""
    c = 0.5 * (float(np.trace(r)) - 1.0)
    return math.acos(min(1.0, max(-1.0, c)))


def rotation_log(r: np.ndarray) -> np.ndarray:
    """Rotation vector (axis times angle) of ``r``, angle in [0, pi]."""
    r = np.asarray(r, dtype=float)
    theta = rotation_angle(r)
    w = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    if theta < 1e-8:
        return 0.5 * w
    if math.pi - theta < 1e-6:
        # Near pi the antisymmetric part vanishes; read the axis from r + I.
        b = 0.5 * (r + np.eye(3))
        k = int(np.argmax(np.diag(b)))
        axis = b[:, k] / math.sqrt(max(b[k, k], 1e-300))
        if w @ axis < 0:
            axis = -axis
        return theta * axis
    return theta / (2.0 * math.sin(theta)) * w


def rotation_exp(w: Sequence[float]) -> np.ndarray:
    """Rodrigues formula for ``expm(hat(w))``."""
    w = np.asarray(w, dtype=float)
    theta = float(np.linalg.norm(w))
    k = hat(w)
    if theta < 1e-8:
        return np.eye(3) + k + 0.5 * k @ k
    return (
        np.eye(3)
        + math.sin(theta) / theta * k
        + (1.0 - math.cos(theta)) / theta**2 * k @ k
    )


@dataclass(frozen=True)
class StepperSpec:
    """Integrator choice.

    ``method`` is ``"rk4"`` (fixed step ``dt``) or ``"rk45"`` (adaptive
    Dormand-Prince with tolerances ``atol``/``rtol``; ``dt`` is the first trial
    step and the cap on the step size). ``project`` toggles the caller's
    projector after every accepted step.
    """

    method: str = "rk4"
    dt: float = DEFAULT_DT
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL
    project: bool = True

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown stepper method {self.method!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if not (self.atol > 0 and self.rtol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class Trajectory:
    """Sampled solution: ``t`` has shape (n,), ``x`` has shape (n, dim).

    ``status`` is ``"completed"`` or ``"event"`` when a stop condition fired.
    """

    t: np.ndarray
    x: np.ndarray
    status: str = "completed"

    def __len__(self) -> int:
        return len(self.t)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]


def _rk4_step(f: RHS, t: float, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)
_DP_E = tuple(b5 - b4 for b5, b4 in zip(_DP_B5, _DP_B4))


def _dp_step(f: RHS, t: float, x: np.ndarray, h: float, k1: np.ndarray):
    ks = [k1]
    for i in range(1, 7):
        xi = x.copy()
        for aij, kj in zip(_DP_A[i], ks):
            if aij:
                xi += (h * aij) * kj
        ks.append(f(t + _DP_C[i] * h, xi))
    x5 = x.copy()
    err = np.zeros_like(x)
    for b5, e, k in zip(_DP_B5, _DP_E, ks):
        if b5:
            x5 += (h * b5) * k
        if e:
            err += (h * e) * k
    return x5, err, ks[-1]


def integrate(
    f: RHS,
    x0: Sequence[float],
    t_span: tuple[float, float],
    spec: StepperSpec = StepperSpec(),
    projector: Optional[Projector] = None,
    t_eval: Optional[Sequence[float]] = None,
    stop: Optional[Callable[[float, np.ndarray], bool]] = None,
    sample_every: int = 1,
) -> Trajectory:
    """Integrate ``x' = f(t, x)`` over ``t_span``; backwards spans are allowed.

    Without ``t_eval`` every ``sample_every``-th step is recorded, plus the
    endpoint. With ``t_eval`` (monotone, inside the span) the stepper shortens
    steps so that it lands on each requested time exactly. ``stop(t, x)``
    returning True ends the run after the current step (status ``"event"``).
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    x = np.array(x0, dtype=float)
    direction = 1.0 if t1 >= t0 else -1.0
    proj = projector if (projector is not None and spec.project) else None
    if proj is not None:
        x = proj(x)

    targets = None
    if t_eval is not None:
        targets = np.asarray(t_eval, dtype=float)
        if np.any(direction * np.diff(targets) < 0):
            raise ValueError("t_eval must be monotone in the integration direction")
        if len(targets) and (
            direction * (targets[0] - t0) < -1e-12 or direction * (t1 - targets[-1]) < -1e-12
        ):
            raise ValueError("t_eval must lie inside t_span")

    ts: list[float] = []
    xs: list[np.ndarray] = []
    ti = 0
    if targets is None:
        ts.append(t0)
        xs.append(x.copy())
    else:
        while ti < len(targets) and abs(targets[ti] - t0) <= 1e-15 * max(1.0, abs(t0)):
            ts.append(float(targets[ti]))
            xs.append(x.copy())
            ti += 1

    t = t0
    status = "completed"
    nstep = 0
    span = abs(t1 - t0)
    end_tol = 1e-13 * max(1.0, abs(t1))
    h_try = spec.dt
    k_first = f(t, x) if spec.method == "rk45" else None

    while direction * (t1 - t) > end_tol:
        limit = t1
        if targets is not None and ti < len(targets):
            limit = float(targets[ti])
        remaining = abs(limit - t)
        if spec.method == "rk4":
            h = min(spec.dt, remaining)
            # Absorb a sliver left over by rounding into this step.
            if remaining - h < 1e-9 * spec.dt:
                h = remaining
            x_new = _rk4_step(f, t, x, direction * h)
            t_new = t + direction * h
        else:
            while True:
                h = min(h_try, remaining, spec.dt if spec.dt < span else span)
                if h < MIN_STEP * max(1.0, abs(t)):
                    raise IntegrationError("step size underflow", t)
                x_new, err, k_last = _dp_step(f, t, x, direction * h, k_first)
                if not np.all(np.isfinite(x_new)):
                    h_try = 0.25 * h
                    continue
                scale = spec.atol + spec.rtol * np.maximum(np.abs(x), np.abs(x_new))
                enorm = float(np.sqrt(np.mean((err / scale) ** 2)))
                if enorm <= 1.0:
                    fac = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
                    h_try = h * fac
                    break
                h_try = h * max(0.2, 0.9 * enorm ** -0.2)
            t_new = t + direction * h
            if abs(limit - t_new) <= end_tol:
                t_new = limit
        if not np.all(np.isfinite(x_new)):
            raise IntegrationError("non-finite state", t)
        if proj is not None:
            x_new = proj(x_new)
        if spec.method == "rk45":
            # FSAL is invalidated by projection, so re-evaluate.
            k_first = f(t_new, x_new) if proj is not None else k_last
        t, x = t_new, x_new
        nstep += 1
        if targets is None:
            if nstep % sample_every == 0 or direction * (t1 - t) <= end_tol:
                ts.append(t)
                xs.append(x.copy())
        else:
            while ti < len(targets) and abs(targets[ti] - t) <= end_tol:
                ts.append(float(targets[ti]))
                xs.append(x.copy())
                ti += 1
        if stop is not None and stop(t, x):
            status = "event"
            if targets is None and (not ts or ts[-1] != t):
                ts.append(t)
                xs.append(x.copy())
            break

    return Trajectory(np.array(ts), np.array(xs), status)
