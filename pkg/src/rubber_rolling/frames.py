"""Darboux frames of curves on spheres centred at the origin.

For a curve ``r(s)`` on a sphere with unit normal ``N`` the frame is
``(t, u = N x t, N)`` and the invariants are the geodesic curvature ``kappa_g``,
the normal curvature ``kappa_n`` and the geodesic torsion ``tau_g``:

    t' = kappa_g u + kappa_n N,  u' = -kappa_g t + tau_g N,  N' = -kappa_n t - tau_g u.

``orientation = +1`` uses the exterior normal ``r/|r|`` (so ``kappa_n = -1/radius``
and ``tau_g = 0`` on any spherical curve); ``orientation = -1`` the interior one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .dynamics import read_table, write_table
from .so3 import StepperSpec, integrate

CURVE_COLUMNS = ["s", "x", "y", "z"]
MIN_FD_STEP = 1e-4


@dataclass(frozen=True)
class FrameInvariants:
    kappa_g: float
    kappa_n: float
    tau_g: float


@dataclass
class SphericalCurve:
    """Samples ``points`` (n, 3) at increasing arclength ``s`` on a sphere of ``radius``."""

    s: np.ndarray
    points: np.ndarray
    radius: float
    orientation: int = 1

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3 or len(self.s) != len(self.points):
            raise ValueError("points must have shape (n, 3) matching s")
        if len(self.s) < 5:
            raise ValueError("need at least five samples")
        if np.any(np.diff(self.s) <= 0):
            raise ValueError("arclength samples must be strictly increasing")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        off = np.abs(np.linalg.norm(self.points, axis=1) - self.radius).max()
        if off > 1e-8 * self.radius:
            raise ValueError(f"points leave the sphere by {off:.3g}")
        self._spline = CubicSpline(self.s, self.points, axis=0)

    @classmethod
    def from_points(cls, points: np.ndarray, radius: Optional[float] = None, orientation: int = 1):
        """Curve through ``points`` parametrised by cumulative chord length."""
        pts = np.asarray(points, dtype=float)
        if radius is None:
            radius = float(np.mean(np.linalg.norm(pts, axis=1)))
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(steps)])
        return cls(s, pts, radius, orientation)

    @property
    def spacing(self) -> float:
        return float(np.max(np.diff(self.s)))

    def fd_step(self) -> float:
        return max(MIN_FD_STEP, 10.0 * self.spacing)

    def __call__(self, s) -> np.ndarray:
        return self._spline(s)

    def derivatives(self, s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Position and 4th-order central first/second derivatives at ``s``."""
        h = self.fd_step()
        if s - 2 * h < self.s[0] - 1e-12 or s + 2 * h > self.s[-1] + 1e-12:
            raise ValueError(f"s = {s} is within two stencil steps of the curve ends")
        f = self._spline(s + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0]))
        d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        return f[2], d1, d2

    def to_csv(self, path) -> None:
        write_table(path, CURVE_COLUMNS, np.column_stack([self.s, self.points]))

    @classmethod
    def from_csv(cls, path, radius: Optional[float] = None, orientation: int = 1):
        header, rows = read_table(path)
        if header != CURVE_COLUMNS:
            raise ValueError("not a curve table")
        pts = rows[:, 1:4]
        if radius is None:
            radius = float(np.mean(np.linalg.norm(pts, axis=1)))
        return cls(rows[:, 0], pts, radius, orientation)


def invariants_from_derivatives(
    r: np.ndarray, d1: np.ndarray, d2: np.ndarray, orientation: int = 1
) -> FrameInvariants:
    """Darboux invariants from position and first two derivatives in any parameter."""
    rn = math.sqrt(r @ r)
    speed = math.sqrt(d1 @ d1)
    N = orientation * r / rn
    dN = orientation * (d1 - (r @ d1) / (rn * rn) * r) / rn
    t = d1 / speed
    u = np.cross(N, t)
    kg = float(N @ np.cross(d1, d2)) / speed**3
    kn = float(d2 @ N) / speed**2
    tg = float(dN @ u) / speed
    return FrameInvariants(kg, kn, tg)


def frame_invariants(curve: SphericalCurve, s: float) -> FrameInvariants:
    """Invariants at arclength ``s`` using spline values and 4th-order differences."""
    r, d1, d2 = curve.derivatives(s)
    return invariants_from_derivatives(r, d1, d2, curve.orientation)


def darboux_frame(curve: SphericalCurve, s: float) -> np.ndarray:
    """Rows ``t, u, N`` of the Darboux frame at ``s``."""
    r, d1, _ = curve.derivatives(s)
    N = curve.orientation * r / np.linalg.norm(r)
    t = d1 / np.linalg.norm(d1)
    return np.array([t, np.cross(N, t), N])


def frame_rotation_vector(inv: FrameInvariants) -> np.ndarray:
    """Darboux vector in frame components ``(t, u, N)``: ``e' = d x e``."""
    return np.array([inv.tau_g, -inv.kappa_n, inv.kappa_g])


def rolling_invariant_relations(base: FrameInvariants, body: FrameInvariants) -> dict:
    """Residuals of the rolling relations between contact paths.

    With the two frames matched by the rotation (normals pointing the same
    way), rolling without slipping or twisting forces equal geodesic
    curvatures and equal geodesic torsions.
    """
    return {
        "kappa_g": abs(base.kappa_g - body.kappa_g),
        "tau_g": abs(base.tau_g - body.tau_g),
    }


def reconstruct_spherical_curve(
    kappa_g: Callable[[float], float],
    radius: float,
    length: float,
    q0: Sequence[float],
    t0: Sequence[float],
    ds: float = 1e-3,
) -> SphericalCurve:
    """Unit-speed curve on the sphere with prescribed geodesic curvature.

    Solves ``q'' = (kappa_g(s)/radius) q x q' - q/radius^2`` (exterior normal)
    from ``q(0) = q0`` and ``q'(0) = t0`` after projecting both onto the sphere.
    """
    q = np.asarray(q0, dtype=float)
    q = radius * q / np.linalg.norm(q)
    v = np.asarray(t0, dtype=float)
    v = v - (v @ q) / radius**2 * q
    if np.linalg.norm(v) == 0:
        raise ValueError("initial tangent is normal to the sphere")
    v = v / np.linalg.norm(v)

    def f(s: float, y: np.ndarray) -> np.ndarray:
        p, w = y[:3], y[3:]
        return np.concatenate([w, kappa_g(s) / radius * np.cross(p, w) - p / radius**2])

    def proj(y: np.ndarray) -> np.ndarray:
        p = radius * y[:3] / np.linalg.norm(y[:3])
        w = y[3:] - (y[3:] @ p) / radius**2 * p
        return np.concatenate([p, w / np.linalg.norm(w)])

    traj = integrate(f, np.concatenate([q, v]), (0.0, length), StepperSpec(dt=ds), proj)
    return SphericalCurve(traj.t, traj.x[:, :3], radius, 1)
