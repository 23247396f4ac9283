"""Configuration-driven simulation runs and parameter sweeps."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from . import reduction
from . import spheroconical as sc
from .config import ConfigError, RunConfig, config_from_pairs
from .dynamics import (
    TRAJECTORY_COLUMNS,
    default_initial_state,
    full_state_projector,
    kappa,
    marble_field,
    marble_integrals,
    rubber_field,
    skiding_energy,
    skiding_field,
    skiding_projector,
    trajectory_rows,
    write_table,
)
from .so3 import IntegrationError, cross, integrate

SUMMARY_DIGITS = 17


@dataclass
class RunResult:
    columns: list
    rows: np.ndarray
    summary: dict

    def write_csv(self, path) -> None:
        write_table(path, self.columns, self.rows)

    def summary_lines(self) -> list[str]:
        out = []
        for k, v in self.summary.items():
            if isinstance(v, float):
                out.append(f"{k} = {v:.{SUMMARY_DIGITS}g}")
            else:
                out.append(f"{k} = {v}")
        return out


def _initial_full(cfg: RunConfig) -> np.ndarray:
    x0 = default_initial_state(cfg.body, cfg.gamma0, cfg.L0)
    if cfg.model == "marble" and cfg.L0 is not None:
        x0[12:15] = cfg.L0
    return x0


def _run_rubber(cfg: RunConfig) -> RunResult:
    body, scene = cfg.body, cfg.scene
    tr = integrate(rubber_field(body, scene), _initial_full(cfg), (0.0, cfg.t_end), cfg.stepper,
                   full_state_projector, sample_every=cfg.sample_every)
    rows = trajectory_rows(tr.t, tr.x, body)
    H = rows[:, -2]
    R = tr.x[:, :9].reshape(-1, 3, 3)
    orth = np.abs(np.einsum("nji,njk->nik", R, R) - np.eye(3)).max()
    return RunResult(
        TRAJECTORY_COLUMNS,
        rows,
        {
            "model": "rubber",
            "kappa": kappa(scene),
            "samples": len(tr.t),
            "t_final": float(tr.t[-1]),
            "energy": float(H[0]),
            "energy_drift": float(np.abs(H / H[0] - 1).max()) if H[0] else float(np.abs(H).max()),
            "constraint_max": float(np.abs(rows[:, -1]).max()),
            "gamma_norm_drift": float(np.abs(np.linalg.norm(tr.x[:, 9:12], axis=1) - 1).max()),
            "rotation_orthogonality": float(orth),
        },
    )


def _run_marble(cfg: RunConfig) -> RunResult:
    body, scene = cfg.body, cfg.scene
    r = cfg.marble_r if cfg.marble_r is not None else abs(body.b)
    tr = integrate(marble_field(body, scene, r), _initial_full(cfg), (0.0, cfg.t_end), cfg.stepper,
                   full_state_projector, sample_every=cfg.sample_every)
    f = np.array([marble_integrals(x[9:12], x[12:15], body, r) for x in tr.x])
    drift = np.abs(f - f[0]).max(axis=0)
    cols = ["t", "gamma1", "gamma2", "gamma3", "L1", "L2", "L3"] + TRAJECTORY_COLUMNS[7:16] + ["f1", "f2", "f3", "f4"]
    rows = np.column_stack([tr.t, tr.x[:, 9:15], tr.x[:, :9], f])
    summary = {"model": "marble", "kappa": kappa(scene), "samples": len(tr.t), "t_final": float(tr.t[-1])}
    for i in range(4):
        summary[f"f{i + 1}_drift"] = float(drift[i])
    summary["f4_conserved"] = bool(drift[3] < 1e-9)
    return RunResult(cols, rows, summary)


def _run_skiding(cfg: RunConfig) -> RunResult:
    body, scene = cfg.body, cfg.scene
    a = scene.a
    if scene.is_plane:
        q0 = np.zeros(3) if cfg.q0 is None else np.array(cfg.q0, float) * np.array([1.0, 1.0, 0.0])
        v0 = np.array(cfg.qdot0 if cfg.qdot0 is not None else (0.3, 0.1, 0.0), float) * np.array([1.0, 1.0, 0.0])
    else:
        q0 = np.array(cfg.q0 if cfg.q0 is not None else (0.0, 0.0, 1.0), float)
        q0 = a * q0 / np.linalg.norm(q0)
        v0 = np.array(cfg.qdot0 if cfg.qdot0 is not None else (0.3, 0.1, 0.0), float)
        v0 = v0 - (v0 @ q0) / (a * a) * q0
    M0 = np.array(cfg.M0 if cfg.M0 is not None else (cfg.L0 if cfg.L0 is not None else (0.3, -0.2, 0.5)), float)
    x0 = np.concatenate([q0, v0, np.eye(3).ravel(), M0])
    tr = integrate(skiding_field(body, scene), x0, (0.0, cfg.t_end), cfg.stepper, skiding_projector(a),
                   sample_every=cfg.sample_every)
    q, v, M = tr.x[:, 0:3], tr.x[:, 3:6], tr.x[:, 15:18]
    inv = 1.0 / np.array(body.inertia)
    euler = 0.5 * np.sum(M * M * inv, axis=1)
    speed = np.linalg.norm(v, axis=1)
    if scene.is_plane:
        geo = np.abs(q - q0 - np.outer(tr.t, v0)).max()
        radius = 0.0
    else:
        n = cross(q0, v0)
        n = n / np.linalg.norm(n)
        geo = float(np.abs(q @ n).max())
        radius = float(np.abs(np.linalg.norm(q, axis=1) - a).max())
    E = np.array([skiding_energy(x, body, scene) for x in tr.x])
    cols = ["t", "q1", "q2", "q3", "qdot1", "qdot2", "qdot3"] + TRAJECTORY_COLUMNS[7:16] + ["M1", "M2", "M3", "E"]
    rows = np.column_stack([tr.t, q, v, tr.x[:, 6:15], M, E])
    return RunResult(
        cols,
        rows,
        {
            "model": "skiding",
            "samples": len(tr.t),
            "t_final": float(tr.t[-1]),
            "geodesic_plane_deviation": float(geo),
            "radius_drift": radius,
            "speed_drift": float(np.abs(speed - speed[0]).max()),
            "euler_energy_drift": float(np.abs(euler - euler[0]).max()),
            "momentum_norm_drift": float(np.abs(np.sum(M * M, axis=1) - M0 @ M0).max()),
            "energy_drift": float(np.abs(E - E[0]).max()),
        },
    )


def _run_reduced(cfg: RunConfig) -> RunResult:
    body, scene = cfg.body, cfg.scene
    y0 = reduction.reduced_state_from_full(_initial_full(cfg), body, scene)
    tr = integrate(reduction.reduced_field(body, scene), y0, (0.0, cfg.t_end), cfg.stepper,
                   reduction.reduced_projector, sample_every=cfg.sample_every)
    H = np.array([reduction.reduced_hamiltonian(y[:3], y[3:], scene, body) for y in tr.x])
    cols = ["t", "gamma1", "gamma2", "gamma3", "p1", "p2", "p3", "H"]
    return RunResult(
        cols,
        np.column_stack([tr.t, tr.x, H]),
        {
            "model": "reduced",
            "samples": len(tr.t),
            "t_final": float(tr.t[-1]),
            "energy": float(H[0]),
            "energy_drift": float(np.abs(H / H[0] - 1).max()) if H[0] else float(np.abs(H).max()),
        },
    )


def _run_darboux(cfg: RunConfig) -> RunResult:
    body, scene = cfg.body, cfg.scene
    x0 = _initial_full(cfg)
    g = x0[9:12]
    gd = kappa(scene) * cross(g, x0[12:15] / body.a_tilde_diag())
    try:
        pt = sc.lambda_from_gamma(g, body.inertia)
    except sc.BoundaryError:
        raise ConfigError("init.gamma", "darboux model needs gamma off the coordinate planes") from None
    ld = sc.lambda_dot_from_gamma(g, gd, body.inertia)
    s0 = sc.darboux_momenta(pt, ld, scene, body, cfg.normalization)
    I = body.inertia
    fmax = max(sc.darboux_factor(I[0], I[1], scene, body, cfg.normalization),
               sc.darboux_factor(I[1], I[2], scene, body, cfg.normalization))
    tau_end = cfg.t_end * fmax * 1.01 + 10 * cfg.stepper.dt
    tr = sc.integrate_darboux(s0, scene, body, tau_end, cfg.stepper.dt, cfg.normalization, t_end=cfg.t_end)
    H = np.array([sc.hamiltonian_lambda(sc.DarbouxState.from_array(y), scene, body, cfg.normalization) for y in tr.x])
    idx = np.unique(np.r_[np.arange(0, len(tr.t), cfg.sample_every), len(tr.t) - 1])
    rows = np.column_stack([tr.t, tr.x[:, :4], H, tr.x[:, 4]])[idx]
    sep = sc.separability_check(scene, body, seed=cfg.seed)
    boundary = sc.boundary_distance(tr.x[-1, 0], tr.x[-1, 1], sc._inertias(I)) < sc.BOUNDARY_DISTANCE
    return RunResult(
        sc.DARBOUX_COLUMNS,
        rows,
        {
            "model": "darboux",
            "normalization": cfg.normalization,
            "exponent": scene.exponent,
            "samples": len(rows),
            "tau_final": float(tr.t[-1]),
            "t_final": float(tr.x[-1, 4]),
            "boundary_event": bool(boundary),
            "energy": float(H[0]),
            "energy_drift": float(np.abs(H / H[0] - 1).max()) if H[0] else float(np.abs(H).max()),
            "separability_residual": float(sep.residual),
            "separability_multiplier": sep.multiplier,
            "separable": bool(sep.separable),
        },
    )


RUNNERS = {
    "rubber": _run_rubber,
    "marble": _run_marble,
    "skiding": _run_skiding,
    "reduced": _run_reduced,
    "darboux": _run_darboux,
}


def run(cfg: RunConfig) -> RunResult:
    """Integrate the configured model; raises IntegrationError with the failure time."""
    return RUNNERS[cfg.model](cfg)


# --- sweeps -----------------------------------------------------------------

# Pseudo keys accepted only in sweep grids.
GRID_ALIASES = ("scene.ratio", "scene.kappa")


def parse_grid(specs: list[str]) -> dict:
    """``["key=v1;v2;v3", ...]`` -> ``{key: [v1, v2, v3]}`` (values kept as text)."""
    grid = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(spec, "grid entries look like key=v1;v2;...")
        key, values = (s.strip() for s in spec.split("=", 1))
        grid[key] = [v.strip() for v in values.split(";") if v.strip()]
        if not grid[key]:
            raise ConfigError(key, "empty value list")
    return grid


def _apply_point(pairs: dict, point: dict) -> dict:
    out = dict(pairs)
    for key, value in point.items():
        if key == "scene.ratio":
            ratio = float(value)
            b = abs(float(out["body.b"]))
            if ratio == 0:
                out["body.b"], out["scene.a"] = repr(b), "plane"
            else:
                out["body.b"] = repr(math.copysign(b, ratio))
                out["scene.a"] = repr(b / abs(ratio))
        elif key == "scene.kappa":
            from .dynamics import SceneParams

            scene = SceneParams.from_kappa(float(value), abs(float(out["body.b"])))
            out["body.b"] = repr(scene.b)
            out["scene.a"] = "plane" if scene.is_plane else repr(scene.a)
        else:
            out[key] = value
    return out


def _sweep_point(args):
    pairs, point, index, out_dir = args
    row = {"point": index, **{k: v for k, v in point.items()}}
    try:
        cfg = config_from_pairs(pairs)
        res = run(cfg)
        row["status"] = "ok"
        row.update(res.summary)
        if out_dir:
            res.write_csv(os.path.join(out_dir, f"point_{index:04d}.csv"))
    except ConfigError as exc:
        row["status"] = f"config error: {exc}"
    except IntegrationError as exc:
        row["status"] = f"integration failure at t={exc.t:.17g}"
    return row


def sweep(base: RunConfig, grid: dict, jobs: int = 1, out_dir: Optional[str] = None) -> list[dict]:
    """One independent run per grid point; failures are recorded and the batch continues."""
    for key in grid:
        if key not in base.raw and key not in GRID_ALIASES:
            from .config import KEYS

            if key not in KEYS:
                raise ConfigError(key, "unknown grid key")
    keys = list(grid)
    points = [dict(zip(keys, combo)) for combo in product(*(grid[k] for k in keys))] if keys else [{}]
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    tasks = [(_apply_point(base.raw, p), p, i, out_dir) for i, p in enumerate(points)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def write_sweep_csv(path, rows: list[dict]) -> None:
    cols = []
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            cells = []
            for c in cols:
                v = row.get(c, "")
                cells.append(f"{v:.{SUMMARY_DIGITS}g}" if isinstance(v, float) else str(v))
            w.writerow(cells)
