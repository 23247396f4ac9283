"""Acceptance criteria 1-10, one summary line each at the stated tolerances."""

import time

from conftest import record
from rubber_rolling import cli
from rubber_rolling import reduction as rd
from rubber_rolling import spheroconical as sc
from rubber_rolling import verification as vf


def _fmt(values: dict) -> str:
    return ", ".join(f"{k}={v:.2e}" for k, v in values.items())


def test_criterion_01_rubber_conservation():
    t0 = time.perf_counter()
    body, tr = vf.rubber_run(t_end=100.0, dt=1e-3)
    wall = time.perf_counter() - t0
    drift, constraint = vf.rubber_drifts(body, tr)
    ok = drift < 1e-8 and constraint < 1e-8 and wall < 10.0
    record(1, ok, f"energy drift {drift:.2e} < 1e-8, constraint {constraint:.2e} < 1e-8, runtime {wall:.1f}s < 10s")
    assert ok


def test_criterion_02_marble_integrals():
    f123 = {f"k={k:g}": float(vf.marble_run(k)[:3].max()) for k in vf.MARBLE_KAPPAS}
    f4_one = float(vf.marble_run(1.0)[3])
    f4_half = float(vf.marble_run(0.5)[3])
    ok = max(f123.values()) < 1e-9 and f4_one < 1e-9 and f4_half > 1e-4
    record(2, ok, f"f1-f3 drift {max(f123.values()):.2e} < 1e-9; f4 at k=1 {f4_one:.2e} < 1e-9; f4 at k=1/2 {f4_half:.2e} > 1e-4")
    assert ok


def test_criterion_03_marble_measure():
    div = {f"k={k:g}": vf.marble_divergence(k, 1000, 42) for k in vf.MARBLE_KAPPAS}
    ident = vf.duistermaat_residual(1000, 42)
    ok = max(div.values()) < 1e-6 and ident < 1e-6
    record(3, ok, f"weighted divergence {max(div.values()):.2e} < 1e-6; identities {ident:.2e} < 1e-6")
    assert ok


def test_criterion_04_conformal_closedness():
    res = {}
    for r in vf.CLOSEDNESS_RATIOS:
        body, scene = vf.scene_for_ratio(r)
        res[vf._ratio_label(r)] = rd.omega_nh_closedness_check(scene, body, 200, 42)
    body, scene = vf.scene_for_ratio(0.37)
    neg = rd.omega_nh_closedness_check(scene, body, 200, 42, exponent=-0.5)
    ok = max(res.values()) < 1e-6 and neg > 1e-2
    record(4, ok, f"closedness {_fmt(res)} < 1e-6; wrong exponent {neg:.2e} > 1e-2")
    assert ok


def test_criterion_05_vector_field_conformality():
    res = {}
    for r in (0.37, 1.0, 2.0, -2.0, 0.0):
        body, scene = vf.scene_for_ratio(r)
        res[vf._ratio_label(r)] = sc.xnh_equals_f_xh_check(scene, body, 200, 42)
    traj = vf.time_change_residual(0.4, 10.0)
    ok = max(res.values()) < 1e-6 and traj < 1e-5
    record(5, ok, f"X_nh - f X_H {_fmt(res)} < 1e-6; reparametrized gamma(t) {traj:.2e} < 1e-5")
    assert ok


def test_criterion_06_holonomy():
    loops = {f"th={t:g}": vf.holonomy_loop_residual(t) for t in vf.HOLONOMY_THETAS}
    small = vf.small_loop_relative()
    flat = vf.zero_curvature()
    ok = max(loops.values()) < 1e-6 and small < 1e-3 and flat < 1e-9
    record(6, ok, f"loop vs closed form {max(loops.values()):.2e} < 1e-6; small-loop density {small:.2e} < 1e-3; a=b {flat:.2e}")
    assert ok


def test_criterion_07_geodesic_curvature_equality():
    ext = vf.rolling_kappa_g_residual(1.0, 0.5)
    internal = vf.rolling_kappa_g_residual(2.0, -0.7)
    ok = max(ext, internal) < 1e-5
    record(7, ok, f"|kappa_g(base) - kappa_g(body)| {max(ext, internal):.2e} < 1e-5")
    assert ok


def test_criterion_08_spheroconical_suite():
    res = {
        "roundtrip": vf.sc_roundtrip(1000, 42),
        "metric": vf.sc_metric_identities(1000, 42),
        "identities": vf.sc_coordinate_identities(1000, 42),
        "F": vf.sc_F_identity(1000, 42),
        "detG": vf.legendre_det_residual(1000, 42),
    }
    ok = res["roundtrip"] < 1e-12 and max(v for k, v in res.items() if k != "roundtrip") < 1e-10
    record(8, ok, _fmt(res))
    assert ok


def test_criterion_09_integrable_cases():
    res = {}
    for r in (0.0, -2.0, 1.0, 0.5):
        body, scene = vf.scene_for_ratio(r)
        res[vf._ratio_label(r)] = sc.separability_check(scene, body, 100, 42).residual
    ok = res["plane"] < 1e-8 and res["-2"] < 1e-8 and res["1"] > 1e-3 and res["0.5"] > 1e-3
    record(9, ok, f"separability plane {res['plane']:.2e} < 1e-8, b=-2a {res['-2']:.2e} < 1e-8, "
                  f"b=a {res['1']:.2e} > 1e-3, b/a=0.5 {res['0.5']:.2e} > 1e-3")
    assert ok


def test_criterion_10_full_verify(capsys):
    t0 = time.perf_counter()
    code = cli.main(["verify", "--scope", "all"])
    wall = time.perf_counter() - t0
    report = capsys.readouterr().out
    failed = [line.split()[0] for line in report.splitlines() if line.rstrip().endswith("s") and " FAIL " in line]
    ok = code == 0 and wall < 300
    record(10, ok, f"verify --scope all exit {code} in {wall:.0f}s < 300s; failing: {', '.join(failed) or 'none'}")
    assert ok
