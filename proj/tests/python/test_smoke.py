import math

import talentilab as tl


def test_model_space_closed_forms():
    p = tl.ModelParams(1.0, 2.0)
    assert abs(p.interval_length - math.pi) < 1e-14
    assert abs(p.normalizing_constant - 2.0) < 1e-12
    assert abs(p.H(math.pi / 2) - 0.5) < 1e-13
    assert abs(p.inv_H(0.75) - 2 * math.pi / 3) < 1e-11
    for v in (0.1, 0.25, 0.5):
        assert abs(p.iso_profile(v) - math.sqrt(v * (1 - v))) < 1e-11
    g1, g2 = p.asympt_constants()
    assert abs(g1 - 0.5) < 1e-13 and abs(g2 - 0.25) < 1e-13


def test_rearrangement():
    bps, vals = tl.decreasing_rearrangement([3.0, 1.0, 2.0], [0.2, 0.5, 0.3])
    assert vals == [3.0, 2.0, 1.0]
    assert abs(bps[1] - 0.2) < 1e-15 and abs(bps[-1] - 1.0) < 1e-15
    assert abs(tl.distribution_function([3.0, 1.0, 2.0], [0.2, 0.5, 0.3], 1.5) - 0.5) < 1e-15
    assert tl.lp_norm([3.0, 1.0, 2.0], [0.2, 0.5, 0.3], tl.INF) == 3.0
    assert abs(tl.hardy_littlewood_bound([3.0, 1.0, 2.0], [0.2, 0.5, 0.3], 0.3) - 0.8) < 1e-14


def test_model_poisson_and_functionals():
    p = tl.ModelParams(1.0, 2.0)
    sol = tl.solve_model_poisson_const(p, 2.0, 0.5, n_grid=512)
    assert abs(sol["w"][0] - 2 * math.log(2)) < 1e-9
    assert abs(tl.torsional_rigidity_model(p, 0.5) - (2 * math.log(2) - 1)) < 1e-9
    assert abs(tl.sobolev_c1(p, 0.5, tl.INF) - math.log(2)) < 1e-10
    assert abs(tl.model_first_eigenvalue(p, 0.5, 256) - 2.0) < 1e-3


def test_mesh_and_comparison():
    verts, tris, measures, max_edge = tl.generate_icosphere(3)
    assert len(verts) == 642 and len(tris) == 1280
    assert abs(sum(measures) - 1.0) < 1e-12
    rep = tl.talenti_check_cap(3, 0.5, n_grid=512)
    assert rep["all_pass"]
    assert rep["pointwise_margin"] >= -rep["eps_mesh"]
    assert rep["monotonicity_violation"] <= rep["eps_mesh"]


def test_exit_time():
    est = tl.exit_time_cap(cap_mass=0.5, dt=2e-3, n=1500, seed=11, workers=2)
    band = 3 * est["stderr"] + 0.15
    assert abs(est["mean"] - 2 * math.log(2)) < band
