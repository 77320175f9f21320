"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""

import math
import time

import numpy as np
import pytest

from acceptance_log import record
from dimerdg.basis import eval_basis, gauss_legendre, gauss_radau_project, l2_project
from dimerdg.diagnostics import convergence_order, discrete_energy, moving_box_energy
from dimerdg.experiments import (
    RunConfig,
    energy_identity_gap,
    kink_config,
    project_initial,
    random_state,
    run_convergence,
    run_kink,
)
from dimerdg.mesh import build_uniform_mesh
from dimerdg.model import DIRICHLET, PERIODIC, make_problem
from dimerdg.operator import FLUX_PRESETS, DGState, FluxParams, assemble_rhs, energy_rate_formula, l2_inner
from dimerdg.timestep import TimeStepPlan, evolve
from dimerdg.travelwave import generate_kink

MESHES = (40, 80, 160)

# Published upwind errors for (w1, w2) on example 1 at T = 1.
REFERENCE_UPWIND = {
    (1, 40): (2.7426e-03, 2.7172e-03),
    (1, 80): (6.5702e-04, 6.5526e-04),
    (1, 160): (1.6186e-04, 1.6174e-04),
    (2, 40): (6.3391e-05, 6.3341e-05),
    (2, 80): (7.8644e-06, 7.8629e-06),
    (2, 160): (9.7931e-07, 9.7926e-07),
    (3, 40): (1.1951e-06, 1.1960e-06),
    (3, 80): (7.4395e-08, 7.4413e-08),
    (3, 160): (4.6378e-09, 4.6381e-09),
}


def _sweep(flux, qs, init="radau", norm="l2"):
    cfg = RunConfig(problem="example1", flux=flux, q_list=tuple(qs), cells_list=MESHES, init=init, norm=norm)
    return run_convergence(cfg, write=False)


def _orders(table, q):
    return [o for v in ("w1", "w2") for o in table.column(q, v, "order")[1:]]


def test_criterion_1_upwind_convergence():
    t0 = time.perf_counter()
    table = _sweep("upwind", (1, 2, 3))
    elapsed = time.perf_counter() - t0
    worst_order = max(abs(o - (q + 1)) for q in (1, 2, 3) for o in _orders(table, q))
    ratios = []
    for row in table.rows:
        ref = REFERENCE_UPWIND[(row.q, row.n_elements)]
        ratios += [row.errors[0] / ref[0], row.errors[1] / ref[1]]
    worst_ratio = max(max(r, 1 / r) for r in ratios)
    e = table.column(3, "w1")[1]
    ok = worst_order <= 0.15 and worst_ratio <= 2.0 and elapsed < 120
    record("1", ok, f"max |order-(q+1)| = {worst_order:.3f} (tol 0.15), max error ratio to reference = "
           f"{worst_ratio:.3f} (tol 2), q=3 N=80 e_w1 = {e:.4e}, {elapsed:.0f}s")
    assert ok


def test_criterion_2_mixed_upwind_convergence():
    table = _sweep("mixed-upwind", (1, 2, 3))
    worst = max(abs(o - (q + 1)) for q in (1, 2, 3) for o in _orders(table, q))
    ok = worst <= 0.2
    record("2", ok, f"max |order-(q+1)| = {worst:.3f} (tol 0.2)")
    assert ok


def test_criterion_3_central_parity():
    """Judged in the convention that reproduces the published central tables.

    That convention is L2-projected initial data with the error of the
    projected solution. The true L2 error with Radau data is printed alongside.
    It cannot exceed order q+1.
    """
    table = _sweep("central", (1, 2), init="l2", norm="energy")
    o1 = _orders(table, 1)
    o2 = _orders(table, 2)
    avg2 = float(np.mean(o2))
    literal = _sweep("central", (1, 2))
    lit2 = float(np.mean(_orders(literal, 2)))
    lit1 = _orders(literal, 1)
    ok = all(abs(o - 1.0) <= 0.1 for o in o1) and avg2 >= 3.5
    record("3", ok, f"q=1 orders {[round(o, 3) for o in o1]} (1.0 +/- 0.1), q=2 mean order {avg2:.3f} (>= 3.5) "
           f"[projected error, L2 init]; literal true-L2 with Radau init: q=1 {[round(o, 3) for o in lit1]}, "
           f"q=2 mean {lit2:.3f}")
    assert ok


def test_criterion_4_energy_conservation():
    p = make_problem("random", seed=0)
    m = build_uniform_mesh(*p.domain, 40)
    s = project_initial(p, m, 3, "l2")
    final = evolve(s, TimeStepPlan.cfl_scaled(m.h_max, 10.0), p, FluxParams.from_preset("central"))
    drift = abs(discrete_energy(final) - discrete_energy(s)) / discrete_energy(s)
    ok = drift <= 1e-9
    record("4", ok, f"relative energy drift over T=10 = {drift:.3e} (tol 1e-9)")
    assert ok


def test_criterion_5_energy_identity():
    rng = np.random.default_rng(5)
    worst = 0.0
    for name in FLUX_PRESETS:
        flux = FluxParams.from_preset(name)
        for kind in (PERIODIC, DIRICHLET):
            p = make_problem("random").with_boundary(kind)
            for i in range(100):
                m = build_uniform_mesh(*p.domain, 5 + i % 11)
                worst = max(worst, energy_identity_gap(random_state(rng, m, i % 5), p, flux))
    ok = worst <= 1e-11
    record("5", ok, f"max relative gap over 100 states x 4 presets x 2 boundary kinds = {worst:.3e} (tol 1e-11)")
    assert ok


def test_criterion_6_stability_region():
    rng = np.random.default_rng(6)
    p = make_problem("random")
    m = build_uniform_mesh(*p.domain, 10)
    worst = -math.inf
    for _ in range(200):
        a1, a2 = rng.uniform(0, 1, 2)
        room = 2 * (1 - max(a1, a2))
        b1 = rng.uniform(-3, 3)
        flux = FluxParams(a1, a2, b1, b1 - rng.uniform(-room, room))
        s = random_state(rng, m, int(rng.integers(0, 4)))
        worst = max(worst, energy_rate_formula(s, flux, p), l2_inner(s, assemble_rhs(s, 0.0, p, flux)))
    bad = FluxParams(0.5, 0.5, 1.5, -0.5, allow_unstable=True)
    c = np.zeros((2, 10, 1))
    c[:, 0, 0] = 1.0  # equal jumps in w1 and w2 at both faces of one cell
    s = DGState(c, m, 0)
    growth = l2_inner(s, assemble_rhs(s, 0.0, p, bad))
    ok = worst <= 1e-12 and growth > 0
    record("6", ok, f"max rate over 200 stable tuples = {worst:.3e} (<= 1e-12); "
           f"violating tuple (0.5,0.5,1.5,-0.5) rate = {growth:.3e} (> 0)")
    assert ok


@pytest.fixture(scope="module")
def desk_kink(tmp_path_factory):
    out = tmp_path_factory.mktemp("kink")
    t0 = time.perf_counter()
    res = run_kink(kink_config(out=str(out)))
    return res, time.perf_counter() - t0


def test_criterion_7_desk_kink(desk_kink):
    res, elapsed = desk_kink
    w1, w2 = res.plateau
    h = res.final.mesh.h_max
    disp = res.displacement
    drift = res.box_energy_drift()
    ok_a = abs(w1 + 0.5477) <= 1e-3 and abs(w2 + 0.8366) <= 1e-3
    ok_b = abs(disp - 0.4 * 20) <= h
    ok_c = drift <= 1e-6
    record("7", ok_a and ok_b and ok_c,
           f"(a) plateau ({w1:.6f}, {w2:.6f}) vs (-0.5477, -0.8366) tol 1e-3; "
           f"(b) displacement {disp:.6f} vs 8 tol {h:g}; (c) box drift {drift:.3e} (tol 1e-6); {elapsed:.0f}s")
    assert ok_a and ok_b and ok_c


def test_criterion_8_q_invariant(desk_kink):
    res, _ = desk_kink
    drifts = {0.4: res.profile.q_drift}
    z = np.linspace(-60, 60, 2401)
    for c in (-0.8, -0.3, 0.0, 0.7, 0.9):
        drifts[c] = generate_kink(c, z, z0=0.0).q_drift
    worst = max(drifts.values())
    ok = worst <= 1e-8
    record("8", ok, f"max Q drift over c in {sorted(drifts)} = {worst:.3e} (tol 1e-8)")
    assert ok


def test_criterion_9_finite_speed():
    p = make_problem("bump")
    m = build_uniform_mesh(*p.domain, 80)
    s = project_initial(p, m, 3, "l2")
    t_final = 1.0
    final = evolve(s, TimeStepPlan.cfl_scaled(m.h_max, t_final), p, FluxParams.from_preset("upwind"))
    a, h = 1.0, m.h_max
    edge = a + t_final + 2 * h
    outside = moving_box_energy(final, p.domain[0], -edge) + moving_box_energy(final, edge, p.domain[1])
    frac = outside / discrete_energy(final)
    ok = frac <= 1e-10
    record("9", ok, f"energy fraction outside (-{edge:g}, {edge:g}) at T=1 = {frac:.3e} (tol 1e-10)")
    assert ok


def test_criterion_10_projections():
    quad = gauss_legendre(17)
    worst_end = 0.0
    worst_order = 0.0
    funcs = [np.sin, lambda x: np.exp(-x * x), lambda x: 1 / (2 + np.cos(x))]
    for q in (0, 1, 2, 3, 4):
        for f in funcs:
            m = build_uniform_mesh(-1.0, 2.0, 7)
            plus = gauss_radau_project(f, m, q, "+")
            minus = gauss_radau_project(f, m, q, "-")
            worst_end = max(
                worst_end,
                np.max(np.abs(plus @ eval_basis(q, np.array([-1.0]))[0] - f(m.vertices[:-1]))),
                np.max(np.abs(minus @ eval_basis(q, np.array([1.0]))[0] - f(m.vertices[1:]))),
            )
            errs = []
            for n in (10, 20, 40):
                m = build_uniform_mesh(-1.0, 2.0, n)
                c = l2_project(f, m, q)
                x = m.map_nodes(quad.nodes)
                d = c @ eval_basis(q, quad.nodes).T - f(x)
                errs.append(math.sqrt(np.sum(0.5 * m.widths[:, None] * quad.weights * d * d)))
            orders = convergence_order(errs, [10, 20, 40])[1:]
            worst_order = max(worst_order, max(abs(o - (q + 1)) for o in orders))
    ok = worst_end <= 1e-12 and worst_order <= 0.1
    record("10", ok, f"Radau endpoint mismatch {worst_end:.3e} (tol 1e-12); "
           f"L2 projection max |order-(q+1)| = {worst_order:.3f} (tol 0.1)")
    assert ok


@pytest.mark.long
def test_long_kink_run(tmp_path):
    """Full-length run to T = 100; drift digits are reported, not enforced."""
    res = run_kink(kink_config(long=True, out=str(tmp_path)))
    drift = res.box_energy_drift()
    digits = -math.log10(drift) if drift > 0 else math.inf
    w1, w2 = res.plateau
    ok = abs(res.displacement - 40.0) <= res.final.mesh.h_max and abs(w1 + 0.5477) <= 1e-3 and abs(w2 + 0.8366) <= 1e-3
    record("7-long", ok, f"T=100: displacement {res.displacement:.6f} (40), plateau ({w1:.6f}, {w2:.6f}), "
           f"box drift {drift:.3e} ({digits:.1f} digits; soft target ~8 for q=3)")
    assert ok
