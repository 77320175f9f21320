import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerdg.basis import l2_project
from dimerdg.diagnostics import (
    ConvergenceTable,
    EnergyLog,
    convergence_order,
    discrete_energy,
    fmt_order,
    l2_error,
    moving_box_energy,
    transition_point,
)
from dimerdg.mesh import build_uniform_mesh
from dimerdg.model import characteristic_transform, make_problem
from dimerdg.operator import DGState, FluxParams
from dimerdg.experiments import run_case


def _state(f1, f2, mesh, q, t=0.0):
    return DGState(np.stack([l2_project(f1, mesh, q), l2_project(f2, mesh, q)]), mesh, q, t)


def test_energy_of_constant():
    m = build_uniform_mesh(-2, 2, 7)
    s = _state(lambda x: np.ones_like(x), lambda x: 0 * x, m, 2)
    assert discrete_energy(s) == pytest.approx(2.0, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(1, 9), st.integers(0, 2**31))
def test_energy_matches_brute_force_quadrature(q, n, seed):
    rng = np.random.default_rng(seed)
    m = build_uniform_mesh(-1.0, 2.5, n)
    s = DGState(rng.normal(size=(2, n, q + 1)), m, q)
    k = 4000  # midpoint rule inside each element, never touching an interface
    frac = (np.arange(k) + 0.5) / k
    xm = (m.vertices[:-1, None] + m.widths[:, None] * frac[None, :]).ravel()
    w1, w2 = s.evaluate(xm)
    brute = 0.5 * np.sum((w1**2 + w2**2) * np.repeat(m.widths / k, k))
    assert discrete_energy(s) == pytest.approx(brute, rel=1e-5)


def test_box_energy_full_domain_and_subsets():
    m = build_uniform_mesh(-2, 2, 8)
    s = _state(lambda x: np.sin(x), lambda x: x**2, m, 3)
    assert moving_box_energy(s, -2, 2) == pytest.approx(discrete_energy(s), rel=1e-13)
    assert moving_box_energy(s, -5, 5) == pytest.approx(discrete_energy(s), rel=1e-13)
    parts = moving_box_energy(s, -2, 0.33) + moving_box_energy(s, 0.33, 2)
    assert parts == pytest.approx(discrete_energy(s), rel=1e-13)
    # a box inside one element; w is a cubic so its square integrates exactly
    a, b = 0.1, 0.4
    x, wq = np.polynomial.legendre.leggauss(10)
    xx = 0.5 * (b - a) * x + 0.5 * (a + b)
    w1, w2 = s.evaluate(xx)
    assert moving_box_energy(s, a, b) == pytest.approx(0.25 * (b - a) * np.sum(wq * (w1**2 + w2**2)), rel=1e-13)
    assert moving_box_energy(s, 3, 4) == 0.0
    with pytest.raises(ValueError):
        moving_box_energy(s, 1, 1)


def test_error_of_exact_projection_is_small():
    p = make_problem("example1")
    m = build_uniform_mesh(-2, 2, 16)
    s = _state(lambda x: p.exact_solution(x, 0.5)[0], lambda x: p.exact_solution(x, 0.5)[1], m, 3, 0.5)
    e = l2_error(s, p.exact_solution)
    assert max(e) < 1e-4
    assert max(l2_error(s, p.exact_solution, norm="energy")) < 1e-14
    with pytest.raises(ValueError):
        l2_error(s, p.exact_solution, norm="max")


def test_error_transform_is_isometric():
    p = make_problem("example2")
    m = build_uniform_mesh(*p.domain, 10)
    s = _state(lambda x: np.cos(x), lambda x: 0 * x, m, 2, 0.3)
    for norm in ("l2", "energy"):
        e1, e2, b1, b2 = l2_error(s, p.exact_solution, norm=norm)
        assert b1**2 + b2**2 == pytest.approx(e1**2 + e2**2, rel=1e-12)


def test_l2_error_against_closed_form():
    m = build_uniform_mesh(0, 1, 1)
    s = DGState(np.zeros((2, 1, 1)), m, 0, 0.0)
    e = l2_error(s, lambda x, t: (x, np.ones_like(x)))
    assert e[0] == pytest.approx(math.sqrt(1 / 3))
    assert e[1] == pytest.approx(1.0)
    # b = A^T e with A orthogonal: (x -/+ 1)/sqrt(2) up to the transform's convention
    b1, b2 = characteristic_transform(np.array([1.0]), np.array([0.0]))
    assert b1[0] ** 2 + b2[0] ** 2 == pytest.approx(1.0)


def test_convergence_order_examples():
    assert convergence_order([1e-2, 2.5e-3], [10, 20])[1] == pytest.approx(2.0)
    assert convergence_order([2.7426e-3, 6.5702e-4], [20, 40])[1] == pytest.approx(2.0616, abs=1e-4)
    assert convergence_order([1e-3, 1e-3], [10, 20])[1] == 0.0
    assert convergence_order([1e-3, 0.0], [10, 20]) == [None, None]
    assert convergence_order([1e-3], [10]) == [None]
    assert fmt_order(None) == "--"
    with pytest.raises(ValueError):
        convergence_order([1.0], [1, 2])


def test_convergence_table_csv(tmp_path):
    t = ConvergenceTable()
    t.add(1, 10, (1e-2, 2e-2, 3e-2, 4e-2))
    t.add(1, 20, (2.5e-3, 5e-3, 7.5e-3, 1e-2))
    t.add(2, 10, (1e-3, 1e-3, 1e-3, 1e-3))
    rows = list(csv.reader(t.to_csv(tmp_path / "e.csv").open()))
    assert rows[0][:4] == ["q", "n_elements", "error_w1", "order_w1"]
    assert rows[1][3] == "--"
    assert rows[2][2] == "2.500000000e-03" and rows[2][3] == "2.0000"
    assert rows[3][3] == "--"
    assert t.column(1, "w2") == [2e-2, 5e-3]
    assert "2.0000" in t.format()


def test_energy_log_moving_box(tmp_path):
    m = build_uniform_mesh(-2, 2, 8)
    s = _state(lambda x: np.ones_like(x), lambda x: 0 * x, m, 1)
    log = EnergyLog(box=(-1.0, 0.0), box_speed=0.5)
    log(0, s)
    log(1, DGState(s.coeffs, m, 1, 2.0))  # box is now [0, 1]
    arr = log.array()
    np.testing.assert_allclose(arr[:, 2], [0.5, 0.5])
    assert log.box_at(2.0) == (0.0, 1.0)
    rows = list(csv.reader(log.to_csv(tmp_path / "energy.csv").open()))
    assert rows[0] == ["step", "t", "E_h", "box_E_h"] and len(rows) == 3


def test_transition_point_linear_ramp():
    m = build_uniform_mesh(0, 4, 4)
    s = _state(lambda x: 0.25 * x, lambda x: 0 * x, m, 1)
    assert transition_point(s) == pytest.approx(2.0, abs=1e-12)
    s = _state(lambda x: 0.25 * x, lambda x: 0 * x, build_uniform_mesh(0, 4, 5), 1)
    assert transition_point(s) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        transition_point(s, level=5.0)


def test_true_l2_error_of_central_flux_is_not_superconvergent():
    """The best-approximation bound caps the true L2 error at order q+1 for any flux."""
    p = make_problem("example1")
    flux = FluxParams.from_preset("central")
    e = [run_case(p, flux, 2, n, t_final=0.25)[0] for n in (20, 40, 80)]
    orders = convergence_order(e, [20, 40, 80])[1:]
    assert all(abs(o - 3.0) < 0.25 for o in orders), orders
