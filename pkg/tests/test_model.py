import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerdg.model import (
    SECH,
    characteristic_rhs,
    characteristic_transform,
    coupling_z,
    exact_derivatives,
    inverse_characteristic_transform,
    kink_asymptote,
    make_problem,
    original_rhs,
    sech_nonlinearity,
    sech_nonlinearity_modulus_derivative,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_sech_reference_values():
    assert sech_nonlinearity(0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert sech_nonlinearity(1.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    # cosh(5 y) with cosh y = 2 is the Chebyshev value T5(2) = 362
    assert sech_nonlinearity(3.0, 4.0) == pytest.approx(2 / 362 - 1, abs=1e-14)


def test_sech_large_modulus_is_finite():
    with np.errstate(all="raise"):
        assert sech_nonlinearity(1e300, 1e300) == -1.0
        assert sech_nonlinearity(800.0, 0.0) == pytest.approx(-1.0)


def test_sech_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    w = rng.normal(size=(2, 50)) * 2
    ref = [2 / math.cosh(math.acosh(2) * math.hypot(a, b)) - 1 for a, b in w.T]
    np.testing.assert_allclose(sech_nonlinearity(w[0], w[1]), ref, rtol=1e-14, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(finite, finite)
def test_sech_depends_on_modulus_only(a, b):
    assert sech_nonlinearity(a, b) == pytest.approx(sech_nonlinearity(math.hypot(a, b), 0.0), abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 10), st.floats(1e-3, 10))
def test_sech_strictly_decreasing(r, dr):
    assert sech_nonlinearity(r, 0.0) > sech_nonlinearity(r + dr, 0.0)


def test_sech_modulus_derivative_matches_fd():
    r = np.linspace(0.0, 4.0, 17)
    h = 1e-6
    fd = (sech_nonlinearity(r + h, 0 * r) - sech_nonlinearity(np.abs(r - h), 0 * r)) / (2 * h)
    np.testing.assert_allclose(sech_nonlinearity_modulus_derivative(r[1:]), fd[1:], atol=1e-8)


def test_lipschitz_bound_on_grid():
    g = np.linspace(-5, 5, 401)
    W1, W2 = np.meshgrid(g, g)
    e = 1e-6
    worst = 0.0
    for fw in (lambda a, b: a * SECH(a, b), lambda a, b: b * SECH(a, b)):
        for d in ((e, 0), (0, e)):
            deriv = (fw(W1 + d[0], W2 + d[1]) - fw(W1 - d[0], W2 - d[1])) / (2 * e)
            worst = max(worst, np.abs(deriv).max())
    assert worst <= 2 + 1e-6


def test_transform_examples():
    w1, w2 = characteristic_transform(1.0, 0.0)
    assert (w1, w2) == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2)))
    b = characteristic_transform(*characteristic_transform(0.3, -0.7))
    assert b == pytest.approx((0.3, -0.7), abs=1e-15)
    assert inverse_characteristic_transform is characteristic_transform


@settings(max_examples=100, deadline=None)
@given(finite, finite)
def test_transform_preserves_modulus(a, b):
    w1, w2 = characteristic_transform(a, b)
    assert math.hypot(w1, w2) == pytest.approx(math.hypot(a, b), rel=1e-14, abs=1e-300)


def test_coupling_examples():
    assert coupling_z(0.0, 0.0, 1) == 0.0
    assert coupling_z(1.0, 0.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert coupling_z(0.5, 0.0, 2) == 0.0
    # cosh(y/2) = sqrt((cosh y + 1)/2) = sqrt(3/2) for cosh y = 2
    n_half = 2 / math.sqrt(1.5) - 1
    assert coupling_z(0.5, 0.0, 1) == pytest.approx(0.5 * n_half, rel=1e-14)
    with pytest.raises(ValueError):
        coupling_z(0.5, 0.0, 3)


def test_characteristic_system_equals_original():
    rng = np.random.default_rng(11)
    b1, b2, b1x, b2x = rng.normal(size=(4, 200))
    # N is written in w-variables; the transform preserves the modulus
    nl = lambda u, v: SECH(*characteristic_transform(u, v))  # noqa: E731
    b1t, b2t = original_rhs(b1, b2, b1x, b2x, nl)
    w1, w2 = characteristic_transform(b1, b2)
    w1x, w2x = characteristic_transform(b1x, b2x)
    w1t, w2t = characteristic_rhs(w1, w2, w1x, w2x)
    np.testing.assert_allclose(characteristic_transform(b1t, b2t), (w1t, w2t), atol=1e-13)


def test_example_values_at_origin():
    p1 = make_problem("example1")
    assert p1.exact_solution(0.0, 0.0) == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2)))
    p2 = make_problem("example2")
    assert p2.exact_solution(0.0, 0.0) == pytest.approx((3 * math.sqrt(2), -math.sqrt(2)))
    assert p1.domain == (-2.0, 2.0) and p1.boundary_kind == "periodic"
    assert p2.boundary_kind == "dirichlet"


def test_example1_forcing_when_solution_vanishes():
    p = make_problem("example1")
    t = math.pi / 2
    x = np.linspace(-2, 2, 9)
    f1, f2 = p.forcing(x, t)
    dt1, dt2 = exact_derivatives("example1")[0](x, t)
    np.testing.assert_allclose(f1, dt1, atol=1e-14)
    np.testing.assert_allclose(f2, dt2, atol=1e-14)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_forcing_consistent_with_exact_solution(name):
    """Finite-difference residual of the forced characteristic system."""
    p = make_problem(name)
    rng = np.random.default_rng(5)
    x = rng.uniform(-1.9, 1.9, 300)
    t = rng.uniform(0, 2, 300)
    h = 1e-5
    ex = p.exact_solution
    w1, w2 = ex(x, t)
    w1t, w2t = [(a - b) / (2 * h) for a, b in zip(ex(x, t + h), ex(x, t - h))]
    w1x, w2x = [(a - b) / (2 * h) for a, b in zip(ex(x + h, t), ex(x - h, t))]
    f1, f2 = p.forcing(x, t)
    N = SECH(w1, w2)
    r1 = w1t - w1x + N * w2 - f1
    r2 = w2t + w2x - N * w1 - f2
    scale = 1.0 if name == "example1" else 100.0  # example2 has x-derivatives of order 1e2
    assert np.max(np.abs(r1)) < 1e-5 * scale
    assert np.max(np.abs(r2)) < 1e-5 * scale


def test_kink_problem_defaults():
    p = make_problem("kink")
    assert p.domain == (-40.0, 200.0)
    assert p.boundary_kind == "dirichlet"
    assert not p.has_forcing
    g1, g2 = p.inflow
    assert g1(0.0) == pytest.approx(-math.sqrt(0.3))
    assert g2(0.0) == 0.0
    a = kink_asymptote(0.4)
    assert a == pytest.approx((-0.5477225575, -0.8366600265))
    assert math.hypot(*a) == pytest.approx(1.0)


def test_unknown_problem():
    with pytest.raises(ValueError):
        make_problem("example3")
