"""Saturable nonlinearity, characteristic variables and the bundled test problems.

Characteristic form of the system::

    w1_t =  w1_x - N(w1, w2) w2 + f1
    w2_t = -w2_x + N(w1, w2) w1 + f2

w1 travels left, so its inflow boundary is ``x_b``; w2 travels right with
inflow at ``x_a``.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

ARCCOSH2 = float(np.arccosh(2.0))
SQRT2 = float(np.sqrt(2.0))

PERIODIC = "periodic"
DIRICHLET = "dirichlet"


def sech_nonlinearity(w1, w2):
    """``2 sech(arccosh(2) |w|) - 1``; equals 1 at rest, 0 on the unit circle, tends to -1."""
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    # hypot is much slower; overflow to inf still gives the correct limit -1.
    # 2 sech(y) = 4 e^{-y} / (1 + e^{-2y}) never overflows for y >= 0.
    with np.errstate(over="ignore", under="ignore"):
        e = np.array(w1 * w1)
        e += w2 * w2
        np.sqrt(e, out=e)
        e *= -ARCCOSH2
        np.exp(e, out=e)
        d = e * e
    d += 1.0
    e *= 4.0
    e /= d
    e -= 1.0
    return e if e.ndim else float(e)


def sech_nonlinearity_modulus_derivative(r):
    """``dN/dr`` of the sech form."""
    e = np.exp(-ARCCOSH2 * np.asarray(r, dtype=float))
    sech = 2.0 * e / (1.0 + e * e)
    tanh = (1.0 - e * e) / (1.0 + e * e)
    return -2.0 * ARCCOSH2 * sech * tanh


@dataclass(frozen=True)
class Nonlinearity:
    evaluate: Callable
    name: str = "custom"
    #: large-amplitude limit, when known
    asymptote: float | None = None

    def __call__(self, w1, w2):
        return self.evaluate(w1, w2)


SECH = Nonlinearity(sech_nonlinearity, "sech", asymptote=-1.0)
ZERO = Nonlinearity(lambda w1, w2: np.zeros(np.broadcast(w1, w2).shape), "zero")
UNIT = Nonlinearity(lambda w1, w2: np.ones(np.broadcast(w1, w2).shape), "unit")


def characteristic_transform(b1, b2):
    """``(b1, b2) -> (w1, w2)``; the map is its own inverse."""
    return (b1 + b2) / SQRT2, (b1 - b2) / SQRT2


inverse_characteristic_transform = characteristic_transform


def coupling_z(w1, w2, which: int, nl: Nonlinearity = SECH):
    """``z1 = N w1`` and ``z2 = N w2``."""
    if which == 1:
        return nl(w1, w2) * w1
    if which == 2:
        return nl(w1, w2) * w2
    raise ValueError(f"which must be 1 or 2, got {which}")


def original_rhs(b1, b2, b1_x, b2_x, nl: Nonlinearity = SECH):
    """Right-hand side of the system in the original amplitudes."""
    N = nl(*characteristic_transform(b1, b2))
    return b2_x + N * b2, b1_x - N * b1


def characteristic_rhs(w1, w2, w1_x, w2_x, nl: Nonlinearity = SECH):
    N = nl(w1, w2)
    return w1_x - N * w2, -w2_x + N * w1


def _zero_forcing(x, t):
    z = np.zeros_like(np.asarray(x, dtype=float))
    return z, z


@dataclass(frozen=True)
class ProblemSpec:
    """Everything that defines one experiment apart from the discretization.

    ``inflow`` holds ``(g1, g2)``: callables of ``t`` giving w1 at ``x_b``
    and w2 at ``x_a``; only used with Dirichlet boundaries.
    """

    name: str
    domain: tuple[float, float]
    nonlinearity: Nonlinearity = SECH
    boundary_kind: str = PERIODIC
    forcing: Callable = _zero_forcing
    exact_solution: Callable | None = None
    exact_time_derivative: Callable | None = None
    inflow: tuple[Callable, Callable] = field(default=(lambda t: 0.0, lambda t: 0.0))
    has_forcing: bool = False
    #: ``x -> (w1, w2)`` at t = 0 when there is no exact solution to read it from
    initial_condition: Callable | None = None

    def __post_init__(self):
        if self.boundary_kind not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown boundary kind {self.boundary_kind!r}")
        if self.domain[1] <= self.domain[0]:
            raise ValueError("domain must satisfy x_a < x_b")

    def with_boundary(self, kind: str, inflow=None) -> ProblemSpec:
        return replace(self, boundary_kind=kind, inflow=inflow if inflow is not None else self.inflow)

    def initial(self, x):
        if self.initial_condition is not None:
            return self.initial_condition(x)
        if self.exact_solution is not None:
            return self.exact_solution(x, 0.0)
        raise ValueError(f"problem {self.name!r} has no initial data")


# example 1: periodic manufactured solution on (-2, 2)


def _ex1_exact(x, t):
    c, s = np.cos(np.pi * x), np.sin(np.pi * x)
    ct = np.cos(t) / SQRT2
    return (c + s) * ct, (c - s) * ct


def _ex1_dt(x, t):
    c, s = np.cos(np.pi * x), np.sin(np.pi * x)
    st = -np.sin(t) / SQRT2
    return (c + s) * st, (c - s) * st


def _ex1_dx(x, t):
    c, s = np.cos(np.pi * x), np.sin(np.pi * x)
    ct = np.pi * np.cos(t) / SQRT2
    return (c - s) * ct, -(s + c) * ct


# example 2: two Gaussians with zero inflow on (-2, 2)


def _ex2_parts(x, t):
    g1 = np.exp(-(x**2) / 0.01)
    g2 = np.exp(-(x**2) / 0.025)
    a = np.cos(2 * np.pi * t)
    b = 2.0 * np.cos(4 * np.pi * t)
    return g1, g2, a, b


def _ex2_exact(x, t):
    g1, g2, a, b = _ex2_parts(x, t)
    return SQRT2 * (a * g1 + b * g2), SQRT2 * (a * g1 - b * g2)


def _ex2_dt(x, t):
    g1, g2, _, _ = _ex2_parts(x, t)
    a = -2 * np.pi * np.sin(2 * np.pi * t)
    b = -8 * np.pi * np.sin(4 * np.pi * t)
    return SQRT2 * (a * g1 + b * g2), SQRT2 * (a * g1 - b * g2)


def _ex2_dx(x, t):
    g1, g2, a, b = _ex2_parts(x, t)
    d1 = -2 * x / 0.01 * g1
    d2 = -2 * x / 0.025 * g2
    return SQRT2 * (a * d1 + b * d2), SQRT2 * (a * d1 - b * d2)


def manufactured_forcing(exact, dt, dx, nl: Nonlinearity):
    """Forcing that makes ``exact`` solve the forced characteristic system."""

    def forcing(x, t):
        w1, w2 = exact(x, t)
        w1_t, w2_t = dt(x, t)
        w1_x, w2_x = dx(x, t)
        N = nl(w1, w2)
        return w1_t - w1_x + N * w2, w2_t + w2_x - N * w1

    return forcing


#: defaults for the kink problem; inflow values are filled in from the profile
KINK_DOMAIN = (-40.0, 200.0)
KINK_SPEED = 0.4


def kink_asymptote(c: float) -> tuple[float, float]:
    """Unit-circle state reached from rest along the negative unstable direction.

    Conservation of ``c |w|^2 + w1^2 - w2^2`` from zero forces ``cos 2 theta = -c``.
    """
    if abs(c) >= 1:
        raise ValueError("kinks need |c| < 1")
    return -np.sqrt((1.0 - c) / 2.0), -np.sqrt((1.0 + c) / 2.0)


def bump(x, A: float = 1.0):
    """``(1 - (x/A)^2)^4`` on ``(-A, A)``, zero outside; C^3 with compact support."""
    x = np.asarray(x, dtype=float)
    s = np.clip(1.0 - (x / A) ** 2, 0.0, None)
    return s**4


def random_smooth_data(seed: int, domain=(-2.0, 2.0), n_modes: int = 4, amplitude: float = 0.5):
    """Random trigonometric polynomial pair, periodic on ``domain``."""
    rng = np.random.default_rng(seed)
    L = domain[1] - domain[0]
    k = np.arange(1, n_modes + 1)
    coef = rng.normal(size=(2, 2, n_modes)) * amplitude / k
    const = rng.normal(size=2) * amplitude

    def f(x):
        x = np.asarray(x, dtype=float)
        th = 2 * np.pi * (x[..., None] - domain[0]) / L * k
        out = [const[i] + np.sum(coef[i, 0] * np.cos(th) + coef[i, 1] * np.sin(th), axis=-1) for i in (0, 1)]
        return out[0], out[1]

    return f


PROBLEMS = ("example1", "example2", "kink", "bump", "random")


def make_problem(
    name: str, nl: Nonlinearity = SECH, *, c: float = KINK_SPEED, domain=None, seed: int = 0
) -> ProblemSpec:
    if name == "example1":
        return ProblemSpec(
            name="example1",
            domain=domain or (-2.0, 2.0),
            nonlinearity=nl,
            boundary_kind=PERIODIC,
            forcing=manufactured_forcing(_ex1_exact, _ex1_dt, _ex1_dx, nl),
            exact_solution=_ex1_exact,
            exact_time_derivative=_ex1_dt,
            has_forcing=True,
        )
    if name == "example2":
        return ProblemSpec(
            name="example2",
            domain=domain or (-2.0, 2.0),
            nonlinearity=nl,
            boundary_kind=DIRICHLET,
            forcing=manufactured_forcing(_ex2_exact, _ex2_dt, _ex2_dx, nl),
            exact_solution=_ex2_exact,
            exact_time_derivative=_ex2_dt,
            inflow=(lambda t: 0.0, lambda t: 0.0),
            has_forcing=True,
        )
    if name == "kink":
        g1, _ = kink_asymptote(c)
        return ProblemSpec(
            name="kink",
            domain=domain or KINK_DOMAIN,
            nonlinearity=nl,
            boundary_kind=DIRICHLET,
            inflow=(lambda t, v=g1: v, lambda t: 0.0),
        )
    if name == "bump":
        # compact data for the finite-speed check; zero inflow keeps the outside at rest
        return ProblemSpec(
            name="bump",
            domain=domain or (-4.0, 4.0),
            nonlinearity=nl,
            boundary_kind=DIRICHLET,
            initial_condition=lambda x: (bump(x), 0.5 * bump(x)),
        )
    if name == "random":
        dom = domain or (-2.0, 2.0)
        return ProblemSpec(
            name="random",
            domain=dom,
            nonlinearity=nl,
            boundary_kind=PERIODIC,
            initial_condition=random_smooth_data(seed, dom),
        )
    raise ValueError(f"unknown problem {name!r}; expected one of {', '.join(PROBLEMS)}")


def exact_derivatives(name: str):
    """Closed-form ``(d/dt, d/dx)`` of a bundled exact solution, for tests."""
    return {"example1": (_ex1_dt, _ex1_dx), "example2": (_ex2_dt, _ex2_dx)}[name]
