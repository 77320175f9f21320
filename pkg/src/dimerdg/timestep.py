"""Classical RK4 stepping and the step-size rules used by the experiments."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .operator import DGOperator, DGState, FluxParams
from .model import ProblemSpec

#: Courant number for convergence studies, small enough that spatial error dominates.
CONVERGENCE_CFL = 3.75e-2 / math.pi
KINK_DT = 4e-5


@dataclass(frozen=True)
class TimeStepPlan:
    """``n_steps`` steps of size ``dt`` reaching ``final_time``; the last step is shortened."""

    dt: float
    n_steps: int
    final_time: float
    rule: str = "fixed_dt"
    cfl: float | None = None

    def step_sizes(self):
        t = 0.0
        for k in range(self.n_steps):
            dt = self.final_time - t if k == self.n_steps - 1 else self.dt
            yield dt
            t += self.dt

    @classmethod
    def fixed(cls, dt: float, final_time: float) -> TimeStepPlan:
        if dt <= 0:
            raise ValueError("dt must be positive")
        if final_time < 0:
            raise ValueError("final time must be non-negative")
        n = max(0, math.ceil(final_time / dt - 1e-9))
        return cls(dt=dt, n_steps=n, final_time=final_time, rule="fixed_dt")

    @classmethod
    def cfl_scaled(cls, h: float, final_time: float, cfl: float = CONVERGENCE_CFL) -> TimeStepPlan:
        plan = cls.fixed(cfl * h, final_time)
        return cls(plan.dt, plan.n_steps, final_time, rule="cfl_scaled", cfl=cfl)


def _first_bad_element(y: np.ndarray) -> str:
    bad = np.argwhere(~np.isfinite(y))[0]
    if y.ndim == 3:
        return f"w{bad[0] + 1}, element {bad[1]}"
    return f"index {tuple(bad)}"


def rk4_step(state, t: float, dt: float, rhs: Callable):
    """Advance ``y' = rhs(y, t)`` by one classical RK4 step.

    ``state`` may be a :class:`DGState` (its time stamp is advanced) or a plain array.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    y = state.coeffs if isinstance(state, DGState) else np.asarray(state, dtype=float)
    k1 = rhs(y, t)
    k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(y + dt * k3, t + dt)
    for stage, k in enumerate((k1, k2, k3, k4), start=1):
        if not np.all(np.isfinite(k)):
            raise FloatingPointError(f"non-finite RK4 stage {stage} at t={t:.6g} in {_first_bad_element(k)}")
    y_new = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if isinstance(state, DGState):
        return DGState(y_new, state.mesh, state.q, t + dt)
    return y_new


@dataclass
class Observer:
    """Callback ``fn(step, state)`` fired every ``every_steps`` steps or ``every_time`` time units.

    Always fires at step 0 and after the final step.
    """

    fn: Callable
    every_steps: int | None = None
    every_time: float | None = None

    def __post_init__(self):
        if self.every_steps is None and self.every_time is None:
            self.every_steps = 1
        if self.every_time is not None and not self.every_time > 0:
            raise ValueError("every_time must be positive")
        self._next_time = 0.0

    def due(self, step: int, t: float) -> bool:
        if self.every_steps is not None:
            return step % self.every_steps == 0
        slack = 1e-12 * max(1.0, abs(t))
        if t >= self._next_time - slack:
            self._next_time = (math.floor((t + slack) / self.every_time) + 1) * self.every_time
            return True
        return False


def evolve(
    state: DGState,
    plan: TimeStepPlan,
    problem: ProblemSpec,
    flux_params: FluxParams,
    observers: Sequence[Observer] = (),
    operator: DGOperator | None = None,
) -> DGState:
    op = operator or DGOperator(state.mesh, state.q, problem, flux_params)
    op.check_state(state)
    observers = [o if isinstance(o, Observer) else Observer(o) for o in observers]
    y = state.coeffs.copy()
    t0 = state.t
    t = t0

    def notify(step, force=False):
        snap = None
        for o in observers:
            if o.due(step, t) or force:
                snap = snap or DGState(y, state.mesh, state.q, t)
                o.fn(step, snap)

    notify(0)
    for k, dt in enumerate(plan.step_sizes(), start=1):
        y = rk4_step(y, t, dt, op)
        t = t0 + (plan.final_time if k == plan.n_steps else k * plan.dt)
        notify(k, force=(k == plan.n_steps))
    return DGState(y, state.mesh, state.q, t)
