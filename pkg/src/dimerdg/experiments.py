"""Experiment drivers shared by the command line and the scripts.

Each driver takes a :class:`RunConfig`, writes plot-ready CSV files into the
output directory and returns an in-memory result for programmatic use.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .basis import eval_basis, gauss_legendre, gauss_radau_project, l2_project, N_QUAD
from .diagnostics import (
    ConvergenceTable,
    EnergyLog,
    discrete_energy,
    fmt_float,
    l2_error,
    moving_box_energy,
    transition_point,
)
from .mesh import Mesh1D, build_uniform_mesh
from .model import DIRICHLET, PERIODIC, ProblemSpec, characteristic_transform, make_problem
from .operator import DGOperator, DGState, FluxParams, energy_rate_formula, l2_inner, FLUX_PRESETS
from .timestep import CONVERGENCE_CFL, KINK_DT, Observer, TimeStepPlan, evolve
from .travelwave import REFERENCE_SEED, KinkProfile, generate_kink

INIT_CHOICES = ("radau", "l2")
SNAPSHOT_POINTS = 8


@dataclass
class RunConfig:
    """Everything a single command needs. Unset fields fall back to per-command defaults."""

    problem: str = "example1"
    flux: str = "upwind"
    q: int = 3
    n_elements: int = 40
    t_final: float = 1.0
    cfl: float | None = None
    dt: float | None = None
    bc: str | None = None
    out: str = "out"
    allow_unstable: bool = False
    # convergence sweeps
    q_list: tuple[int, ...] = (0, 1, 2, 3)
    cells_list: tuple[int, ...] = (40, 80, 160, 320, 640)
    init: str = "radau"
    norm: str = "l2"
    # output cadence
    snapshot_every: float | None = None
    energy_every: int = 100
    # moving box: (a0, b0) and speed
    box: tuple[float, float] | None = None
    box_speed: float = 0.0
    # kink
    speed: float = 0.4
    domain: tuple[float, float] | None = None
    h: float | None = None
    z0: float | None = None
    seed_profile: str = "reference"
    seed: int = 0

    def flux_params(self) -> FluxParams:
        return FluxParams.parse(self.flux, allow_unstable=self.allow_unstable)

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TUPLE_INT = {"q_list", "cells_list"}
_TUPLE_FLOAT = {"box", "domain"}


def coerce_field(name: str, raw):
    """Convert a string (config file or flag) into the type of ``RunConfig.<name>``."""
    if not isinstance(raw, str):
        return raw
    if name in _TUPLE_INT:
        return tuple(int(v) for v in raw.replace(" ", "").split(",") if v)
    if name in _TUPLE_FLOAT:
        vals = tuple(float(v) for v in raw.replace(" ", "").split(","))
        if len(vals) != 2:
            raise ValueError(f"{name} needs two numbers, got {raw!r}")
        return vals
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise ValueError(f"unknown config key {name!r}")
    kind = str(kinds[name])
    if raw.lower() in ("none", "") and "None" in kind:
        return None
    if kind.startswith("bool"):
        if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
            raise ValueError(f"{name} expects a boolean, got {raw!r}")
        return raw.lower() in ("1", "true", "yes")
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    return raw


# key aliases so that config files can use the flag spelling
CONFIG_ALIASES = {
    "cells": "n_elements",
    "tfinal": "t_final",
    "seed-profile": "seed_profile",
    "allow-unstable": "allow_unstable",
}


def load_config_file(path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    parser.read_string("[run]\n" + text)
    out = {}
    for key, raw in parser["run"].items():
        name = CONFIG_ALIASES.get(key, key.replace("-", "_"))
        out[name] = coerce_field(name, raw)
    return out


# --- initial data -----------------------------------------------------------------


def project_initial(problem: ProblemSpec, mesh: Mesh1D, q: int, init: str = "radau") -> DGState:
    """Project the problem's t = 0 data.

    ``radau`` uses ``P^+`` for w1 and ``P^-`` for w2; ``l2`` is the plain
    element-wise projection.
    """
    if init not in INIT_CHOICES:
        raise ValueError(f"init must be one of {INIT_CHOICES}, got {init!r}")
    f1 = lambda x: problem.initial(x)[0]  # noqa: E731
    f2 = lambda x: problem.initial(x)[1]  # noqa: E731
    if init == "radau":
        c1 = gauss_radau_project(f1, mesh, q, "+")
        c2 = gauss_radau_project(f2, mesh, q, "-")
    else:
        c1 = l2_project(f1, mesh, q)
        c2 = l2_project(f2, mesh, q)
    return DGState(np.stack([c1, c2]), mesh, q, 0.0)


def project_nodal(values: np.ndarray, q: int) -> np.ndarray:
    """L2 projection from values at the default Gauss nodes, shape (..., N, K) -> (..., N, q+1)."""
    quad = gauss_legendre(N_QUAD)
    return (values * quad.weights) @ eval_basis(q, quad.nodes)


def apply_bc_override(problem: ProblemSpec, bc: str | None) -> ProblemSpec:
    if bc is None or bc == problem.boundary_kind:
        return problem
    if bc not in (PERIODIC, DIRICHLET):
        raise ValueError(f"--bc must be {PERIODIC} or {DIRICHLET}, got {bc!r}")
    if bc == DIRICHLET and problem.exact_solution is not None:
        ex = problem.exact_solution
        a, b = problem.domain
        inflow = (lambda t: float(ex(np.array(b), t)[0]), lambda t: float(ex(np.array(a), t)[1]))
        return problem.with_boundary(bc, inflow)
    return problem.with_boundary(bc)


# --- output helpers -----------------------------------------------------------------


class SnapshotWriter:
    """Reconstructed fields at ``SNAPSHOT_POINTS`` equispaced interior points per element."""

    header = ["t", "x", "w1", "w2", "b1", "b2"]

    def __init__(self, points_per_element: int = SNAPSHOT_POINTS):
        k = points_per_element
        self.r = -1.0 + (2.0 * np.arange(k) + 1.0) / k
        self.rows: list[np.ndarray] = []

    def __call__(self, step: int, state: DGState):
        x = state.mesh.map_nodes(self.r).ravel()
        w = (state.coeffs @ eval_basis(state.q, self.r).T).reshape(2, -1)
        b1, b2 = characteristic_transform(w[0], w[1])
        self.rows.append(np.column_stack([np.full_like(x, state.t), x, w[0], w[1], b1, b2]))

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(self.header)
            for block in self.rows:
                for row in block:
                    wr.writerow([fmt_float(v) for v in row])
        return path


def write_manifest(out: Path, command: str, cfg: RunConfig, files: list[Path], extra: dict | None = None) -> Path:
    data = {
        "command": command,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()},
        "files": sorted(p.name for p in files),
    }
    if extra:
        data["results"] = extra
    path = out / "manifest.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- convergence -------------------------------------------------------------------


def run_case(problem: ProblemSpec, flux: FluxParams, q: int, n: int, t_final: float = 1.0,
             cfl: float = CONVERGENCE_CFL, init: str = "radau", norm: str = "l2") -> tuple[float, ...]:
    """One (q, N) entry of a convergence table."""
    if problem.exact_solution is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution to measure errors against")
    mesh = build_uniform_mesh(*problem.domain, n)
    state = project_initial(problem, mesh, q, init)
    plan = TimeStepPlan.cfl_scaled(mesh.h_max, t_final, cfl)
    final = evolve(state, plan, problem, flux)
    return l2_error(final, problem.exact_solution, t_final, norm=norm)


def run_convergence(cfg: RunConfig, write: bool = True) -> ConvergenceTable:
    problem = apply_bc_override(make_problem(cfg.problem), cfg.bc)
    flux = cfg.flux_params()
    if problem.exact_solution is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution; converge needs one")
    cfl = cfg.cfl if cfg.cfl is not None else CONVERGENCE_CFL
    table = ConvergenceTable(title=f"{problem.name} {flux.preset} flux, init={cfg.init}, norm={cfg.norm}")
    for q in cfg.q_list:
        for n in cfg.cells_list:
            table.add(q, n, run_case(problem, flux, q, n, cfg.t_final, cfl, cfg.init, cfg.norm))
    if write:
        out = _outdir(cfg)
        name = flux.preset if flux.preset != "custom" else "custom"
        path = table.to_csv(out / f"errors_{problem.name}_{name}.csv")
        write_manifest(out, "converge", cfg, [path])
    return table


# --- plain simulation --------------------------------------------------------------


@dataclass
class SimulationResult:
    initial: DGState
    final: DGState
    energy: EnergyLog
    snapshots: SnapshotWriter
    files: list[Path] = field(default_factory=list)


def _plan(cfg: RunConfig, h: float, default_dt: float | None = None) -> TimeStepPlan:
    if cfg.dt is not None:
        return TimeStepPlan.fixed(cfg.dt, cfg.t_final)
    if cfg.cfl is not None:
        return TimeStepPlan.cfl_scaled(h, cfg.t_final, cfg.cfl)
    if default_dt is not None:
        return TimeStepPlan.fixed(default_dt, cfg.t_final)
    return TimeStepPlan.cfl_scaled(h, cfg.t_final, CONVERGENCE_CFL)


def _run(cfg, problem, state, plan, flux, command, write=True, extra=None):
    energy = EnergyLog(cfg.box, cfg.box_speed)
    snaps = SnapshotWriter()
    every = cfg.snapshot_every if cfg.snapshot_every else (plan.final_time / 10.0 or 1.0)
    observers = [Observer(energy, every_steps=max(1, cfg.energy_every)), Observer(snaps, every_time=every)]
    final = evolve(state, plan, problem, flux, observers)
    res = SimulationResult(state, final, energy, snaps)
    if write:
        out = _outdir(cfg)
        res.files = [snaps.to_csv(out / "snapshots.csv"), energy.to_csv(out / "energy.csv")]
        res.files.append(write_manifest(out, command, cfg, list(res.files), extra(res) if extra else None))
    return res


def run_simulation(cfg: RunConfig, write: bool = True) -> SimulationResult:
    if cfg.problem == "kink":
        return run_kink(cfg, write=write)
    problem = apply_bc_override(make_problem(cfg.problem, domain=cfg.domain, seed=cfg.seed), cfg.bc)
    flux = cfg.flux_params()
    mesh = build_uniform_mesh(*problem.domain, cfg.n_elements)
    state = project_initial(problem, mesh, cfg.q, cfg.init)
    return _run(cfg, problem, state, _plan(cfg, mesh.h_max), flux, "simulate", write)


# --- kink --------------------------------------------------------------------------

#: desk-scale kink defaults; the ``long`` variant is the full-size experiment
KINK_DESK = dict(domain=(-40.0, 80.0), t_final=20.0, z0=20.0, box=(0.0, 40.0))
KINK_LONG = dict(domain=(-40.0, 200.0), t_final=100.0, z0=60.0, box=(60.0, 140.0))
KINK_H = 0.4


def kink_config(long: bool = False, **overrides) -> RunConfig:
    base = KINK_LONG if long else KINK_DESK
    cfg = RunConfig(problem="kink", flux="upwind", q=3, dt=KINK_DT, h=KINK_H, energy_every=100,
                    box_speed=0.4, speed=0.4, **base)
    return cfg.with_overrides(**overrides)


def parse_seed(text: str) -> tuple[float, float]:
    if text in ("reference", "default"):
        return REFERENCE_SEED
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"seed profile must be 'reference' or 'w1,w2', got {text!r}") from None
    return a, b


@dataclass
class KinkResult(SimulationResult):
    profile: KinkProfile | None = None
    transition_initial: float = math.nan
    transition_final: float = math.nan
    plateau: tuple[float, float] = (math.nan, math.nan)

    @property
    def displacement(self) -> float:
        return self.transition_final - self.transition_initial

    def box_energy_drift(self) -> float:
        """``max_t |E_box(t) - E_box(0)| / E_box(0)``."""
        e = self.energy.array()[:, 2]
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def kink_mesh(cfg: RunConfig) -> Mesh1D:
    a, b = cfg.domain
    if cfg.h is not None:
        n = round((b - a) / cfg.h)
        if not math.isclose(n * cfg.h, b - a, rel_tol=1e-9):
            raise ValueError(f"h = {cfg.h} does not divide the domain ({a}, {b})")
    else:
        n = cfg.n_elements
    return build_uniform_mesh(a, b, n)


def plateau_values(state: DGState, x_from: float, x_to: float) -> tuple[float, float]:
    """Mean of each component over ``[x_from, x_to]`` (the right-hand plateau)."""
    x = np.linspace(x_from, x_to, 401)
    w1, w2 = state.evaluate(x)
    return float(np.mean(w1)), float(np.mean(w2))


def run_kink(cfg: RunConfig, write: bool = True) -> KinkResult:
    c = cfg.speed
    if not abs(c) < 1:
        raise ValueError(f"kink speed must satisfy |c| < 1, got {c}")
    if cfg.domain is None:
        cfg = replace(cfg, domain=KINK_DESK["domain"])
    mesh = kink_mesh(cfg)
    quad = gauss_legendre(N_QUAD)
    xq = mesh.map_nodes(quad.nodes)
    z0 = cfg.z0 if cfg.z0 is not None else 0.5 * (mesh.x_a + mesh.x_b)
    profile = generate_kink(c, xq.ravel(), parse_seed(cfg.seed_profile), z0=z0)
    coeffs = np.stack([project_nodal(profile.w1.reshape(xq.shape), cfg.q),
                       project_nodal(profile.w2.reshape(xq.shape), cfg.q)])
    state = DGState(coeffs, mesh, cfg.q, 0.0)
    g1 = profile.asymptotic_right[0]
    g2 = profile.asymptotic_left[1]
    problem = make_problem("kink", c=c, domain=tuple(cfg.domain)).with_boundary(
        DIRICHLET, (lambda t, v=g1: v, lambda t, v=g2: v)
    )
    problem = apply_bc_override(problem, cfg.bc)
    flux = cfg.flux_params()
    plan = _plan(cfg, mesh.h_max, default_dt=KINK_DT)
    if cfg.box is None:
        cfg = replace(cfg, box=(mesh.x_a + 0.25 * (mesh.x_b - mesh.x_a), mesh.x_a + 0.6 * (mesh.x_b - mesh.x_a)))
    cfg = replace(cfg, box_speed=c)

    def summary(res):
        return {
            "transition_initial": res.transition_initial,
            "transition_final": res.transition_final,
            "displacement": res.displacement,
            "plateau_w1": res.plateau[0],
            "plateau_w2": res.plateau[1],
            "box_energy_drift": res.box_energy_drift(),
            "profile_q_drift": profile.q_drift,
        }

    base = _run(cfg, problem, state, plan, flux, "kink", write=False)
    res = KinkResult(**{f.name: getattr(base, f.name) for f in fields(SimulationResult)}, profile=profile)
    res.transition_initial = transition_point(res.initial)
    res.transition_final = transition_point(res.final)
    right = max(res.transition_final + 15.0, mesh.x_b - 15.0)
    res.plateau = plateau_values(res.final, min(right, mesh.x_b - 1.0), mesh.x_b - 1.0)
    if write:
        out = _outdir(cfg)
        res.files = [
            res.snapshots.to_csv(out / "snapshots.csv"),
            res.energy.to_csv(out / "energy.csv"),
            profile.to_csv(out / "profile.csv"),
        ]
        res.files.append(write_manifest(out, "kink", cfg, list(res.files), summary(res)))
    return res


# --- energy identity audit ----------------------------------------------------------


@dataclass
class AuditRow:
    flux: str
    boundary: str
    n_states: int
    max_rel_diff: float


def random_state(rng: np.random.Generator, mesh: Mesh1D, q: int, scale: float = 1.0) -> DGState:
    return DGState(scale * rng.normal(size=(2, mesh.n_elements, q + 1)), mesh, q, 0.0)


def energy_identity_gap(state: DGState, problem: ProblemSpec, flux: FluxParams) -> float:
    """Mismatch between ``<w, dw/dt>`` and the closed-form jump expression.

    Scaled by ``||w|| ||dw/dt||``, the Cauchy-Schwarz bound on the inner
    product, so that conservative fluxes (rate near zero) are judged fairly.
    """
    op = DGOperator(state.mesh, state.q, problem, flux)
    rate = op.rate(state)
    lhs = l2_inner(state, rate)
    rhs = energy_rate_formula(state, flux, problem)
    norm_w = math.sqrt(2.0 * discrete_energy(state))
    norm_r = math.sqrt(max(l2_inner(DGState(rate, state.mesh, state.q), rate), 0.0))
    scale = max(norm_w * norm_r, abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def run_energy_audit(cfg: RunConfig, n_states: int = 100, write: bool = True) -> list[AuditRow]:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    presets = [cfg.flux] if cfg.flux.startswith("custom:") else list(FLUX_PRESETS)
    for name in presets:
        flux = FluxParams.parse(name, allow_unstable=cfg.allow_unstable)
        for kind in (PERIODIC, DIRICHLET):
            problem = make_problem("random").with_boundary(
                kind, (lambda t: 0.3, lambda t: -0.7) if kind == DIRICHLET else None
            )
            mesh = build_uniform_mesh(*problem.domain, cfg.n_elements)
            worst = max(
                energy_identity_gap(random_state(rng, mesh, cfg.q), problem, flux) for _ in range(n_states)
            )
            rows.append(AuditRow(name, kind, n_states, worst))
    if write:
        out = _outdir(cfg)
        path = out / "energy_audit.csv"
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["flux", "boundary", "n_states", "max_rel_diff"])
            for r in rows:
                wr.writerow([r.flux, r.boundary, str(r.n_states), fmt_float(r.max_rel_diff)])
        write_manifest(out, "energy-audit", cfg, [path])
    return rows


__all__ = [
    "RunConfig", "run_convergence", "run_case", "run_simulation", "run_kink", "run_energy_audit",
    "kink_config", "project_initial", "project_nodal", "load_config_file", "KinkResult",
    "SimulationResult", "energy_identity_gap", "random_state", "moving_box_energy",
]
