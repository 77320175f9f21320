"""Energies, error norms and convergence tables."""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .basis import N_QUAD, eval_basis, gauss_legendre, l2_project
from .model import characteristic_transform
from .operator import DGState

#: error norms understood by :func:`l2_error`
ERROR_NORMS = ("l2", "energy")


def fmt_float(v: float) -> str:
    """CSV float format: scientific, 10 significant digits."""
    return f"{v:.9e}"


def discrete_energy(state: DGState) -> float:
    """``E^h = 1/2 sum_j int (w1^2 + w2^2)``; exact for the orthonormal modal basis."""
    h = state.mesh.widths
    return float(0.5 * np.sum(0.5 * h[None, :, None] * state.coeffs**2))


def moving_box_energy(state: DGState, a: float, b: float, n_quad: int = N_QUAD) -> float:
    """``1/2 int_a^b (w1^2 + w2^2) dx``, with cut elements integrated on the overlap only."""
    if not b > a:
        raise ValueError(f"degenerate box [{a}, {b}]")
    mesh = state.mesh
    lo = np.maximum(mesh.vertices[:-1], a)
    hi = np.minimum(mesh.vertices[1:], b)
    js = np.nonzero(hi > lo)[0]
    if js.size == 0:
        return 0.0
    quad = gauss_legendre(n_quad)
    half = 0.5 * (hi[js] - lo[js])
    x = 0.5 * (hi[js] + lo[js])[:, None] + half[:, None] * quad.nodes[None, :]
    r = np.clip(2.0 / mesh.widths[js, None] * (x - mesh.centers[js, None]), -1.0, 1.0)
    phi = eval_basis(state.q, r)  # (J, K, q+1)
    w = np.einsum("vjn,jkn->vjk", state.coeffs[:, js, :], phi)
    return float(0.5 * np.sum(half[:, None] * quad.weights[None, :] * (w[0] ** 2 + w[1] ** 2)))


def l2_error(state: DGState, exact: Callable, t: float | None = None, norm: str = "l2") -> tuple[float, ...]:
    """Errors ``(e_w1, e_w2, e_b1, e_b2)`` against ``exact(x, t) -> (w1, w2)``.

    ``norm="l2"`` is ``sqrt(sum_j int (u_h - u)^2)`` by 17-node quadrature.
    ``norm="energy"`` measures ``Pi u - u_h`` (``Pi`` the element L2 projection)
    in the discrete energy norm ``sqrt(1/2 int e^2)``; this is the convention
    that reproduces the published convergence tables.
    """
    if norm not in ERROR_NORMS:
        raise ValueError(f"norm must be one of {ERROR_NORMS}, got {norm!r}")
    t = state.t if t is None else t
    mesh = state.mesh
    if norm == "energy":
        P = np.stack([l2_project(lambda x, i=i: exact(x, t)[i], mesh, state.q) for i in (0, 1)])
        d = state.coeffs - P
        db = np.stack(characteristic_transform(d[0], d[1]))
        scale = 0.25 * mesh.widths[None, :, None]
        ew = np.sqrt(np.sum(scale * d**2, axis=(1, 2)))
        eb = np.sqrt(np.sum(scale * db**2, axis=(1, 2)))
        return float(ew[0]), float(ew[1]), float(eb[0]), float(eb[1])
    quad = gauss_legendre(N_QUAD)
    x = mesh.map_nodes(quad.nodes)
    wh = state.coeffs @ eval_basis(state.q, quad.nodes).T  # (2, N, K)
    u1, u2 = exact(x, t)
    e1 = wh[0] - u1
    e2 = wh[1] - u2
    eb1, eb2 = characteristic_transform(e1, e2)
    wts = 0.5 * mesh.widths[:, None] * quad.weights[None, :]
    return tuple(float(np.sqrt(np.sum(wts * e * e))) for e in (e1, e2, eb1, eb2))


def convergence_order(errors: Sequence[float], meshes: Sequence[int]) -> list[float | None]:
    """``log(e_{i-1}/e_i) / log(n_i/n_{i-1})``; ``None`` where undefined."""
    if len(errors) != len(meshes):
        raise ValueError("errors and meshes must have the same length")
    out: list[float | None] = [None]
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        n0, n1 = meshes[i - 1], meshes[i]
        if not (e0 > 0 and e1 > 0) or n1 == n0 or not (math.isfinite(e0) and math.isfinite(e1)):
            out.append(None)
        else:
            out.append(math.log(e0 / e1) / math.log(n1 / n0))
    return out[: len(errors)]


def fmt_order(o: float | None) -> str:
    return "--" if o is None else f"{o:.4f}"


@dataclass
class ConvergenceRow:
    q: int
    n_elements: int
    errors: tuple[float, float, float, float]
    orders: tuple[float | None, ...] = (None, None, None, None)


TABLE_HEADER = [
    "q", "n_elements",
    "error_w1", "order_w1", "error_w2", "order_w2",
    "error_b1", "order_b1", "error_b2", "order_b2",
]


@dataclass
class ConvergenceTable:
    """Rows grouped by degree; orders are recomputed whenever a row is added."""

    rows: list[ConvergenceRow] = field(default_factory=list)
    title: str = ""

    def add(self, q: int, n_elements: int, errors: Sequence[float]):
        self.rows.append(ConvergenceRow(int(q), int(n_elements), tuple(float(e) for e in errors)))
        self._reorder()

    def _reorder(self):
        for q in self.degrees():
            rows = [r for r in self.rows if r.q == q]
            meshes = [r.n_elements for r in rows]
            cols = [convergence_order([r.errors[k] for r in rows], meshes) for k in range(4)]
            for i, r in enumerate(rows):
                r.orders = tuple(col[i] for col in cols)

    def degrees(self) -> list[int]:
        return sorted({r.q for r in self.rows})

    def column(self, q: int, var: str = "w1", what: str = "error") -> list:
        k = ["w1", "w2", "b1", "b2"].index(var)
        rows = [r for r in self.rows if r.q == q]
        return [r.errors[k] if what == "error" else r.orders[k] for r in rows]

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(TABLE_HEADER)
            for r in self.rows:
                cells = [str(r.q), str(r.n_elements)]
                for e, o in zip(r.errors, r.orders):
                    cells += [fmt_float(e), fmt_order(o)]
                wr.writerow(cells)
        return path

    def format(self) -> str:
        lines = [self.title] if self.title else []
        lines.append(
            f"{'q':>2} {'N':>5}  "
            + "  ".join(f"{'err_' + v:>11} {'ord':>7}" for v in ("w1", "w2", "b1", "b2"))
        )
        for r in self.rows:
            cells = "  ".join(f"{e:11.4e} {fmt_order(o):>7}" for e, o in zip(r.errors, r.orders))
            lines.append(f"{r.q:>2} {r.n_elements:>5}  {cells}")
        return "\n".join(lines)


class EnergyLog:
    """Collects ``(step, t, E_h, box_E_h)`` records; the box may move at constant speed."""

    header = ["step", "t", "E_h", "box_E_h"]

    def __init__(self, box: tuple[float, float] | None = None, box_speed: float = 0.0):
        self.box = box
        self.box_speed = box_speed
        self.records: list[tuple[int, float, float, float]] = []

    def box_at(self, t: float) -> tuple[float, float] | None:
        if self.box is None:
            return None
        return self.box[0] + self.box_speed * t, self.box[1] + self.box_speed * t

    def __call__(self, step: int, state: DGState):
        box = self.box_at(state.t)
        e_box = moving_box_energy(state, *box) if box is not None else float("nan")
        self.records.append((int(step), float(state.t), discrete_energy(state), e_box))

    def array(self) -> np.ndarray:
        return np.array([r[1:] for r in self.records], dtype=float).reshape(-1, 3)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(self.header)
            for step, t, e, eb in self.records:
                wr.writerow([str(step), fmt_float(t), fmt_float(e), fmt_float(eb)])
        return path


def transition_point(state: DGState, level: float = 0.5, samples_per_element: int = 16) -> float:
    """First ``x`` (from the left) where ``|w_h|`` crosses ``level``, refined by root finding."""
    mesh = state.mesh
    r = np.linspace(-1.0, 1.0, samples_per_element)
    x = mesh.map_nodes(r).ravel()
    w = (state.coeffs @ eval_basis(state.q, r).T).reshape(2, -1)
    g = np.hypot(w[0], w[1]) - level
    idx = np.nonzero((g[:-1] < 0) & (g[1:] >= 0))[0]
    if idx.size == 0:
        raise ValueError(f"|w_h| never crosses {level}")
    i = idx[0]
    if x[i + 1] == x[i]:
        return float(x[i])

    def f(xx):
        w1, w2 = state.evaluate(np.array([xx]))
        return float(np.hypot(w1[0], w2[0])) - level

    lo, hi = x[i], x[i + 1]
    if f(lo) * f(hi) > 0:  # crossing sits on an element interface jump
        return float(hi)
    return float(brentq(f, lo, hi, xtol=1e-13))
