"""Semi-discrete DG right-hand side with the four-parameter interface flux."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import ModalBasis, eval_basis, modal_basis
from .mesh import Mesh1D
from .model import DIRICHLET, PERIODIC, ProblemSpec

try:
    from . import _kernels
except ImportError:  # numba not installed
    _kernels = None


class UnstableFluxError(ValueError):
    pass


@dataclass(frozen=True)
class FluxParams:
    """Interface flux ``w1^ = {w1} - (1-a1)/2 [w1] + b1/2 [w2]``,
    ``w2~ = {w2} + (1-a2)/2 [w2] + b2/2 [w1]``.

    ``{v}`` is the arithmetic mean and ``[v] = v^- - v^+``.
    """

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    preset: str = "custom"
    allow_unstable: bool = False

    def __post_init__(self):
        if not self.allow_unstable:
            if not (0.0 <= self.alpha1 <= 1.0 and 0.0 <= self.alpha2 <= 1.0):
                raise UnstableFluxError(f"alpha1, alpha2 must lie in [0, 1]; got {self.alpha1}, {self.alpha2}")
            if self.stability_margin > 1e-14:
                raise UnstableFluxError(
                    f"flux parameters violate the energy condition (margin {self.stability_margin:.3g} > 0)"
                )

    @property
    def stability_margin(self) -> float:
        """``-(1 - max(a1, a2)) + |b1 - b2| / 2``; the flux is energy stable when <= 0."""
        return -(1.0 - max(self.alpha1, self.alpha2)) + abs(self.beta1 - self.beta2) / 2.0

    @property
    def is_stable(self) -> bool:
        return (
            0.0 <= self.alpha1 <= 1.0
            and 0.0 <= self.alpha2 <= 1.0
            and self.stability_margin <= 1e-14
        )

    @classmethod
    def from_preset(cls, name: str) -> FluxParams:
        try:
            a1, a2, b1, b2 = FLUX_PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown flux preset {name!r}; expected one of {sorted(FLUX_PRESETS)}") from None
        return cls(a1, a2, b1, b2, preset=name)

    @classmethod
    def parse(cls, text: str, allow_unstable: bool = False) -> FluxParams:
        """Preset name or ``custom:a1,a2,b1,b2``."""
        if text.startswith("custom:"):
            try:
                vals = [float(v) for v in text[len("custom:"):].split(",")]
            except ValueError:
                raise ValueError(f"bad custom flux {text!r}") from None
            if len(vals) != 4:
                raise ValueError(f"custom flux needs four numbers, got {text!r}")
            return cls(*vals, preset="custom", allow_unstable=allow_unstable)
        return cls.from_preset(text)


FLUX_PRESETS = {
    "upwind": (0.0, 0.0, 0.0, 0.0),
    "central": (1.0, 1.0, 0.0, 0.0),
    "mixed-upwind": (0.0, 0.0, 1.0, 1.0),
    "mixed-central": (1.0, 1.0, 1.0, 1.0),
}


def interface_flux(w1_minus, w1_plus, w2_minus, w2_plus, p: FluxParams):
    avg1 = 0.5 * (w1_minus + w1_plus)
    avg2 = 0.5 * (w2_minus + w2_plus)
    j1 = w1_minus - w1_plus
    j2 = w2_minus - w2_plus
    w1_hat = avg1 - 0.5 * (1.0 - p.alpha1) * j1 + 0.5 * p.beta1 * j2
    w2_tilde = avg2 + 0.5 * (1.0 - p.alpha2) * j2 + 0.5 * p.beta2 * j1
    return w1_hat, w2_tilde


@dataclass
class DGState:
    """Modal coefficients ``coeffs[var, element, mode]`` for ``(w1, w2)``."""

    coeffs: np.ndarray
    mesh: Mesh1D
    q: int
    t: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        expected = (2, self.mesh.n_elements, self.q + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match {expected}")

    def copy(self) -> DGState:
        return DGState(self.coeffs.copy(), self.mesh, self.q, self.t)

    def check_finite(self):
        bad = ~np.isfinite(self.coeffs)
        if bad.any():
            var, elem, _ = np.argwhere(bad)[0]
            raise FloatingPointError(f"non-finite coefficient in w{var + 1}, element {elem}, t={self.t:.6g}")

    def traces(self):
        """Left and right traces of every element, each shape (2, N)."""
        basis = modal_basis(self.q)
        return self.coeffs @ basis.left, self.coeffs @ basis.right

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Reconstruct ``(w1, w2)`` at physical points; interfaces take the element on the right."""
        x = np.asarray(x, dtype=float)
        j = self.mesh.locate(x)
        r = np.clip(2.0 / self.mesh.widths[j] * (x - self.mesh.centers[j]), -1.0, 1.0)
        phi = eval_basis(self.q, r)
        vals = np.sum(self.coeffs[:, j, :] * phi, axis=-1)
        return vals[0], vals[1]


def zero_state(mesh: Mesh1D, q: int, t: float = 0.0) -> DGState:
    return DGState(np.zeros((2, mesh.n_elements, q + 1)), mesh, q, t)


@dataclass
class DGOperator:
    """Precomputed tables for one (mesh, degree, problem, flux) combination.

    Calling the operator with raw coefficients returns the time derivative of
    the coefficients, i.e. the inverse mass matrix is already applied.
    """

    mesh: Mesh1D
    q: int
    problem: ProblemSpec
    flux: FluxParams
    #: "auto" uses the compiled kernel when available, "numpy" forces the vectorized path
    backend: str = "auto"
    basis: ModalBasis = field(init=False)

    def __post_init__(self):
        if (self.mesh.x_a, self.mesh.x_b) != tuple(map(float, self.problem.domain)):
            if not np.allclose((self.mesh.x_a, self.mesh.x_b), self.problem.domain, rtol=0, atol=1e-12):
                raise ValueError("mesh does not cover the problem domain")
        self.basis = modal_basis(self.q)
        b = self.basis
        h = self.mesh.widths
        self.inv_jac = (2.0 / h)[:, None]  # inverse mass factor per element
        self.x_nodes = self.mesh.map_nodes(b.quad.nodes)  # (N, K)
        # int over element of g * phi_n  ~  (h/2) sum_k w_k g_k phi_n(r_k); times 2/h cancels
        self.proj = b.values * b.quad.weights[:, None]  # (K, q+1)
        self.vals_T = np.ascontiguousarray(b.values.T)  # (q+1, K)
        self.stiff = b.stiffness
        self.left = b.left
        self.right = b.right
        self.periodic = self.problem.boundary_kind == PERIODIC
        if self.backend not in ("auto", "numpy", "compiled"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "compiled" and _kernels is None:
            raise RuntimeError("the compiled backend needs numba")
        self.compiled = self.backend != "numpy" and _kernels is not None
        self._inv_jac_flat = np.ascontiguousarray(self.inv_jac[:, 0])

    def check_state(self, state: DGState):
        if state.mesh is not self.mesh and not np.array_equal(state.mesh.vertices, self.mesh.vertices):
            raise ValueError("state lives on a different mesh")
        if state.q != self.q:
            raise ValueError(f"state degree {state.q} does not match operator degree {self.q}")

    def face_fluxes(self, c: np.ndarray, t: float):
        """``(F1_left, F1_right, F2_left, F2_right)`` per element."""
        tl = c @ self.left  # (2, N)
        tr = c @ self.right
        if self.periodic:
            minus = tr
            plus = np.roll(tl, -1, axis=1)
            f1, f2 = interface_flux(minus[0], plus[0], minus[1], plus[1], self.flux)
            return np.roll(f1, 1), f1, np.roll(f2, 1), f2
        f1i, f2i = interface_flux(tr[0, :-1], tl[0, 1:], tr[1, :-1], tl[1, 1:], self.flux)
        g1, g2 = self.problem.inflow
        n = c.shape[1]
        F1L = np.empty(n)
        F1R = np.empty(n)
        F2L = np.empty(n)
        F2R = np.empty(n)
        F1L[1:] = f1i
        F1R[:-1] = f1i
        F2L[1:] = f2i
        F2R[:-1] = f2i
        F1L[0] = tl[0, 0]  # outflow for w1 at x_a
        F1R[-1] = g1(t)
        F2L[0] = g2(t)
        F2R[-1] = tr[1, -1]  # outflow for w2 at x_b
        return F1L, F1R, F2L, F2R

    def _surface(self, c: np.ndarray, t: float) -> np.ndarray:
        if self.compiled:
            if self.periodic:
                g1 = g2 = 0.0
            else:
                g1, g2 = (float(g(t)) for g in self.problem.inflow)
            p = self.flux
            return _kernels.surface_kernel(
                np.ascontiguousarray(c), self.stiff, self.left, self.right, self._inv_jac_flat,
                float(p.alpha1), float(p.alpha2), float(p.beta1), float(p.beta2),
                self.periodic, g1, g2, np.empty(c.shape),
            )
        F1L, F1R, F2L, F2R = self.face_fluxes(c, t)
        rate = np.empty_like(c)
        # w1: -(w1, phi') + flux terms, w2: +(w2, phi') + flux terms
        rate[0] = -(c[0] @ self.stiff) + np.outer(F1R, self.right) - np.outer(F1L, self.left)
        rate[1] = c[1] @ self.stiff + np.outer(F2L, self.left) - np.outer(F2R, self.right)
        rate *= self.inv_jac
        return rate

    def __call__(self, c: np.ndarray, t: float) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        w = c @ self.vals_T  # (2, N, K) values at quadrature nodes
        N = self.problem.nonlinearity(w[0], w[1])
        src = np.empty_like(w)
        np.multiply(N, w[1], out=src[0])
        np.negative(src[0], out=src[0])
        np.multiply(N, w[0], out=src[1])
        if self.problem.has_forcing:
            f1, f2 = self.problem.forcing(self.x_nodes, t)
            src[0] += f1
            src[1] += f2
        rate = self._surface(c, t)
        rate += src @ self.proj
        return rate

    def rate(self, state: DGState, t: float | None = None) -> np.ndarray:
        self.check_state(state)
        return self(state.coeffs, state.t if t is None else t)


def assemble_rhs(state: DGState, t: float, problem: ProblemSpec, p: FluxParams) -> np.ndarray:
    """Time derivative of the modal coefficients of ``state``."""
    op = DGOperator(state.mesh, state.q, problem, p)
    return op.rate(state, t)


def l2_inner(state: DGState, rate: np.ndarray) -> float:
    """``sum_j int (w1 r1 + w2 r2) dx`` for fields in the same modal space."""
    return float(np.sum(0.5 * state.mesh.widths[None, :, None] * state.coeffs * rate))


def energy_rate_formula(state: DGState, p: FluxParams, problem: ProblemSpec, t: float | None = None) -> float:
    """Closed-form ``dE^h/dt`` from interface jumps and boundary traces.

    With nonzero inflow data the boundary terms pick up ``g2 w2^+(x_a) + g1 w1^-(x_b)``;
    a forcing contribution is added when the problem carries one.
    """
    t = state.t if t is None else t
    tl, tr = state.traces()
    if problem.boundary_kind == PERIODIC:
        j1 = tr[0] - np.roll(tl[0], -1)
        j2 = tr[1] - np.roll(tl[1], -1)
    else:
        j1 = tr[0, :-1] - tl[0, 1:]
        j2 = tr[1, :-1] - tl[1, 1:]
    interior = -(1.0 - p.alpha1) * j1**2 - (1.0 - p.alpha2) * j2**2 + (p.beta1 - p.beta2) * j1 * j2
    rate = 0.5 * float(np.sum(interior))
    if problem.boundary_kind == DIRICHLET:
        g1, g2 = (float(g(t)) for g in problem.inflow)
        w1a, w2a = tl[0, 0], tl[1, 0]
        w1b, w2b = tr[0, -1], tr[1, -1]
        rate += -0.5 * (w1a**2 + w2a**2 + w1b**2 + w2b**2) + g2 * w2a + g1 * w1b
    if problem.has_forcing:
        op = DGOperator(state.mesh, state.q, problem, p)
        w = state.coeffs @ op.vals_T
        f1, f2 = problem.forcing(op.x_nodes, t)
        wq = op.basis.quad.weights
        rate += float(np.sum(0.5 * state.mesh.widths[:, None] * wq * (w[0] * f1 + w[1] * f2)))
    return rate
