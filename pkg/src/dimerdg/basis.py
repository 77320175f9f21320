"""Orthonormal Legendre basis, Gauss-Legendre rules and element-wise projections."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mesh import Mesh1D

#: Nodes per element for nonlinear and forcing integrals.
N_QUAD = 17


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights transported to ``[a, b]``."""
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * self.nodes, half * self.weights


@lru_cache(maxsize=None)
def gauss_legendre(n_nodes: int) -> QuadratureRule:
    if int(n_nodes) != n_nodes or n_nodes < 1:
        raise ValueError(f"need at least one node, got {n_nodes}")
    x, w = np.polynomial.legendre.leggauss(int(n_nodes))
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


def eval_basis(q: int, r) -> np.ndarray:
    """Normalized Legendre polynomials ``phi_0 .. phi_q`` at ``r``.

    Returns shape ``r.shape + (q + 1,)``; ``phi_n = sqrt((2n+1)/2) P_n``.
    """
    r = np.asarray(r, dtype=float)
    P = np.empty(r.shape + (q + 1,))
    P[..., 0] = 1.0
    if q >= 1:
        P[..., 1] = r
    for n in range(1, q):
        P[..., n + 1] = ((2 * n + 1) * r * P[..., n] - n * P[..., n - 1]) / (n + 1)
    return P * np.sqrt((2 * np.arange(q + 1) + 1) / 2.0)


def eval_basis_derivative(q: int, r) -> np.ndarray:
    """``d phi_n / dr`` via ``P'_{n+1} = P'_{n-1} + (2n+1) P_n``."""
    r = np.asarray(r, dtype=float)
    P = eval_basis(q, r) / np.sqrt((2 * np.arange(q + 1) + 1) / 2.0)
    dP = np.zeros_like(P)
    for n in range(1, q + 1):
        dP[..., n] = (2 * n - 1) * P[..., n - 1]
        if n >= 2:
            dP[..., n] += dP[..., n - 2]
    return dP * np.sqrt((2 * np.arange(q + 1) + 1) / 2.0)


@dataclass(frozen=True)
class ModalBasis:
    """Tables of the degree-``q`` orthonormal basis on the reference element."""

    q: int
    quad: QuadratureRule = field(default_factory=lambda: gauss_legendre(N_QUAD))
    values: np.ndarray = field(init=False, repr=False)  # (n_quad, q+1)
    derivs: np.ndarray = field(init=False, repr=False)  # (n_quad, q+1)
    left: np.ndarray = field(init=False, repr=False)  # phi_n(-1)
    right: np.ndarray = field(init=False, repr=False)  # phi_n(+1)
    stiffness: np.ndarray = field(init=False, repr=False)  # S[m, n] = int phi_m phi_n'

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("degree must be non-negative")
        if 2 * self.quad.n_nodes - 1 < 2 * self.q:
            raise ValueError("quadrature too coarse for the basis degree")
        V = eval_basis(self.q, self.quad.nodes)
        D = eval_basis_derivative(self.q, self.quad.nodes)
        S = (V * self.quad.weights[:, None]).T @ D
        # exact zeros: phi_n' has degree n-1, so S[m, n] = 0 unless m < n with m + n odd
        m, n = np.indices(S.shape)
        S[(m >= n) | ((m + n) % 2 == 0)] = 0.0
        for name, val in [
            ("values", V),
            ("derivs", D),
            ("left", eval_basis(self.q, -1.0)),
            ("right", eval_basis(self.q, 1.0)),
            ("stiffness", S),
        ]:
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n_modes(self) -> int:
        return self.q + 1

    def reconstruct(self, coeffs: np.ndarray, r) -> np.ndarray:
        """Evaluate ``sum_n coeffs[..., n] phi_n(r)``."""
        return coeffs @ eval_basis(self.q, r).T


def _check_side(side: str) -> str:
    if side in ("+", "plus"):
        return "+"
    if side in ("-", "minus"):
        return "-"
    raise ValueError(f"side must be '+' or '-', got {side!r}")


def l2_project(f, mesh: Mesh1D, q: int, quad: QuadratureRule | None = None) -> np.ndarray:
    """Element-wise L2 projection of a vectorized ``f(x)``; coefficients of shape (N, q+1)."""
    quad = quad or gauss_legendre(N_QUAD)
    V = eval_basis(q, quad.nodes)
    fx = np.asarray(f(mesh.map_nodes(quad.nodes)), dtype=float)
    # orthonormal on (-1, 1): c_n = int_{-1}^{1} f phi_n dr
    return (fx * quad.weights) @ V


def gauss_radau_project(f, mesh: Mesh1D, q: int, side: str, quad: QuadratureRule | None = None) -> np.ndarray:
    """Gauss-Radau projection ``P^+`` (matches f at left ends) or ``P^-`` (right ends).

    Moments against degree ``< q`` are those of ``f``; the last mode fixes the
    endpoint value.
    """
    side = _check_side(side)
    quad = quad or gauss_legendre(N_QUAD)
    moments = l2_project(f, mesh, q, quad)
    ends = mesh.vertices[:-1] if side == "+" else mesh.vertices[1:]
    rhs = moments.copy()
    rhs[:, q] = np.asarray(f(ends), dtype=float)
    A = gauss_radau_system(q, side)
    # |phi_q(+-1)| = sqrt((2q+1)/2), so A is never singular
    assert abs(A[q, q]) > 0.5
    return np.linalg.solve(A, rhs.T).T


def gauss_radau_system(q: int, side: str) -> np.ndarray:
    """Reference (q+1)x(q+1) matrix of the moment + endpoint conditions."""
    side = _check_side(side)
    A = np.zeros((q + 1, q + 1))
    A[:q, :q] = np.eye(q)
    A[q] = eval_basis(q, -1.0 if side == "+" else 1.0)
    return A


@lru_cache(maxsize=None)
def modal_basis(q: int) -> ModalBasis:
    """Shared default-quadrature basis tables for degree ``q``."""
    return ModalBasis(q)
