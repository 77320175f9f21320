"""One-dimensional element partitions and the affine map to the reference element."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    """Partition of ``[x_a, x_b]`` into ``N`` elements.

    Element ``j`` spans ``[vertices[j], vertices[j + 1]]``. Interfaces are
    shared; traces are always labelled minus/plus by the caller.
    """

    vertices: np.ndarray
    widths: np.ndarray = field(init=False, repr=False)
    centers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a mesh needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("mesh vertices must be finite")
        widths = np.diff(v)
        if np.any(widths <= 0.0):
            raise ValueError("mesh vertices must be strictly increasing")
        v.setflags(write=False)
        widths.setflags(write=False)
        centers = 0.5 * (v[:-1] + v[1:])
        centers.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "centers", centers)

    @property
    def x_a(self) -> float:
        return float(self.vertices[0])

    @property
    def x_b(self) -> float:
        return float(self.vertices[-1])

    @property
    def n_elements(self) -> int:
        return self.widths.size

    @property
    def h_max(self) -> float:
        return float(self.widths.max())

    @property
    def regularity_bound(self) -> float:
        """Ratio of the largest to the smallest element width."""
        return float(self.widths.max() / self.widths.min())

    def to_reference(self, j: int, x):
        """Map physical ``x`` inside element ``j`` to ``r`` in [-1, 1]."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.vertices[j], self.vertices[j + 1]
        slack = 1e-12 * max(abs(lo), abs(hi), self.widths[j])
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise ValueError(f"x lies outside element {j} = [{lo}, {hi}]")
        r = 2.0 / self.widths[j] * (x - self.centers[j])
        return np.clip(r, -1.0, 1.0)

    def from_reference(self, j: int, r):
        r = np.asarray(r, dtype=float)
        return self.centers[j] + 0.5 * self.widths[j] * r

    def locate(self, x) -> np.ndarray:
        """Index of the element containing each ``x`` (right end goes to the last element)."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x_a) or np.any(x > self.x_b):
            raise ValueError("point outside the mesh")
        idx = np.searchsorted(self.vertices, x, side="right") - 1
        return np.clip(idx, 0, self.n_elements - 1)

    def map_nodes(self, r: np.ndarray) -> np.ndarray:
        """Physical coordinates of reference nodes ``r`` in every element, shape (N, len(r))."""
        return self.centers[:, None] + 0.5 * self.widths[:, None] * np.asarray(r)[None, :]


def build_uniform_mesh(x_a: float, x_b: float, n_elements: int) -> Mesh1D:
    if not (np.isfinite(x_a) and np.isfinite(x_b)) or x_b <= x_a:
        raise ValueError(f"invalid interval ({x_a}, {x_b}): need x_b > x_a")
    if int(n_elements) != n_elements or n_elements < 1:
        raise ValueError(f"need at least one element, got {n_elements}")
    n = int(n_elements)
    h = (x_b - x_a) / n
    vertices = x_a + h * np.arange(n + 1)
    vertices[-1] = x_b
    return Mesh1D(vertices)
