"""Compiled interface/stiffness assembly.

Optional: :mod:`dimerdg.operator` falls back to numpy when numba is missing.
Volume terms stay in numpy, whose SIMD ``exp`` beats a scalar loop here.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _flux(w1m, w1p, w2m, w2p, a1, a2, b1, b2):
    j1 = w1m - w1p
    j2 = w2m - w2p
    f1 = 0.5 * (w1m + w1p) - 0.5 * (1.0 - a1) * j1 + 0.5 * b1 * j2
    f2 = 0.5 * (w2m + w2p) + 0.5 * (1.0 - a2) * j2 + 0.5 * b2 * j1
    return f1, f2


@njit(cache=True)
def surface_kernel(c, stiff, left, right, inv_jac, a1, a2, b1, b2, periodic, g1, g2, out):
    """Stiffness and interface terms, scaled by the inverse mass matrix."""
    n_el = c.shape[1]
    nm = c.shape[2]
    tl = np.zeros((2, n_el))
    tr = np.zeros((2, n_el))
    for v in range(2):
        for j in range(n_el):
            sl = 0.0
            sr = 0.0
            for n in range(nm):
                sl += c[v, j, n] * left[n]
                sr += c[v, j, n] * right[n]
            tl[v, j] = sl
            tr[v, j] = sr

    # F*[j] is the flux at the right face of element j
    F1 = np.empty(n_el)
    F2 = np.empty(n_el)
    for j in range(n_el - 1):
        F1[j], F2[j] = _flux(tr[0, j], tl[0, j + 1], tr[1, j], tl[1, j + 1], a1, a2, b1, b2)
    if periodic:
        F1[n_el - 1], F2[n_el - 1] = _flux(tr[0, n_el - 1], tl[0, 0], tr[1, n_el - 1], tl[1, 0], a1, a2, b1, b2)

    for j in range(n_el):
        if j > 0 or periodic:
            f1l = F1[(j - 1) % n_el]
            f2l = F2[(j - 1) % n_el]
        else:
            f1l = tl[0, 0]
            f2l = g2
        if j < n_el - 1 or periodic:
            f1r = F1[j]
            f2r = F2[j]
        else:
            f1r = g1
            f2r = tr[1, n_el - 1]
        for m in range(nm):
            s1 = 0.0
            s2 = 0.0
            for n in range(nm):
                s1 += c[0, j, n] * stiff[n, m]
                s2 += c[1, j, n] * stiff[n, m]
            out[0, j, m] = inv_jac[j] * (-s1 + f1r * right[m] - f1l * left[m])
            out[1, j, m] = inv_jac[j] * (s2 + f2l * left[m] - f2r * right[m])
    return out
