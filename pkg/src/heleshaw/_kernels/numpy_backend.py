"""Vectorized numpy sweeps: the pure-Python kernel backend.

Red-black projected SOR for -lap(w) = f with the lower obstacle w >= 0.
Within one color no two nodes are stencil neighbors, so a vectorized
simultaneous update over a color equals the sequential Gauss-Seidel
update; results are identical to the compiled backend (same operation
order per node).

Works for any ndim >= 1; the compiled backend covers ndim 2 and 3.
"""

from __future__ import annotations

import numpy as np

name = "numpy"


def _neighbor_sum(w: np.ndarray) -> np.ndarray:
    """Sum of the 2*ndim face neighbors on the interior slab.

    Accumulated axis by axis as (lo+hi) pairs; the compiled backend uses
    the same association order so both produce identical floats.
    """
    d = w.ndim
    s = None
    for axis in range(d):
        lo = tuple(slice(0, -2) if a == axis else slice(1, -1) for a in range(d))
        hi = tuple(slice(2, None) if a == axis else slice(1, -1) for a in range(d))
        pair = w[lo] + w[hi]
        s = pair if s is None else s + pair
    return s


def psor_halfsweep(
    w: np.ndarray, b: np.ndarray, mask: np.ndarray, omega: float, project: bool
) -> None:
    """Relax all nodes in `mask` (one color) in place.

    b is h^2 * f. mask must contain nodes of a single checkerboard color;
    boundary-layer nodes must not be in it.
    """
    d = w.ndim
    inner = (slice(1, -1),) * d
    s = _neighbor_sum(w)
    inv2n = 1.0 / (2.0 * d)
    cand = (1.0 - omega) * w[inner] + omega * ((s + b[inner]) * inv2n)
    if project:
        np.maximum(cand, 0.0, out=cand)
    np.copyto(w[inner], cand, where=mask[inner])


def residual_stats(
    w: np.ndarray, f: np.ndarray, free: np.ndarray, h2: float
) -> tuple[float, float, float]:
    """Residual maxima over free nodes for r = -lap_h(w) - f.

    Returns (pde_res, comp_res, abs_res):
        pde_res  = max(0, -min r)        negative part of the VI residual
        comp_res = max(0, max min(w, r)) complementarity defect
        abs_res  = max |r|               for unconstrained (Laplace) solves
    """
    d = w.ndim
    inner = (slice(1, -1),) * d
    s = _neighbor_sum(w)
    r = (2.0 * d * w[inner] - s) / h2 - f[inner]
    m = free[inner]
    if not m.any():
        return 0.0, 0.0, 0.0
    rf = r[m]
    wf = w[inner][m]
    pde = max(0.0, float(-rf.min()))
    comp = max(0.0, float(np.minimum(wf, rf).max()))
    absr = float(np.abs(rf).max())
    return pde, comp, absr
