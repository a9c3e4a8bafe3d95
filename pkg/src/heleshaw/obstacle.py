"""Discrete variational inequality: assembly and projected SOR solve.

The per-time weak formulation is the complementarity system at every
free node:

    w >= 0,   -lap_h(w) - f >= 0,   min(w, -lap_h(w) - f) = 0,

with w pinned to the time value on the core, to zero on the truncation
collar, and source f = -ell(x) outside the initial wetted region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError
from .grid import Grid, Mask, ScalarField, farfield_mask
from .analytic import PointSourceParams, front_radius, point_source_baiocchi
from .media import MediaField

DEFAULT_OMEGA = 1.8
DEFAULT_MAX_ITER = 100_000
_CHECK_EVERY = 8


@dataclass
class ObstacleProblem:
    """Grid-discrete obstacle problem with pinned nodes.

    pinned nodes keep pinned_values throughout the solve; the lower
    obstacle is 0 everywhere.
    """

    shape: tuple
    h: float
    pinned: Mask
    pinned_values: ScalarField
    f: ScalarField
    scale: float  # natural magnitude of w, used for tolerance defaults

    @property
    def free(self) -> Mask:
        return ~self.pinned

    def default_tol(self, ell_max: float = 1.0) -> float:
        return 1e-8 * max(self.scale, 1e-4) * max(1.0, ell_max)


@dataclass
class VISolution:
    w: ScalarField
    iterations: int
    pde_residual: float
    complementarity_residual: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def assemble(
    grid: Grid,
    core: Mask,
    initial: Mask,
    media: MediaField,
    t: float,
    dirichlet_value: float | None = None,
) -> ObstacleProblem:
    """Build the discrete problem for the time-t slice.

    The core carries the Dirichlet value (t unless overridden, e.g. by
    the rescaled problems), the outermost layer carries 0, and the sink
    -ell(x) acts outside the initial region.
    """
    if not core.any():
        raise ConfigError("core mask is empty")
    if t < 0:
        raise ConfigError(f"t must be nonnegative, got {t}")
    value = t if dirichlet_value is None else dirichlet_value
    far = farfield_mask(grid)
    if (core & far).any() or (initial & far).any():
        raise ConfigError("core/initial sets touch the truncation boundary")
    pinned = core | far
    pinned_values = np.zeros(grid.shape)
    pinned_values[core] = value
    f = np.where(initial | core, 0.0, -media.ell)
    return ObstacleProblem(
        shape=grid.shape,
        h=grid.h,
        pinned=pinned,
        pinned_values=pinned_values,
        f=f,
        scale=max(float(value), 0.0),
    )


def _color_masks(free: Mask) -> tuple[Mask, Mask]:
    parity = np.indices(free.shape).sum(axis=0) % 2
    return free & (parity == 0), free & (parity == 1)


def psor_solve(
    prob: ObstacleProblem,
    omega: float = DEFAULT_OMEGA,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    w0: ScalarField | None = None,
    project: bool = True,
    ell_max: float = 1.0,
) -> VISolution:
    """Red-black projected SOR until the complementarity residuals meet
    tol (both the negative PDE part and max min(w, residual)).

    With project=False this is plain SOR for the equality problem and
    convergence is judged on |residual| instead. A warm start w0 is an
    optimization only; it does not change the limit within tol.
    """
    if not (1.0 <= omega < 2.0):
        raise ConfigError(f"omega must be in [1, 2), got {omega}")
    if tol is None:
        tol = prob.default_tol(ell_max)
    if tol <= 0:
        raise ConfigError("tol must be positive")

    w = np.array(w0, dtype=float, copy=True) if w0 is not None else np.zeros(prob.shape)
    if w.shape != prob.shape:
        raise ConfigError("warm start shape mismatch")
    w[prob.pinned] = prob.pinned_values[prob.pinned]
    if project:
        np.maximum(w, 0.0, out=w)

    free = prob.free
    red, black = _color_masks(free)
    h2 = prob.h * prob.h
    b = h2 * prob.f
    kern = _kernels.backend_for(w.ndim)

    pde = comp = absr = np.inf
    it = 0
    while it < max_iter:
        kern.psor_halfsweep(w, b, red, omega, project)
        kern.psor_halfsweep(w, b, black, omega, project)
        it += 1
        if it % _CHECK_EVERY == 0 or it == max_iter:
            pde, comp, absr = kern.residual_stats(w, prob.f, free, h2)
            if project:
                if pde <= tol and comp <= tol:
                    break
            elif absr <= tol:
                break
    converged = (pde <= tol and comp <= tol) if project else (absr <= tol)
    return VISolution(
        w=w,
        iterations=it,
        pde_residual=pde,
        complementarity_residual=comp if project else absr,
        converged=converged,
        diagnostics={"abs_residual": absr, "tol": tol, "omega": omega},
    )


def solve_point_source_problem(
    params: PointSourceParams,
    t: float,
    a: float,
    grid: Grid,
    omega: float = DEFAULT_OMEGA,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> VISolution:
    """Annulus-reduced discrete problem for the point-source profile.

    Nodes with |x| <= a are pinned to the exact profile (its values at
    the node coordinates), the source is -L outside, and the obstacle
    is 0. The discrete solution approximates the profile on r >= a and
    its positivity set ends near front_radius(t).
    """
    if grid.n != params.n:
        raise ConfigError("grid dimension must match params")
    rho = front_radius(params, t)
    if a >= rho:
        raise ConfigError(f"inner radius a={a} must be below the front radius {rho:.6g}")
    if a < 3 * grid.h:
        raise ConfigError(f"inner radius a={a} must be at least 3h = {3 * grid.h:.6g}")
    if 1.05 * rho >= grid.extent:
        raise ConfigError("front radius too close to the truncation box")

    r = grid.radii()
    pinned = (r <= a) | farfield_mask(grid)
    # origin value is never read by free-node stencils (a >= 3h); clamp
    # the singular radius to keep the array finite
    r_safe = np.maximum(r, grid.h / 2.0)
    pinned_values = np.zeros(grid.shape)
    disk = r <= a
    pinned_values[disk] = point_source_baiocchi(params, t, r_safe[disk])
    f = np.where(disk, 0.0, -params.L)
    u_a = float(point_source_baiocchi(params, t, np.array(a)))
    prob = ObstacleProblem(
        shape=grid.shape,
        h=grid.h,
        pinned=pinned,
        pinned_values=pinned_values,
        f=f,
        scale=u_a,
    )
    return psor_solve(prob, omega=omega, tol=tol, max_iter=max_iter, ell_max=params.L)
