"""Time ladders of per-time obstacle solves, pressure recovery, and the
long-time rescaling views.

Each ladder time is an independent variational-inequality solve (the
weak solution is defined per time slice, not by time stepping); warm
starts from the previous slice only accelerate convergence.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

from . import obstacle
from ._pool import pool_map
from .analytic import rescale_radius_2d
from .errors import ConfigError, InvariantViolation, SolverError
from .grid import Grid, Mask, ScalarField, farfield_mask
from .media import MediaField
from .obstacle import VISolution

logger = logging.getLogger(__name__)


@dataclass
class SolverParams:
    omega: float = obstacle.DEFAULT_OMEGA
    tol: float | None = None  # None: per-problem default
    max_iter: int = obstacle.DEFAULT_MAX_ITER
    warm_start: bool = True


@dataclass
class Snapshot:
    """Weak solution slice u(., t) with its positivity data."""

    t: float
    u: ScalarField
    positivity: Mask
    r_min: float
    r_max: float
    diagnostics: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    grid: Grid
    core: Mask
    initial: Mask
    media: MediaField
    snapshots: list[Snapshot]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def snapshot_at(self, t: float) -> Snapshot:
        for s in self.snapshots:
            if s.t == t:
                return s
        raise KeyError(f"no snapshot at t={t}")


def positivity_threshold(grid: Grid, ell_max: float) -> float:
    """Values below h^2 * ell_max / 8 (a one-cell quadratic tail) are
    indistinguishable from contact-set discretization noise."""
    return grid.h * grid.h * ell_max / 8.0


def _support_guard(grid: Grid, positivity: Mask) -> None:
    # reject runs whose support reaches the outer two node layers
    inner = np.zeros(grid.shape, dtype=bool)
    inner[(slice(2, -2),) * grid.n] = True
    if (positivity & ~inner).any():
        raise InvariantViolation(
            "positivity set touched the truncation box; enlarge the domain"
        )


def snapshot_from_solution(
    grid: Grid, t: float, sol: VISolution, ell_max: float
) -> Snapshot:
    eps = positivity_threshold(grid, ell_max)
    pos = sol.w > eps
    _support_guard(grid, pos)
    if pos.any():
        boundary = _inner_boundary(pos)
        radii = grid.radii()[boundary]
        r_min, r_max = float(radii.min()), float(radii.max())
    else:
        r_min = r_max = 0.0
    diags = {
        "iterations": sol.iterations,
        "pde_residual": sol.pde_residual,
        "complementarity_residual": sol.complementarity_residual,
        "wall_ms": sol.diagnostics.get("wall_ms", 0.0),
        "tol": sol.diagnostics.get("tol", 0.0),
    }
    return Snapshot(t=t, u=sol.w, positivity=pos, r_min=r_min, r_max=r_max, diagnostics=diags)


def _inner_boundary(pos: Mask) -> Mask:
    """Positivity nodes with at least one non-positivity face neighbor."""
    d = pos.ndim
    has_gap = np.zeros_like(pos)
    for axis in range(d):
        lo = tuple(slice(1, None) if a == axis else slice(None) for a in range(d))
        hi = tuple(slice(None, -1) if a == axis else slice(None) for a in range(d))
        # neighbor below / above missing
        has_gap[lo] |= ~pos[hi]
        has_gap[hi] |= ~pos[lo]
    # outermost layer has fewer neighbors; those nodes count as boundary
    edge = np.ones_like(pos)
    edge[(slice(1, -1),) * d] = False
    return pos & (has_gap | edge)


def run_trajectory(
    grid: Grid,
    core: Mask,
    initial: Mask,
    media: MediaField,
    t_ladder,
    solver: SolverParams | None = None,
) -> Trajectory:
    """Solve the obstacle problem at every ladder time.

    Enforces the structural invariants along the way: nodewise
    monotonicity, the time-Lipschitz bound, nested positivity sets and
    support containment; raises on solver failure.
    """
    solver = solver or SolverParams()
    t_ladder = np.asarray(t_ladder, dtype=float)
    if t_ladder.ndim != 1 or t_ladder.size == 0:
        raise ConfigError("t_ladder must be a nonempty 1D sequence")
    if np.any(np.diff(t_ladder) <= 0) or t_ladder[0] < 0:
        raise ConfigError("t_ladder must be strictly increasing and nonnegative")

    ell_max = media.ell_max

    def solve_at(t: float, w_prev: ScalarField | None) -> obstacle.VISolution:
        t0 = time.perf_counter()
        prob = obstacle.assemble(grid, core, initial, media, t)
        sol = obstacle.psor_solve(
            prob,
            omega=solver.omega,
            tol=solver.tol,
            max_iter=solver.max_iter,
            w0=w_prev,
            ell_max=ell_max,
        )
        sol.diagnostics["wall_ms"] = (time.perf_counter() - t0) * 1e3
        if not sol.converged:
            raise SolverError(
                f"VI solve at t={t} stopped at {sol.iterations} iterations with "
                f"residuals ({sol.pde_residual:.3g}, {sol.complementarity_residual:.3g})"
            )
        return sol

    if solver.warm_start:
        sols = []
        w_prev: ScalarField | None = None
        for t in t_ladder:
            sol = solve_at(t, w_prev)
            sols.append(sol)
            w_prev = sol.w
    else:
        # ladder times are independent problems; dispatch to a pool
        # capped by HS_THREADS (the compiled sweeps release the GIL)
        sols = pool_map(lambda t: solve_at(t, None), list(t_ladder))

    snaps: list[Snapshot] = []
    for t, sol in zip(t_ladder, sols):
        snap = snapshot_from_solution(grid, t, sol, ell_max)
        if snaps:
            _check_slice_pair(snaps[-1], snap, tol=sol.diagnostics["tol"])
        snaps.append(snap)
        logger.info(
            "t=%g: %d iterations, r in [%.4g, %.4g]",
            t, sol.iterations, snap.r_min, snap.r_max,
        )
    return Trajectory(grid=grid, core=core, initial=initial, media=media, snapshots=snaps)


def _check_slice_pair(prev: Snapshot, cur: Snapshot, tol: float) -> None:
    dt = cur.t - prev.t
    slack = 10.0 * tol
    if np.any(cur.u < prev.u - slack):
        raise InvariantViolation(f"monotonicity in t failed between t={prev.t} and t={cur.t}")
    if float(np.abs(cur.u - prev.u).max()) > dt + slack:
        raise InvariantViolation(f"time-Lipschitz bound failed between t={prev.t} and t={cur.t}")
    if (prev.positivity & ~cur.positivity).any():
        raise InvariantViolation(f"positivity sets not nested between t={prev.t} and t={cur.t}")


def pressure_backward_difference(traj: Trajectory, k: int) -> ScalarField:
    """Pressure as the backward time difference (u_k - u_{k-1}) / dt."""
    if k < 1 or k >= len(traj.snapshots):
        raise ConfigError("need 1 <= k < number of snapshots")
    a, b = traj.snapshots[k - 1], traj.snapshots[k]
    return (b.u - a.u) / (b.t - a.t)


def harmonic_pressure(
    snapshot: Snapshot,
    grid: Grid,
    core: Mask,
    omega: float = obstacle.DEFAULT_OMEGA,
    tol: float | None = None,
    max_iter: int = obstacle.DEFAULT_MAX_ITER,
) -> ScalarField:
    """Pressure as the harmonic function on the positivity set:
    1 on the core, 0 outside the positivity set."""
    pos = snapshot.positivity
    if not pos.any():
        raise ConfigError("empty positivity set")
    if not pos[core].all():
        raise ConfigError("core must lie inside the positivity set")
    pinned = core | ~pos | farfield_mask(grid)
    pv = np.zeros(grid.shape)
    pv[core] = 1.0
    prob = obstacle.ObstacleProblem(
        shape=grid.shape, h=grid.h, pinned=pinned, pinned_values=pv,
        f=np.zeros(grid.shape), scale=1.0,
    )
    if tol is None:
        # residual budget giving ~1e-8 solution error on this box
        tol = 4e-8 / grid.extent**2
    sol = obstacle.psor_solve(
        prob, omega=omega, tol=tol, max_iter=max_iter, project=False
    )
    if not sol.converged:
        raise SolverError("harmonic pressure solve did not converge")
    return sol.w


def rescale_pressure(func, lam: float, n: int):
    """The long-time pressure rescaling operator for n >= 3:
    (x, t) -> lam^((n-2)/n) * func(lam^(1/n) x, lam t).

    The map C |x|^(2-n) is a fixed point.
    """
    if n < 3:
        raise ConfigError("pressure rescaling operator defined for n >= 3")
    if lam <= 0:
        raise ConfigError("lam must be positive")
    s = lam ** (1.0 / n)
    amp = lam ** ((n - 2.0) / n)

    def rescaled(x, t):
        return amp * func(s * np.asarray(x), lam * t)

    return rescaled


class RescaledTrajectory:
    """Read-only view of a trajectory under the long-time rescaling.

    n >= 3: u_lam(x, t) = lam^(-2/n) u(lam^(1/n) x, lam t)
    n = 2:  u_lam(x, t) = (log Rs(lam) / lam) u(Rs(lam) x, lam t),
    with Rs the 2D rescaling radius. Space is sampled multilinearly;
    time linearly between snapshots. lam = 1 is the identity by
    convention (the n >= 3 formula gives it anyway; the 2D map is only
    meaningful for lam > 1 where Rs > 1).
    """

    def __init__(self, traj: Trajectory, lam: float):
        if lam < 1:
            raise ConfigError("lam must be >= 1")
        self.traj = traj
        self.lam = lam
        n = traj.grid.n
        if n == 2:
            R = rescale_radius_2d(lam) if lam > 1 else 1.0
            self.space_scale = R
            self.amplitude = np.log(R) / lam if lam > 1 else 1.0
        else:
            self.space_scale = lam ** (1.0 / n)
            self.amplitude = lam ** (-2.0 / n)
        if lam == 1:
            self.space_scale = 1.0
            self.amplitude = 1.0

    def evaluate(self, points, t: float):
        """Rescaled field at physical points (array shaped (k, n)) and time t."""
        traj, grid = self.traj, self.traj.grid
        pts = np.atleast_2d(np.asarray(points, dtype=float)) * self.space_scale
        if np.any(np.abs(pts) > grid.extent):
            raise ConfigError("query outside the source trajectory's box")
        ts = traj.times
        t_src = self.lam * t
        if t_src < ts[0] - 1e-12 or t_src > ts[-1] + 1e-12:
            raise ConfigError(f"source time {t_src} outside ladder range [{ts[0]}, {ts[-1]}]")
        t_src = min(max(t_src, ts[0]), ts[-1])
        k = int(np.searchsorted(ts, t_src, side="right") - 1)
        k = min(k, len(ts) - 2) if len(ts) > 1 else 0
        idx = (pts.T + grid.extent) / grid.h  # index-space coordinates
        u0 = map_coordinates(traj.snapshots[k].u, idx, order=1, mode="nearest")
        if len(ts) == 1 or ts[k] == t_src:
            u_val = u0
        else:
            u1 = map_coordinates(traj.snapshots[k + 1].u, idx, order=1, mode="nearest")
            th = (t_src - ts[k]) / (ts[k + 1] - ts[k])
            u_val = (1.0 - th) * u0 + th * u1
        return self.amplitude * u_val


def rescale_trajectory(traj: Trajectory | RescaledTrajectory, lam: float) -> RescaledTrajectory:
    """Rescaled view; views compose multiplicatively for n >= 3 (the
    scaling is a group), while the 2D radius map is not multiplicative."""
    if isinstance(traj, RescaledTrajectory):
        if traj.traj.grid.n < 3:
            raise ConfigError("2D rescaled views do not compose")
        return RescaledTrajectory(traj.traj, traj.lam * lam)
    return RescaledTrajectory(traj, lam)
