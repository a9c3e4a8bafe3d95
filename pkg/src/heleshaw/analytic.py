"""Closed-form reference solutions: radially symmetric Hele-Shaw
solutions and their radius law, point-source limit profiles, the 2D
rescaling radius, and exterior harmonic profiles for ball cores.

All radial quantities are functions of r = |x|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SolverError


@dataclass(frozen=True)
class RadialParams:
    """Parameters of the explicit radial solution.

    A: strength (pressure datum is A * a^(2-n) on r = a)
    a: core radius; b: initial front radius; L: latent heat constant.
    """

    A: float
    a: float
    b: float
    L: float
    n: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.n}")
        if not (0 < self.a < self.b):
            raise ConfigError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if self.A <= 0 or self.L <= 0:
            raise ConfigError("A and L must be positive")


@dataclass(frozen=True)
class PointSourceParams:
    """Singularity strength A and homogenized latent heat L of the
    point-source limit profiles."""

    A: float
    L: float
    n: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.n}")
        if self.A <= 0 or self.L <= 0:
            raise ConfigError("A and L must be positive")


def radial_pressure(p: RadialParams, R: float, r):
    """Annulus pressure profile with front at radius R.

    n >= 3: A a^(2-n) (r^(2-n) - R^(2-n))_+ / (a^(2-n) - R^(2-n));
    n = 2:  A (log(R/r))_+ / log(R/a).
    """
    if R <= p.a:
        raise ConfigError(f"front radius R={R} must exceed core radius a={p.a}")
    r = np.asarray(r, dtype=float)
    if np.any(r < p.a):
        raise ConfigError("radial pressure is defined for r >= a")
    if p.n == 2:
        val = p.A * np.maximum(np.log(R / r), 0.0) / math.log(R / p.a)
    else:
        e = 2 - p.n
        val = p.A * p.a**e * np.maximum(r**e - R**e, 0.0) / (p.a**e - R**e)
    return val if val.ndim else float(val)


def front_speed(p: RadialParams, R: float) -> float:
    """Slope law R' = (1/L) |dp/dr|(R) of the radial solution."""
    if R <= p.a:
        raise ConfigError(f"R={R} must exceed a={p.a}")
    if p.n == 2:
        return p.A / (p.L * R * math.log(R / p.a))
    e = 2 - p.n
    return p.A * p.a**e * (p.n - 2) * R ** (1 - p.n) / (p.L * (p.a**e - R**e))


def _rk4_step(f, y: float, h: float) -> float:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def radius_evolution(p: RadialParams, t_grid, rtol: float = 1e-8) -> np.ndarray:
    """Integrate the radius law R' = front_speed from R(0) = b.

    RK4 with step-doubling control at relative tolerance rtol; returns
    R at the requested (increasing, nonnegative) times.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ConfigError("t_grid must be a nonempty 1D array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise ConfigError("t_grid must be increasing and start at t >= 0")

    f = lambda R: front_speed(p, R)
    out = np.empty_like(t_grid)
    t, R = 0.0, p.b
    h = 0.01 if t_grid[-1] == 0 else min(0.1, t_grid[-1] / 100.0)
    steps = 0
    for k, tk in enumerate(t_grid):
        while t < tk:
            steps += 1
            if steps > 10_000_000:
                raise SolverError("radius integration stalled")
            h = min(h, tk - t)
            full = _rk4_step(f, R, h)
            half = _rk4_step(f, _rk4_step(f, R, 0.5 * h), 0.5 * h)
            err = abs(half - full) / 15.0
            tol = rtol * max(abs(half), p.b)
            if err <= tol:
                # fifth-order accepted value (local extrapolation)
                R = half + (half - full) / 15.0
                t += h
            growth = (tol / err) ** 0.2 if err > 0 else 5.0
            h *= min(5.0, max(0.2, 0.9 * growth))
        out[k] = R
    return out


def front_radius(params: PointSourceParams, t) -> np.ndarray | float:
    """Front radius of the point-source profile.

    n >= 3: (A n (n-2) t / L)^(1/n);  n = 2: (2 A t / L)^(1/2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigError("t must be nonnegative")
    if params.n == 2:
        val = np.sqrt(2.0 * params.A * t / params.L)
    else:
        n = params.n
        val = (params.A * n * (n - 2) * t / params.L) ** (1.0 / n)
    return val if val.ndim else float(val)


def point_source_pressure(params: PointSourceParams, t: float, r):
    """Pressure profile of the Hele-Shaw problem with a point source.

    n >= 3: A (r^(2-n) - rho^(2-n))_+;  n = 2: A (log(rho/r))_+.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigError("profile is singular at r = 0")
    rho = front_radius(params, t)
    if rho == 0.0:
        val = np.zeros_like(r)
    elif params.n == 2:
        val = params.A * np.maximum(np.log(rho / r), 0.0)
    else:
        e = 2 - params.n
        val = params.A * np.maximum(r**e - rho**e, 0.0)
    return val if val.ndim else float(val)


def point_source_baiocchi(params: PointSourceParams, t: float, r, clip: bool = True):
    """Time-integrated point-source profile (the obstacle-problem
    solution with a singular datum at the origin).

    n >= 3: A t r^(2-n) + (L/2n) r^2 - (1/2)(A n t)^(2/n) ((n-2)/L)^((2-n)/n)
    n = 2:  (A/2) t log(2At/(L e r^2)) + L r^2 / 4
    restricted to the support r <= front_radius(t). The smooth branch is
    convex with minimum 0 at the front, so it must be cut off by the
    support rather than by a positive part (clip=False returns the raw
    branch, useful for checking the C^1 matching at the front).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigError("profile is singular at r = 0")
    if t < 0:
        raise ConfigError("t must be nonnegative")
    if t == 0.0:
        val = np.zeros_like(r)
        return val if val.ndim else float(val)
    A, L, n = params.A, params.L, params.n
    if n == 2:
        branch = 0.5 * A * t * np.log(2.0 * A * t / (L * math.e * r**2)) + 0.25 * L * r**2
    else:
        branch = (
            A * t * r ** (2 - n)
            + (L / (2.0 * n)) * r**2
            - 0.5 * (A * n * t) ** (2.0 / n) * ((n - 2) / L) ** ((2.0 - n) / n)
        )
    if clip:
        branch = np.where(r <= front_radius(params, t), np.maximum(branch, 0.0), 0.0)
    return branch if branch.ndim else float(branch)


def rescale_radius_2d_asymptote(lam: float) -> float:
    """Large-argument approximation (2 lam / log lam)^(1/2)."""
    if lam <= 1.0:
        raise ConfigError("asymptote needs lam > 1")
    return math.sqrt(2.0 * lam / math.log(lam))


def rescale_radius_2d(lam: float, residual_tol: float = 1e-12) -> float:
    """Unique root R > 1 of R^2 log R = lam, by safeguarded Newton.

    Residual satisfies |R^2 log R - lam| <= residual_tol * (1 + lam).
    """
    if lam <= 0:
        raise ConfigError(f"lam must be positive, got {lam}")
    F = lambda R: R * R * math.log(R) - lam
    dF = lambda R: R * (2.0 * math.log(R) + 1.0)
    if lam > math.e:
        R = rescale_radius_2d_asymptote(lam)
        hi = max(2.0, 2.0 * R)
    else:
        R = 1.0 + lam
        hi = max(2.0, 1.0 + lam)
    lo = 1.0 + 1e-9
    # maintain a sign-changing bracket; bisect whenever Newton leaves it
    tol = residual_tol * (1.0 + lam)
    for _ in range(200):
        fR = F(R)
        if abs(fR) <= tol:
            return R
        if fR > 0:
            hi = min(hi, R)
        else:
            lo = max(lo, R)
        step = fR / dF(R)
        R_new = R - step
        if not (lo < R_new < hi) or not math.isfinite(R_new):
            R_new = 0.5 * (lo + hi)
        R = R_new
    raise SolverError(f"rescale_radius_2d did not converge for lam={lam}")  # pragma: no cover


def capacity_constant_ball(a: float, n: int) -> float:
    """Far-field coefficient of the exterior harmonic profile of a ball:
    a^(n-2) for n >= 3. In 2D the bounded exterior solution is constant
    1, so the coefficient degenerates to 1 (= a^0)."""
    if a <= 0:
        raise ConfigError("radius must be positive")
    if n not in (2, 3):
        raise ConfigError("dimension must be 2 or 3")
    return float(a ** (n - 2))


def near_field_profile_ball(a: float, n: int, r):
    """Exterior harmonic profile with value 1 on the ball of radius a:
    (a/r)^(n-2) for n >= 3; the bounded branch, constant 1, for n = 2."""
    if a <= 0:
        raise ConfigError("radius must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < a):
        raise ConfigError("profile defined for r >= a")
    if n == 2:
        val = np.ones_like(r)
    else:
        val = (a / r) ** (n - 2)
    return val if val.ndim else float(val)


def asymptotic_front_radius(params: PointSourceParams, t: float) -> float:
    """Reference front radius at (unrescaled) time t for long-time runs.

    For n >= 3 this is front_radius(t) itself. In 2D the compatible
    long-time law is front_radius(1) * R(t) with R the rescaling radius,
    since the front at time lam, divided by R(lam), approaches the unit-
    time profile radius.
    """
    if t <= 0:
        raise ConfigError("t must be positive")
    if params.n >= 3:
        return float(front_radius(params, t))
    return float(front_radius(params, 1.0)) * rescale_radius_2d(t)
