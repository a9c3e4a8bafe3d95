"""Discrete free-boundary extraction and shape metrics.

The discrete front is the inner node boundary of the positivity set:
positivity nodes with a non-positivity face neighbor. Sphericity and
Hausdorff distances are measured against exact spheres, so only the
sample side carries discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError
from .evolution import Snapshot, _inner_boundary, _support_guard
from .grid import Grid


@dataclass
class BoundarySample:
    """Coordinates (k, n) of the discrete front nodes at one time."""

    points: np.ndarray
    t: float

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)


@dataclass
class SphericityReport:
    r_min: float
    r_max: float
    r_mean: float
    defect: float  # (r_max - r_min) / r_mean
    hausdorff: float
    rho: float


def extract_boundary(snapshot: Snapshot, grid: Grid) -> BoundarySample:
    pos = snapshot.positivity
    if not pos.any():
        raise ConfigError(f"empty positivity set at t={snapshot.t}")
    _support_guard(grid, pos)  # a front reaching the box is not a front
    nodes = np.argwhere(_inner_boundary(pos))
    points = nodes * grid.h - grid.extent
    return BoundarySample(points=points, t=snapshot.t)


def _sphere_directions(n: int, count: int) -> np.ndarray:
    """Deterministic quasi-uniform unit directions (angle bins in 2D,
    Fibonacci spiral in 3D)."""
    if n == 2:
        theta = (np.arange(count) + 0.5) * (2.0 * np.pi / count)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    i = np.arange(count) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / count)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    theta = golden * i
    return np.column_stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)]
    )


def hausdorff_to_sphere(sample: BoundarySample, rho: float, directions: int | None = None) -> float:
    """Two-sided Hausdorff distance between the sample and the origin-
    centered sphere of radius rho.

    The sample-to-sphere side is exact (distance to a sphere is
    ||x|-rho|); the sphere-to-sample side is evaluated on >= 64 (2D) or
    >= 512 (3D) quasi-uniform directions, so it is accurate to the
    angular bin size times rho.
    """
    if sample.points.size == 0:
        raise ConfigError("empty boundary sample")
    if rho <= 0:
        raise ConfigError("rho must be positive")
    n = sample.points.shape[1]
    if directions is None:
        directions = 128 if n == 2 else 1024
    directions = max(directions, 64 if n == 2 else 512)
    d_sample = float(np.abs(sample.radii - rho).max())
    sphere_pts = rho * _sphere_directions(n, directions)
    tree = cKDTree(sample.points)
    d_sphere = float(tree.query(sphere_pts, k=1)[0].max())
    return max(d_sample, d_sphere)


def sphericity(sample: BoundarySample, rho: float) -> SphericityReport:
    r = sample.radii
    r_mean = float(r.mean())
    return SphericityReport(
        r_min=float(r.min()),
        r_max=float(r.max()),
        r_mean=r_mean,
        defect=float((r.max() - r.min()) / r_mean) if r_mean > 0 else 0.0,
        hausdorff=hausdorff_to_sphere(sample, rho),
        rho=rho,
    )


def fit_growth_exponent(times, radii) -> tuple[float, float]:
    """Least-squares fit of log r = alpha log t + log c over the trailing
    half of the ladder (at least 4 points). Returns (alpha, c)."""
    times = np.asarray(times, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if times.shape != radii.shape or times.ndim != 1:
        raise ConfigError("times and radii must be 1D arrays of equal length")
    if times.size < 4:
        raise ConfigError("need at least 4 points")
    if np.any(times <= 0) or np.any(radii <= 0):
        raise ConfigError("times and radii must be positive")
    k = max((times.size + 1) // 2, 4)
    k = min(k, times.size)
    lt, lr = np.log(times[-k:]), np.log(radii[-k:])
    if np.ptp(lt) == 0:
        raise ConfigError("degenerate fit: all times equal")
    alpha, logc = np.polyfit(lt, lr, 1)
    return float(alpha), float(np.exp(logc))
