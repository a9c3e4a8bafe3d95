"""Stationary random velocity-coefficient fields g(x) and their latent
heat ell(x) = 1/g(x).

All generators are deterministic functions of (spec, coordinates): cell
values come from a counter-based integer hash keyed by the lattice-cell
index and the seed, so sampling is order-independent and identical for
any thread count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import Grid, Mask

KINDS = ("constant", "periodic-cosine", "checkerboard-iid", "checkerboard-uniform", "smoothed-noise")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class MediaSpec:
    """Generator description for a bounded stationary field m <= g <= M."""

    kind: str
    m: float
    M: float
    cell: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown media kind {self.kind!r}; choose from {KINDS}")
        if not (0 < self.m <= self.M):
            raise ConfigError(f"need 0 < m <= M, got m={self.m}, M={self.M}")
        if self.cell <= 0:
            raise ConfigError(f"cell must be positive, got {self.cell}")
        if self.kind == "constant" and self.m != self.M:
            raise ConfigError("constant media requires m == M")


@dataclass(frozen=True)
class MediaField:
    """Sampled field g with its pointwise reciprocal ell = 1/g."""

    g: np.ndarray
    ell: np.ndarray
    spec: MediaSpec

    @property
    def ell_max(self) -> float:
        return 1.0 / self.spec.m


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """Finalizer of the splitmix64 generator; uint64 in, uint64 out."""
    with np.errstate(over="ignore"):
        z = (x + _GOLDEN).astype(np.uint64)
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def _cell_uniform(seed: int, index_arrays: list[np.ndarray]) -> np.ndarray:
    """iid-looking U[0,1) value per lattice cell, keyed by (seed, index).

    Coordinates are folded in sequentially, so permuted indices map to
    different streams.
    """
    acc = _splitmix64(np.asarray(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    for idx in index_arrays:
        acc = _splitmix64(acc ^ idx.astype(np.int64).astype(np.uint64))
    return (acc >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def _g_at(spec: MediaSpec, coords: list[np.ndarray]) -> np.ndarray:
    """Evaluate g at arbitrary coordinate arrays (one array per axis)."""
    shape = np.broadcast_shapes(*[c.shape for c in coords])
    if spec.kind == "constant":
        return np.full(shape, spec.m)
    if spec.kind == "periodic-cosine":
        mid = 0.5 * (spec.m + spec.M)
        amp = 0.5 * (spec.M - spec.m)
        prod = np.ones(shape)
        for c in coords:
            prod = prod * np.cos(2.0 * np.pi * c / spec.cell)
        return mid + amp * prod
    if spec.kind in ("checkerboard-iid", "checkerboard-uniform"):
        idx = [np.floor(c / spec.cell).astype(np.int64) for c in coords]
        u = _cell_uniform(spec.seed, idx)
        if spec.kind == "checkerboard-iid":
            return np.where(u < 0.5, spec.m, spec.M)
        return spec.m + (spec.M - spec.m) * u
    # smoothed-noise: multilinear interpolation of iid corner uniforms on
    # the lattice of pitch `cell`; convex weights keep values in [m, M].
    scaled = [c / spec.cell for c in coords]
    base = [np.floor(s).astype(np.int64) for s in scaled]
    frac = [s - b for s, b in zip(scaled, base)]
    val = np.zeros(shape)
    for corner in itertools.product((0, 1), repeat=len(coords)):
        weight = np.ones(shape)
        for f, o in zip(frac, corner):
            weight = weight * (f if o else (1.0 - f))
        idx = [b + np.int64(o) for b, o in zip(base, corner)]
        val += weight * _cell_uniform(spec.seed, idx)
    return spec.m + (spec.M - spec.m) * val


def sample_media(spec: MediaSpec, grid: Grid) -> MediaField:
    """Sample g on the grid nodes; deterministic in (spec, grid)."""
    return sample_media_scaled(spec, grid, 1.0)


def sample_media_scaled(spec: MediaSpec, grid: Grid, scale: float) -> MediaField:
    """Sample the dilated field g(scale * x) on the grid.

    scale > 1 realizes the rescaled coefficient of the shrunken-core
    problem on a fixed grid.
    """
    coords = [c * scale for c in grid.coordinates()]
    # clip guards last-ulp roundoff of the convex generators
    g = np.clip(_g_at(spec, coords), spec.m, spec.M)
    ell = 1.0 / g
    g.setflags(write=False)
    ell.setflags(write=False)
    return MediaField(g=g, ell=ell, spec=spec)


def homogenized_constant(field: MediaField, region: Mask) -> float:
    """Spatial mean of ell = 1/g over the region (homogenized latent heat)."""
    if not region.any():
        raise ConfigError("region is empty")
    return float(field.ell[region].mean())


def exact_mean_reciprocal(spec: MediaSpec) -> float | None:
    """Closed-form expectation of 1/g where the generator admits one."""
    if spec.kind == "constant":
        return 1.0 / spec.m
    if spec.kind == "checkerboard-iid":
        return 0.5 * (1.0 / spec.m + 1.0 / spec.M)
    if spec.kind == "checkerboard-uniform":
        if spec.m == spec.M:
            return 1.0 / spec.m
        return float(np.log(spec.M / spec.m) / (spec.M - spec.m))
    return None
