"""Uniform Cartesian grids, node masks and the discrete Laplacian.

The computational domain is the box [-extent, extent]^n (n = 2 or 3),
truncating full space. The outermost node layer carries homogeneous
Dirichlet data; solutions with compact support inside the box are then
represented exactly. The node count per axis is odd so the origin is a
grid node.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

Mask = np.ndarray  # boolean, shape grid.shape
ScalarField = np.ndarray  # float64, shape grid.shape


class Grid:
    """Uniform node-centered grid on [-extent, extent]^n.

    Attributes:
        n: spatial dimension, 2 or 3
        extent: half-width of the box
        nodes_per_axis: odd node count N per axis
        h: node spacing, 2*extent/(N-1)
        shape: (N,)*n
        axes: 1D coordinate array shared by all axes
    """

    def __init__(self, n: int, extent: float, nodes_per_axis: int):
        if n not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {n}")
        if extent <= 0:
            raise ConfigError(f"extent must be positive, got {extent}")
        if nodes_per_axis < 9:
            raise ConfigError(f"need at least 9 nodes per axis, got {nodes_per_axis}")
        if nodes_per_axis % 2 == 0:
            raise ConfigError(
                f"nodes_per_axis must be odd so the origin is a node, got {nodes_per_axis}"
            )
        self.n = n
        self.extent = float(extent)
        self.nodes_per_axis = int(nodes_per_axis)
        self.h = 2.0 * self.extent / (self.nodes_per_axis - 1)
        self.shape = (self.nodes_per_axis,) * n
        self.axes = np.linspace(-self.extent, self.extent, self.nodes_per_axis)
        self.axes.setflags(write=False)
        self._radii: np.ndarray | None = None

    @property
    def num_nodes(self) -> int:
        return self.nodes_per_axis**self.n

    def coordinates(self) -> list[np.ndarray]:
        """Meshgrid coordinate arrays, one per axis (ij indexing)."""
        return np.meshgrid(*([self.axes] * self.n), indexing="ij")

    def radii(self) -> np.ndarray:
        """|x| at every node (cached)."""
        if self._radii is None:
            sq = np.zeros(self.shape)
            for c in self.coordinates():
                sq += c * c
            self._radii = np.sqrt(sq)
            self._radii.setflags(write=False)
        return self._radii

    def zeros(self) -> ScalarField:
        return np.zeros(self.shape)

    def __repr__(self) -> str:
        return f"Grid(n={self.n}, extent={self.extent}, N={self.nodes_per_axis}, h={self.h:.6g})"


def build_grid(n: int, extent: float, nodes_per_axis: int) -> Grid:
    """Validated grid constructor; see Grid for parameter meanings."""
    return Grid(n, extent, nodes_per_axis)


def ball_mask(grid: Grid, center, radius: float) -> Mask:
    """Nodes with |x - center| <= radius.

    The closed ball must stay strictly inside the box: a set touching the
    truncation boundary would invalidate the compact-support assumption.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.n,):
        raise ConfigError(f"center must have {grid.n} components")
    if radius <= 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    if np.any(np.abs(center) + radius >= grid.extent):
        raise ConfigError(
            f"ball (center {center}, r={radius}) touches or exceeds the box of half-width {grid.extent}"
        )
    sq = np.zeros(grid.shape)
    for k, c in enumerate(grid.coordinates()):
        sq += (c - center[k]) ** 2
    return sq <= radius * radius


def farfield_mask(grid: Grid) -> Mask:
    """The outermost node layer (homogeneous Dirichlet collar)."""
    mask = np.zeros(grid.shape, dtype=bool)
    for axis in range(grid.n):
        idx_lo = [slice(None)] * grid.n
        idx_lo[axis] = 0
        idx_hi = [slice(None)] * grid.n
        idx_hi[axis] = grid.nodes_per_axis - 1
        mask[tuple(idx_lo)] = True
        mask[tuple(idx_hi)] = True
    return mask


def node_roles(grid: Grid, core: Mask, initial: Mask) -> dict[str, Mask]:
    """Disjoint role masks {core, initial, farfield, interior}.

    `initial` is the full initial wetted region; the returned "initial"
    role excludes core nodes so each node carries exactly one role.
    """
    if not core.any():
        raise ConfigError("core mask is empty")
    if not initial[core].all():
        raise ConfigError("core must lie inside the initial set")
    far = farfield_mask(grid)
    if (initial & far).any():
        raise ConfigError("initial set touches the truncation boundary")
    roles = {
        "core": core,
        "initial": initial & ~core,
        "farfield": far,
        "interior": ~(core | initial | far),
    }
    return roles


def apply_laplacian(grid: Grid, f: ScalarField) -> ScalarField:
    """5/7-point discrete Laplacian; zero on the boundary layer.

    Exact for quadratic polynomials at interior nodes.
    """
    if f.shape != grid.shape:
        raise ConfigError(f"field shape {f.shape} != grid shape {grid.shape}")
    out = np.zeros_like(f, dtype=float)
    core = (slice(1, -1),) * grid.n
    acc = -2.0 * grid.n * f[core]
    for axis in range(grid.n):
        lo = tuple(
            slice(0, -2) if a == axis else slice(1, -1) for a in range(grid.n)
        )
        hi = tuple(
            slice(2, None) if a == axis else slice(1, -1) for a in range(grid.n)
        )
        acc = acc + (f[lo] + f[hi])
    out[core] = acc / (grid.h * grid.h)
    return out
