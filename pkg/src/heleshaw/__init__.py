"""Hele-Shaw flow in random media via per-time obstacle problems.

Modules:
    grid        uniform Cartesian grids, masks, discrete Laplacian
    media       bounded stationary coefficient fields and their averages
    analytic    closed-form radial/point-source reference solutions
    obstacle    discrete variational inequality and projected SOR
    evolution   time ladders, pressure recovery, rescaling views
    freeboundary  front extraction, sphericity, Hausdorff metrics, fits
    experiments   scenario runners, config files, CSV/JSON artifacts
"""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]
