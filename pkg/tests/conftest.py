import logging

import numpy as np
import pytest

from heleshaw.grid import build_grid, ball_mask
from heleshaw.media import MediaSpec, sample_media

logging.getLogger("heleshaw").setLevel(logging.WARNING)


@pytest.fixture
def grid2d():
    return build_grid(2, 4.0, 33)


@pytest.fixture
def grid3d():
    return build_grid(3, 3.0, 25)


@pytest.fixture
def radial_setup_2d(grid2d):
    """Small uniform-medium ball-core scene for trajectory tests."""
    core = ball_mask(grid2d, (0, 0), 0.5)
    init = ball_mask(grid2d, (0, 0), 0.8)
    med = sample_media(MediaSpec("constant", 1.0, 1.0), grid2d)
    return grid2d, core, init, med


def rng(seed=0):
    return np.random.default_rng(seed)
