import numpy as np
import pytest

from heleshaw.errors import ConfigError
from heleshaw.grid import build_grid
from heleshaw.media import (
    KINDS,
    MediaSpec,
    exact_mean_reciprocal,
    homogenized_constant,
    sample_media,
    sample_media_scaled,
)


def _grid(n=2, extent=4.0, N=65):
    return build_grid(n, extent, N)


class TestSampling:
    def test_constant(self):
        field = sample_media(MediaSpec("constant", 1.0, 1.0), _grid())
        assert np.all(field.g == 1.0)
        assert np.all(field.ell == 1.0)

    def test_constant_requires_equal_bounds(self):
        with pytest.raises(ConfigError):
            MediaSpec("constant", 1.0, 2.0)

    @pytest.mark.parametrize("kind", [k for k in KINDS if k != "constant"])
    def test_bounds_and_reciprocal(self, kind):
        spec = MediaSpec(kind, 0.5, 2.5, cell=0.7, seed=11)
        field = sample_media(spec, _grid())
        assert field.g.min() >= 0.5 and field.g.max() <= 2.5
        assert np.allclose(field.g * field.ell, 1.0, rtol=1e-15)

    def test_checkerboard_two_point_values(self):
        spec = MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=7)
        field = sample_media(spec, _grid())
        assert set(np.unique(field.g)) == {1.0, 2.0}

    def test_seed_determinism(self):
        spec = MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=7)
        g = _grid()
        f1 = sample_media(spec, g)
        f2 = sample_media(spec, g)
        assert np.array_equal(f1.g, f2.g)

    def test_different_seeds_differ(self):
        g = _grid()
        f1 = sample_media(MediaSpec("checkerboard-iid", 1.0, 2.0, 0.5, seed=7), g)
        f2 = sample_media(MediaSpec("checkerboard-iid", 1.0, 2.0, 0.5, seed=8), g)
        assert not np.array_equal(f1.g, f2.g)

    def test_periodic_cosine_extrema_attained(self):
        # cell aligned with the grid so node coordinates hit the extremes
        g = build_grid(2, 4.0, 65)  # h = 0.125, cell = 1.0
        field = sample_media(MediaSpec("periodic-cosine", 1.0, 2.0, cell=1.0), g)
        assert field.g.min() == pytest.approx(1.0, abs=1e-12)
        assert field.g.max() == pytest.approx(2.0, abs=1e-12)

    def test_sampling_is_node_keyed(self):
        # the value at a node depends only on its coordinates, not on the
        # grid it belongs to: a finer grid agrees at shared nodes
        spec = MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=3)
        coarse = build_grid(2, 4.0, 33)
        fine = build_grid(2, 4.0, 65)
        fc = sample_media(spec, coarse)
        ff = sample_media(spec, fine)
        assert np.array_equal(fc.g, ff.g[::2, ::2])

    def test_scaled_sampling_dilates_coordinates(self):
        spec = MediaSpec("periodic-cosine", 1.0, 2.0, cell=1.0)
        g = _grid(N=33)
        plain = sample_media(spec, g)
        scaled = sample_media_scaled(spec, g, 2.0)
        x, y = g.coordinates()
        expected = 1.5 + 0.5 * np.cos(2 * np.pi * 2 * x) * np.cos(2 * np.pi * 2 * y)
        assert np.allclose(scaled.g, np.clip(expected, 1.0, 2.0), atol=1e-12)
        assert not np.array_equal(plain.g, scaled.g)

    def test_smoothed_noise_continuity(self):
        # multilinear interpolation: neighboring node values differ by at
        # most the field range times the relative step
        spec = MediaSpec("smoothed-noise", 1.0, 2.0, cell=1.0, seed=5)
        g = build_grid(2, 4.0, 129)  # h/cell = 1/16
        field = sample_media(spec, g)
        jump = np.abs(np.diff(field.g, axis=0)).max()
        assert jump <= (2.0 - 1.0) * (g.h / spec.cell) * 2.0


class TestHomogenizedConstant:
    def test_constant_medium(self):
        g = _grid()
        field = sample_media(MediaSpec("constant", 2.0, 2.0), g)
        region = np.ones(g.shape, dtype=bool)
        assert homogenized_constant(field, region) == pytest.approx(0.5)

    def test_checkerboard_matches_expectation(self):
        # exact two-point law: E[1/g] = (1 + 1/2)/2 = 0.75; Monte-Carlo
        # tolerance 3 * sqrt(Var / #cells), Var = 1/16
        g = build_grid(2, 8.0, 129)
        spec = MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=42)
        field = sample_media(spec, g)
        region = np.ones(g.shape, dtype=bool)
        est = homogenized_constant(field, region)
        n_cells = (2 * 8.0 / 0.5) ** 2
        assert abs(est - 0.75) <= 3.0 * np.sqrt(0.0625 / n_cells)

    def test_periodic_cosine_vs_simpson_oracle(self):
        # period average of 1/g by composite Simpson at 10x resolution
        g = build_grid(2, 4.0, 81)  # h = 0.1, cell = 1 -> whole periods
        spec = MediaSpec("periodic-cosine", 1.0, 2.0, cell=1.0)
        field = sample_media(spec, g)
        region = np.ones(g.shape, dtype=bool)
        est = homogenized_constant(field, region)

        M = 800  # 10x the 80 intervals per box side
        xs = np.linspace(-4.0, 4.0, M + 1)
        wx = np.ones(M + 1)
        wx[1:-1:2], wx[2:-1:2] = 4.0, 2.0
        w2 = np.outer(wx, wx)
        gx = 1.5 + 0.5 * np.cos(2 * np.pi * xs)[:, None] * np.cos(2 * np.pi * xs)[None, :]
        oracle = (w2 / gx).sum() / w2.sum()
        # node average vs integral average: trapezoid-vs-Simpson gap
        assert abs(est - oracle) < 2e-3

    def test_empty_region_rejected(self):
        g = _grid()
        field = sample_media(MediaSpec("constant", 1.0, 1.0), g)
        with pytest.raises(ConfigError):
            homogenized_constant(field, np.zeros(g.shape, dtype=bool))

    def test_checkerboard_uniform_exact_mean(self):
        # E[1/U(m,M)] = log(M/m)/(M-m); quadrature oracle cross-check
        spec = MediaSpec("checkerboard-uniform", 1.0, 2.0, cell=0.25, seed=9)
        exact = exact_mean_reciprocal(spec)
        xs = np.linspace(1.0, 2.0, 20001)
        oracle = np.trapezoid(1.0 / xs, xs)
        assert exact == pytest.approx(oracle, abs=1e-8)
        g = build_grid(2, 8.0, 257)
        field = sample_media(spec, g)
        est = homogenized_constant(field, np.ones(g.shape, dtype=bool))
        n_cells = (16.0 / 0.25) ** 2
        assert abs(est - exact) <= 4.0 * np.sqrt(0.05 / n_cells)


class TestStationarity:
    def test_disjoint_congruent_regions_agree(self):
        # empirical means of ell over two congruent halves differ by at
        # most 5 * (m*M) / sqrt(#cells)
        g = build_grid(2, 8.0, 129)
        spec = MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=21)
        field = sample_media(spec, g)
        x, _ = g.coordinates()
        left, right = x < 0, x > 0
        m1 = field.ell[left].mean()
        m2 = field.ell[right].mean()
        n_cells = (8.0 / 0.5) * (16.0 / 0.5)
        assert abs(m1 - m2) <= 5.0 * (1.0 * 2.0) / np.sqrt(n_cells)


class TestSpecValidation:
    def test_bad_bounds(self):
        with pytest.raises(ConfigError):
            MediaSpec("checkerboard-iid", -1.0, 2.0)
        with pytest.raises(ConfigError):
            MediaSpec("checkerboard-iid", 2.0, 1.0)

    def test_bad_kind(self):
        with pytest.raises(ConfigError):
            MediaSpec("perlin", 1.0, 2.0)

    def test_bad_cell(self):
        with pytest.raises(ConfigError):
            MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.0)
