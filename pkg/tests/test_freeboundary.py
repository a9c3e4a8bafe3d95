import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heleshaw.errors import ConfigError
from heleshaw.evolution import Snapshot
from heleshaw.freeboundary import (
    BoundarySample,
    extract_boundary,
    fit_growth_exponent,
    hausdorff_to_sphere,
    sphericity,
)
from heleshaw.grid import ball_mask, build_grid


def _snapshot_from_mask(mask, t=1.0):
    return Snapshot(t=t, u=mask.astype(float), positivity=mask, r_min=0.0, r_max=0.0)


def _circle_sample(rho, count=400, t=1.0, arc=2 * np.pi):
    theta = np.linspace(0.0, arc, count, endpoint=False)
    pts = rho * np.column_stack([np.cos(theta), np.sin(theta)])
    return BoundarySample(points=pts, t=t)


class TestExtractBoundary:
    def test_ball_positivity_radii_within_band(self):
        g = build_grid(2, 4.0, 257)
        R = 2.0
        snap = _snapshot_from_mask(ball_mask(g, (0, 0), R))
        sample = extract_boundary(snap, g)
        assert sample.radii.max() <= R
        assert sample.radii.min() >= R - 2 * g.h

    def test_band_shrinks_with_h(self):
        # discrete front nodes converge to the true circle at rate O(h)
        widths = []
        for N in (65, 129, 257):
            g = build_grid(2, 4.0, N)
            snap = _snapshot_from_mask(ball_mask(g, (0, 0), 2.0))
            sample = extract_boundary(snap, g)
            widths.append(2.0 - sample.radii.min())
        assert widths[2] < widths[0]
        assert widths[2] <= 2 * (4.0 * 2 / 256)

    def test_single_node_positivity(self):
        g = build_grid(2, 4.0, 33)
        mask = np.zeros(g.shape, dtype=bool)
        mask[16, 16] = True
        sample = extract_boundary(_snapshot_from_mask(mask), g)
        assert sample.points.shape == (1, 2)
        assert np.allclose(sample.points[0], [0.0, 0.0])

    def test_empty_positivity_rejected(self):
        g = build_grid(2, 4.0, 33)
        with pytest.raises(ConfigError):
            extract_boundary(_snapshot_from_mask(np.zeros(g.shape, dtype=bool)), g)

    def test_box_touching_positivity_rejected(self):
        from heleshaw.errors import InvariantViolation

        g = build_grid(2, 4.0, 33)
        with pytest.raises(InvariantViolation):
            extract_boundary(_snapshot_from_mask(np.ones(g.shape, dtype=bool)), g)

    def test_3d_ball(self):
        g = build_grid(3, 2.0, 65)
        R = 1.0
        sample = extract_boundary(_snapshot_from_mask(ball_mask(g, (0, 0, 0), R)), g)
        assert sample.radii.max() <= R
        assert sample.radii.min() >= R - 2 * g.h


class TestHausdorff:
    def test_sample_on_sphere(self):
        s = _circle_sample(2.0, count=4000)
        # both sides nearly zero: sample side exactly, sphere side to
        # the angular bin size
        assert hausdorff_to_sphere(s, 2.0, directions=128) <= 2.0 * (2 * np.pi / 4000) + 2e-3

    def test_radial_offset_detected(self):
        delta = 0.07
        s = _circle_sample(2.0 + delta, count=4000)
        d = hausdorff_to_sphere(s, 2.0, directions=256)
        assert d == pytest.approx(delta, abs=5e-3)

    def test_missing_cap_detected(self):
        # crescent: circle minus a polar cap of half-angle 0.5 rad; the
        # sphere-to-sample sup must see a gap deeper than half the cap
        rho, half_angle = 2.0, 0.5
        theta = np.linspace(half_angle, 2 * np.pi - half_angle, 2000)
        pts = rho * np.column_stack([np.cos(theta), np.sin(theta)])
        s = BoundarySample(points=pts, t=1.0)
        cap_depth = rho * (1.0 - np.cos(half_angle))
        d = hausdorff_to_sphere(s, rho, directions=512)
        assert d > cap_depth / 2.0
        # oracle: the farthest sphere point is (rho, 0), at chord
        # distance 2 rho sin(half_angle / 2) from the crescent tips
        assert d == pytest.approx(2 * rho * np.sin(half_angle / 2), abs=0.02)

    def test_triangle_inequality_sanity(self):
        s = _circle_sample(1.7, count=500)
        rho = 2.1
        lhs = hausdorff_to_sphere(s, np.mean(s.radii))
        rhs = hausdorff_to_sphere(s, rho) + abs(np.mean(s.radii) - rho)
        assert lhs <= rhs + 1e-9

    def test_3d_directions(self):
        rng = np.random.default_rng(1)
        dirs = rng.standard_normal((3000, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        s = BoundarySample(points=1.5 * dirs, t=0.0)
        assert hausdorff_to_sphere(s, 1.5) <= 0.2  # bounded by direction coverage

    def test_rejects_bad_input(self):
        s = _circle_sample(1.0)
        with pytest.raises(ConfigError):
            hausdorff_to_sphere(s, 0.0)
        with pytest.raises(ConfigError):
            hausdorff_to_sphere(BoundarySample(points=np.empty((0, 2)), t=0.0), 1.0)


class TestSphericity:
    def test_ordering_invariant(self):
        s = _circle_sample(2.0, count=300)
        rep = sphericity(s, 2.0)
        assert rep.r_min <= rep.r_mean <= rep.r_max

    def test_zero_defect_iff_equal_radii(self):
        # axis-aligned points have exactly representable radii
        pts = 2.0 * np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
        assert sphericity(BoundarySample(points=pts, t=0.0), 2.0).defect == 0.0
        pts = np.array([[1.0, 0.0], [0.0, 1.2]])
        assert sphericity(BoundarySample(points=pts, t=0.0), 1.0).defect > 0.0


class TestGrowthFit:
    def test_exact_power_law_recovered(self):
        t = np.geomspace(1, 100, 12)
        r = 1.7 * t ** (1.0 / 3.0)
        alpha, c = fit_growth_exponent(t, r)
        assert alpha == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert c == pytest.approx(1.7, abs=1e-9)

    @given(
        alpha=st.floats(0.1, 0.9),
        c=st.floats(0.5, 3.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_power_law_property(self, alpha, c):
        t = np.geomspace(2, 500, 10)
        a_fit, c_fit = fit_growth_exponent(t, c * t**alpha)
        assert a_fit == pytest.approx(alpha, abs=1e-8)

    def test_log_corrected_law_drags_fit_down(self):
        # r = c (t / log t)^(1/2) over t in [1e2, 1e4] fits below 1/2
        t = np.geomspace(1e2, 1e4, 16)
        r = 2.0 * np.sqrt(t / np.log(t))
        alpha, _ = fit_growth_exponent(t, r)
        assert 0.40 < alpha < 0.50

    def test_noisy_power_law(self):
        rng = np.random.default_rng(123)
        t = np.geomspace(1, 1000, 24)
        r = 2.0 * t**0.5 * (1.0 + 0.01 * rng.uniform(-1, 1, t.size))
        alpha, _ = fit_growth_exponent(t, r)
        assert abs(alpha - 0.5) <= 0.02

    def test_uses_trailing_half(self):
        # early transient must not pollute the fit
        t = np.geomspace(1, 256, 16)
        r = 3.0 * t ** (1.0 / 3.0)
        r[:4] *= 1.5  # corrupted head
        alpha, _ = fit_growth_exponent(t, r)
        assert alpha == pytest.approx(1.0 / 3.0, abs=1e-8)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(ConfigError):
            fit_growth_exponent([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        with pytest.raises(ConfigError):
            fit_growth_exponent([1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ConfigError):
            fit_growth_exponent([1.0, 2.0, 3.0, 4.0], [1.0, -2.0, 3.0, 4.0])
