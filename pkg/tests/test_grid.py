"""Geometry layer: domains, overlap quadrature, ball families, prefix sums."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreykit import (
    Ball,
    ConfigurationError,
    ball_family,
    ball_integral,
    ball_volume,
    family_from_points,
    geometric_ladder,
    make_domain,
    sample,
)
from morreykit.grid import BallMassEvaluator, CumulativeMass, overlap_measures


def indicator_1d(lo, hi):
    return lambda x: ((x >= lo) & (x <= hi)).astype(float)


class TestDomain:
    def test_cell_geometry(self):
        d = make_domain(1, 4.0, 64)
        assert d.cell_size == 0.125
        assert d.cell_volume == 0.125
        assert d.cell_count == 64
        centers = d.axis_centers()
        edges = d.axis_edges()
        assert centers[0] == -4.0 + 0.0625
        assert edges[0] == -4.0 and edges[-1] == 4.0
        assert np.allclose(edges[:-1] + d.cell_size / 2, centers)

    def test_origin_on_edge_never_on_center(self):
        for n in (8, 64, 250):
            d = make_domain(1, 3.0, n)
            assert np.abs(d.axis_centers()).min() > 0

    def test_2d_mesh_shapes(self):
        d = make_domain(2, 2.0, 16)
        gx, gy = d.center_mesh()
        assert gx.shape == (16, 16) and gy.shape == (16, 16)
        assert gx[1, 0] != gx[0, 0] and gy[0, 1] != gy[0, 0]
        assert d.cell_volume == pytest.approx(d.cell_size**2)

    @pytest.mark.parametrize(
        "args",
        [(3, 4.0, 64), (0, 4.0, 64), (1, 0.0, 64), (1, -1.0, 64), (1, 4.0, 7),
         (1, 4.0, 63), (1, 4.0, 4)],
    )
    def test_rejects_bad_configs(self, args):
        with pytest.raises(ConfigurationError):
            make_domain(*args)

    def test_contains_ball(self):
        d = make_domain(1, 4.0, 64)
        assert d.contains_ball((2.0,), 2.0)
        assert not d.contains_ball((2.0,), 2.1)

    def test_cell_index_clamped(self):
        d = make_domain(1, 4.0, 64)
        assert d.cell_index((-4.5,)) == (0,)
        assert d.cell_index((4.5,)) == (63,)
        assert d.cell_index((0.01,)) == (32,)


class TestSampledFunction:
    def test_sample_and_freeze(self):
        d = make_domain(1, 4.0, 64)
        f = sample(lambda x: x**2, d)
        assert f.values.shape == (64,)
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_rejects_nonfinite(self):
        d = make_domain(1, 4.0, 64)
        with pytest.raises(ValueError):
            sample(lambda x: np.where(x > 0, np.nan, 1.0), d)
        with pytest.raises(ValueError):
            sample(lambda x: np.where(x > 3.9, np.inf, 1.0), d)

    def test_scalar_broadcast(self):
        d = make_domain(2, 1.0, 8)
        f = sample(lambda x, y: 3.0, d)
        assert f.values.shape == (8, 8)
        assert np.all(f.values == 3.0)


class TestOverlap1D:
    def test_full_ball_mass_is_length(self):
        d = make_domain(1, 4.0, 64)
        ones = sample(lambda x: np.ones_like(x), d)
        for r in (0.1, 0.33, 1.0, 2.5):
            assert ball_integral(ones, Ball((0.5,), r)) == pytest.approx(
                2 * r, rel=1e-14
            )

    def test_indicator_mass_exact(self):
        d = make_domain(1, 4.0, 256)
        f = sample(indicator_1d(-1.0, 1.0), d)
        # supported cells span exactly [-1, 1] at this resolution
        assert ball_integral(f, Ball((0.0,), 2.0)) == pytest.approx(2.0, rel=1e-14)
        assert ball_integral(f, Ball((0.0,), 0.5)) == pytest.approx(1.0, rel=1e-14)

    def test_out_of_box_rejected(self):
        d = make_domain(1, 4.0, 64)
        ones = sample(lambda x: np.ones_like(x), d)
        with pytest.raises(ValueError):
            ball_integral(ones, Ball((3.5,), 1.0))

    @given(
        center=st.floats(-2.0, 2.0),
        radius=st.floats(0.01, 1.9),
    )
    def test_overlaps_sum_to_ball_volume(self, center, radius):
        d = make_domain(1, 4.0, 128)
        _, ov = overlap_measures(d, Ball((center,), radius))
        assert ov.sum() == pytest.approx(2 * radius, rel=1e-12)

    @given(
        center=st.floats(-1.0, 1.0),
        r1=st.floats(0.05, 1.0),
        grow=st.floats(1.0, 2.0),
    )
    def test_mass_monotone_in_radius(self, center, r1, grow):
        d = make_domain(1, 4.0, 128)
        f = sample(lambda x: np.exp(-x * x), d)
        r2 = min(r1 * grow, 2.9)
        m1 = ball_integral(f, Ball((center,), r1))
        m2 = ball_integral(f, Ball((center,), r2))
        assert m2 >= m1 - 1e-15


class TestOverlap2D:
    def test_ball_area_subsampled(self):
        d = make_domain(2, 2.0, 128)
        ones = sample(lambda x, y: np.ones_like(x), d)
        area = ball_integral(ones, Ball((0.0, 0.0), 1.0))
        assert area == pytest.approx(math.pi, rel=2e-3)

    def test_interior_cells_counted_fully(self):
        d = make_domain(2, 2.0, 32)
        _, ov = overlap_measures(d, Ball((0.0, 0.0), 1.5))
        assert ov.max() == pytest.approx(d.cell_volume, rel=1e-14)


class TestFamilies:
    def test_ball_family_containment(self):
        d = make_domain(1, 4.0, 64)
        fam = ball_family(d, 8, 0.25, 2.0, 5)
        assert len(fam) > 0 and fam.dropped > 0
        for ball in fam:
            assert d.contains_ball(ball.center, ball.radius)

    def test_family_order_is_center_major(self):
        d = make_domain(1, 4.0, 64)
        fam = ball_family(d, 16, 0.25, 2.0, 2)
        pairs = [(b.center[0], b.radius) for b in fam]
        assert pairs == sorted(pairs, key=lambda t: (t[0], t[1]))

    def test_empty_family_rejected(self):
        d = make_domain(1, 4.0, 64)
        with pytest.raises(ConfigurationError):
            family_from_points(d, [(3.9,)], [1.0])

    def test_bad_parameters_rejected(self):
        d = make_domain(1, 4.0, 64)
        with pytest.raises(ConfigurationError):
            ball_family(d, 0, 0.25, 2.0, 5)
        with pytest.raises(ConfigurationError):
            ball_family(d, 8, 0.01, 2.0, 5)  # below cell size
        with pytest.raises(ConfigurationError):
            ball_family(d, 8, 0.25, 1.0, 5)
        with pytest.raises(ConfigurationError):
            ball_family(d, 8, 0.25, 2.0, 0)

    def test_ball_validation(self):
        with pytest.raises(ValueError):
            Ball((0.0,), 0.0)
        with pytest.raises(ValueError):
            Ball((0.0,), -1.0)


class TestPrefixEvaluators:
    @given(
        lo=st.floats(-3.5, 3.0),
        width=st.floats(0.01, 1.0),
    )
    def test_cumulative_matches_direct(self, lo, width):
        d = make_domain(1, 4.0, 128)
        rng = np.random.default_rng(7)
        masses = rng.uniform(0.1, 1.0, d.cell_count)
        cm = CumulativeMass(d, masses)
        hi = lo + width
        f = sample(lambda x: np.ones_like(x), d)
        direct = ball_mass_direct(d, masses, lo, hi)
        assert cm.interval(lo, hi) == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_evaluator_matches_ball_mass(self):
        from morreykit.grid import ball_mass

        d = make_domain(1, 4.0, 128)
        rng = np.random.default_rng(3)
        masses = rng.uniform(0.1, 1.0, d.cell_count)
        ev = BallMassEvaluator(d, masses)
        for center, r in [((0.3,), 0.7), ((-1.2,), 1.1), ((2.0,), 1.5)]:
            assert ev.mass(Ball(center, r)) == pytest.approx(
                ball_mass(d, masses, Ball(center, r)), rel=1e-12
            )

    def test_masses_at_vectorized(self):
        d = make_domain(1, 4.0, 128)
        rng = np.random.default_rng(3)
        masses = rng.uniform(0.1, 1.0, d.cell_count)
        ev = BallMassEvaluator(d, masses)
        radii = np.array([0.25, 0.5, 1.0])
        got = ev.masses_at((0.5,), radii)
        want = [ev.mass(Ball((0.5,), r)) for r in radii]
        assert np.allclose(got, want, rtol=1e-13)

    def test_2d_evaluator_consistency(self):
        from morreykit.grid import ball_mass

        d = make_domain(2, 2.0, 32)
        rng = np.random.default_rng(5)
        masses = rng.uniform(0.1, 1.0, (32, 32))
        ev = BallMassEvaluator(d, masses)
        b = Ball((0.25, -0.5), 0.8)
        assert ev.mass(b) == pytest.approx(ball_mass(d, masses, b), rel=1e-12)


def ball_mass_direct(d, masses, lo, hi):
    """Reference interval mass: proportional allocation, cell by cell."""
    edges = d.axis_edges()
    total = 0.0
    for i in range(d.cell_count):
        e0, e1 = edges[i], edges[i + 1]
        ov = max(0.0, min(hi, e1) - max(lo, e0))
        total += masses[i] * ov / (e1 - e0)
    return total


class TestLadder:
    def test_geomspace_endpoints(self):
        lad = geometric_ladder(0.1, 6.0, 64)
        assert lad[0] == pytest.approx(0.1) and lad[-1] == pytest.approx(6.0)
        ratios = lad[1:] / lad[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-12)

    def test_rejects_bad(self):
        with pytest.raises(ValueError):
            geometric_ladder(1.0, 0.5, 8)
        with pytest.raises(ValueError):
            geometric_ladder(0.1, 6.0, 1)

    def test_ball_volume(self):
        assert ball_volume(1, 2.0) == 4.0
        assert ball_volume(2, 1.5) == pytest.approx(math.pi * 2.25)
