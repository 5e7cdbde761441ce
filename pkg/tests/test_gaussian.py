# tests/test_gaussian.py
import math

import numpy as np
import pytest

from field.gaussian import (
    GaussianSolve, center_variance, green_function, harmonic_extension, killed_walk_green,
    richardson, sample_boundary_at_height, sample_free_field, sigma_d_sq, sigma_d_sq_walk,
)
from field.lattice import build_lattice, neighbors
from models.errors import DomainError
from utils.normal import gaussian_tail, gaussian_tail_asymptote, interval_prob, log_mass


class TestHarmonicExtension:
    def test_constant_boundary_gives_constant_field(self):
        lat = build_lattice(3, 4)
        cfg = harmonic_extension(lat, 2.5)
        assert np.allclose(cfg.values, 2.5)

    def test_mean_value_property(self, rng):
        lat = build_lattice(2, 6)
        boundary = rng.normal(size=lat.shape)
        cfg = harmonic_extension(lat, boundary)
        for site in lat.interior_sites():
            avg = np.mean([cfg.at(y) for y in neighbors(lat, site)])
            assert cfg.at(site) == pytest.approx(avg, abs=1e-9)

    def test_iterative_solver_agrees_with_direct(self, rng):
        lat = build_lattice(3, 6)
        rhs = rng.normal(size=lat.n_interior)
        direct = GaussianSolve(lat).solve(rhs)
        iterative = GaussianSolve(lat, direct_max_sites=1).solve(rhs)
        assert np.allclose(direct, iterative, atol=1e-8)


class TestGreenFunction:
    def test_symmetric(self):
        lat = build_lattice(3, 5)
        x, y = (1, 2, 3), (3, 3, 2)
        assert green_function(lat, x, y) == pytest.approx(green_function(lat, y, x), rel=1e-10)

    def test_boundary_site_rejected(self):
        lat = build_lattice(3, 4)
        with pytest.raises(DomainError):
            green_function(lat, (0, 1, 1), (2, 2, 2))

    def test_single_site_variance(self):
        # one interior site in d = 3: precision 6
        assert center_variance(3, 2) == pytest.approx(1.0 / 6.0)

    def test_killed_walk_matches_solver(self):
        lat = build_lattice(3, 6)
        x = lat.center()
        exact = green_function(lat, x, x)
        estimate, se = killed_walk_green(lat, x, x, 20_000, np.random.default_rng(7))
        assert abs(estimate - exact) < 4 * se + 1e-4


class TestFreeFieldSamples:
    def test_empirical_variance(self):
        lat = build_lattice(3, 4)
        solver = GaussianSolve(lat)
        draws = solver.fluctuations(np.random.default_rng(3), size=20_000)
        empirical = draws.var(axis=1)
        exact = solver.diag_variances
        # relative SE of a variance estimate from n normals is sqrt(2/n)
        assert np.all(np.abs(empirical / exact - 1) < 5 * math.sqrt(2 / 20_000))

    def test_sample_keeps_boundary(self, rng):
        lat = build_lattice(2, 5)
        cfg = sample_free_field(lat, -1.0, rng)
        assert np.all(cfg.values[lat.boundary_mask] == -1.0)

    def test_boundary_at_height_is_centred_on_u(self):
        lat = build_lattice(3, 3)
        rng = np.random.default_rng(11)
        means = [sample_boundary_at_height(lat, 4.0, rng)[lat.boundary_mask].mean() for _ in range(200)]
        assert np.mean(means) == pytest.approx(4.0, abs=0.1)

    def test_boundary_at_height_interior_is_u(self, rng):
        lat = build_lattice(3, 3, "centered")
        block = sample_boundary_at_height(lat, 1.5, rng, pad=2)
        assert block.shape == lat.shape
        assert np.all(block[lat.interior_mask] == 1.5)


class TestSigma:
    def test_dimension_two_rejected(self):
        with pytest.raises(DomainError):
            sigma_d_sq(2)

    def test_center_variance_increases_with_box(self):
        values = [center_variance(3, L) for L in (4, 8, 16)]
        assert values[0] < values[1] < values[2]

    def test_richardson_removes_inverse_side(self):
        # c_L = a - b / L is extrapolated exactly in d = 3
        levels = (4, 8, 16)
        values = [0.25 - 0.3 / L for L in levels]
        assert np.allclose(richardson(levels, values, 3), 0.25)

    def test_three_dimensional_value(self):
        est = sigma_d_sq(3)
        assert est.value == pytest.approx(0.2527, abs=0.003)
        assert est.value > max(est.center_variances)
        assert est.walk_normalized == pytest.approx(6 * est.value)

    def test_walk_estimate_agrees(self):
        exact = richardson((8, 16), [center_variance(3, 8), center_variance(3, 16)], 3)[0]
        value, se = sigma_d_sq_walk(3, (8, 16), 20_000, np.random.default_rng(5))
        assert abs(value - exact) < 4 * se + 1e-3


class TestNormalTails:
    def test_tail_and_asymptote(self):
        t = np.array([5.0, 10.0, 20.0])
        ratio = gaussian_tail(t) / gaussian_tail_asymptote(t)
        assert np.all(ratio < 1)
        assert ratio[-1] == pytest.approx(1.0, abs=3e-3)

    def test_log_mass_far_right_tail(self):
        # plain differences of CDFs would return log(0)
        value = log_mass(40.0, 41.0)
        assert np.isfinite(value)
        assert value == pytest.approx(log_mass(-41.0, -40.0))

    def test_interval_prob(self):
        assert interval_prob(-1.0, 1.0) == pytest.approx(0.6826894921, rel=1e-9)
        assert interval_prob(0.0, 1.0, mean=1.0, sd=2.0) == pytest.approx(0.1914624613, rel=1e-9)
