# tests/test_free_energy.py
import math

import numpy as np
import pytest

from estimators.free_energy import (
    McmcSettings, contact_onset, free_energy_TI, log_partition_ti, superadditive_lower_bound,
)
from estimators.oracle import exact_log_Z_small
from field.gaussian import sample_boundary_at_height
from field.model import BoundarySpec, boundary_energy, disorder_values, resolve_boundary
from models.errors import DomainError
from models.models import METHOD_TAGS, EstimateRecord
from utils.rng import derive_seed, make_rng

FAST = McmcSettings(n_samples=3000, burn_in=10, thinning=1)


class TestThermodynamicIntegration:
    def test_single_site_curve_matches_oracle(self, make_params):
        params = make_params(boundary=BoundarySpec("constant", 1.0))
        boundary = resolve_boundary(params)
        omega = np.zeros(params.lattice.shape)

        def interior_log_z(h):
            p = params.replace(h=h)
            return exact_log_Z_small(p) - boundary_energy(p, boundary, omega)

        grid = np.arange(-1.0, 1.0001, 0.25)
        curve = free_energy_TI(params, grid, h_anchor=-1.0, mcmc=FAST)
        assert curve.values[0] == 0.0
        for h, value, se in zip(curve.h_grid, curve.values, curve.std_errors):
            expected = interior_log_z(h) - interior_log_z(-1.0)
            assert value == pytest.approx(expected, abs=4 * se + 3e-3)

    def test_curve_is_monotone(self, make_params):
        params = make_params(boundary=BoundarySpec("constant", 1.0))
        curve = free_energy_TI(params, [-0.5, 0.0, 0.5], h_anchor=-0.5, mcmc=FAST)
        assert curve.is_monotone
        assert np.all(np.diff(curve.values) >= 0)

    def test_anchor_above_grid_rejected(self, make_params):
        with pytest.raises(DomainError):
            free_energy_TI(make_params(), [-1.0, 0.0], h_anchor=0.5, mcmc=FAST)

    def test_disorder_lowers_the_curve(self, make_params):
        grid = np.linspace(-3.0, 1.0, 9)
        mcmc = McmcSettings(n_samples=400, burn_in=20, thinning=1, replicas=4)
        pure = free_energy_TI(make_params(N=3, beta=0.0), grid, mcmc=mcmc)
        disordered = free_energy_TI(make_params(N=3, beta=0.5), grid, mcmc=mcmc)
        slack = 3 * np.hypot(pure.std_errors, disordered.std_errors)
        assert np.all(disordered.values <= pure.values + slack)

    @pytest.mark.parametrize("beta", [0.0, 0.5])
    def test_free_energy_sign_structure(self, make_params, beta):
        params = make_params(N=8, beta=beta)
        grid = [-0.5, -0.1, 0.0, 0.5, 1.0]
        curve = free_energy_TI(params, grid, h_anchor=-0.5,
                               mcmc=McmcSettings(n_samples=300, burn_in=100, thinning=1, replicas=2))
        values = dict(zip(curve.h_grid.tolist(), zip(curve.values, curve.std_errors)))
        at_zero, se_zero = values[0.0]
        for h in (-0.5, -0.1):
            value, se = values[h]
            assert value - at_zero <= 3 * math.hypot(se, se_zero)
        for h in (0.5, 1.0):
            value, se = values[h]
            assert value - at_zero > 3 * math.hypot(se, se_zero)

    def test_onset_window_follows_disorder(self, make_params):
        grid = np.arange(-2.0, 2.001, 0.25)
        mcmc = McmcSettings(n_samples=1000, burn_in=20, thinning=1, replicas=4)
        base = make_params(N=4, boundary=BoundarySpec("constant", 1.5))
        onsets = {}
        for beta in (0.0, 0.5):
            curve = free_energy_TI(base.replace(beta=beta), grid, h_anchor=-2.0, mcmc=mcmc)
            onsets[beta] = contact_onset(curve, threshold=0.05)
        assert onsets[0.0] is not None and onsets[0.5] is not None
        lam = base.law.lam(0.5)
        assert onsets[0.0] - 0.25 <= onsets[0.5] <= onsets[0.0] + lam + 0.25

    def test_contact_onset(self, make_params):
        params = make_params(boundary=BoundarySpec("constant", 2.0))
        curve = free_energy_TI(params, [-2.0, 0.0, 2.0, 4.0], h_anchor=-2.0,
                               mcmc=McmcSettings(n_samples=1000, burn_in=5, thinning=1))
        onset = contact_onset(curve, threshold=0.05)
        assert onset is not None
        assert onset >= 0.0


class TestCouplingIntegration:
    def test_matches_oracle_on_single_site(self, make_params):
        params = make_params(K=1.0, h=0.5, boundary=BoundarySpec("constant", 0.5))
        boundary = resolve_boundary(params)
        omega = np.zeros(params.lattice.shape)
        value, se = log_partition_ti(params, boundary, omega, np.random.default_rng(21), n_nodes=6,
                                     mcmc=McmcSettings(n_samples=2000, burn_in=5, thinning=1))
        assert value == pytest.approx(exact_log_Z_small(params, boundary, omega), abs=4 * se + 1e-3)

    def test_hard_wall_rejected(self, make_params):
        params = make_params()
        with pytest.raises(DomainError):
            log_partition_ti(params, resolve_boundary(params), np.zeros(params.lattice.shape),
                             np.random.default_rng(0))


class TestSuperadditive:
    def test_exact_replicas(self, make_params):
        params = make_params(K=1.0, h=0.3, beta=0.4)
        rec = superadditive_lower_bound(params, u=1.5, replicas=4)
        expected = []
        for r in range(4):
            boundary = sample_boundary_at_height(params.lattice, 1.5, make_rng(params.seed, "superadd", r))
            omega = disorder_values(params, seed=derive_seed(params.seed, "superadd-disorder", r))
            expected.append(exact_log_Z_small(params, boundary, omega) / params.lattice.n_energy)
        assert rec.value == pytest.approx(np.mean(expected), rel=1e-12)
        assert rec.method == "superadd"

    def test_raised_boundary_improves_bound(self, make_params):
        params = make_params(K=1.0, h=math.exp(-6.0))
        low = superadditive_lower_bound(params, u=0.0, replicas=8)
        high = superadditive_lower_bound(params, u=2.5, replicas=8)
        assert high.value > low.value

    def test_bound_stays_below_integrated_curve(self, make_params):
        params = make_params(K=2.0, h=1.0)
        bound = superadditive_lower_bound(params, u=2.0, replicas=16)
        curve = free_energy_TI(params.replace(N=4), np.linspace(-4.0, 1.0, 11), h_anchor=-4.0,
                               mcmc=McmcSettings(n_samples=300, burn_in=20, thinning=1))
        assert bound.value <= curve.values[-1] + 3 * (curve.std_errors[-1] + bound.std_error)


class TestEstimateRecord:
    def test_negative_error_rejected(self):
        with pytest.raises(ValueError):
            EstimateRecord(1.0, -0.1, 10, 1, {}, 0, "ti-h")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            EstimateRecord(1.0, 0.1, 10, 1, {}, 0, "guess")

    def test_every_tag_is_accepted(self):
        for tag in METHOD_TAGS:
            assert EstimateRecord(0.0, 0.0, 1, 1, {}, 0, tag).method == tag
