# tests/test_oracle.py
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import multivariate_normal, norm

from estimators.free_energy import McmcSettings, contact_density
from estimators.oracle import (
    annealed_log_Z, exact_log_Z_small, exact_reduced_Q_small, quenched_log_Z_single_site,
)
from estimators.reduced import reduced_Q
from field.disorder import DisorderLaw
from field.model import BoundarySpec, boundary_energy, disorder_values, resolve_boundary, site_rewards
from models.errors import OracleRefused


def _site_factor_pieces(y: float, K: float):
    pieces = [(0.0, 1.0, math.exp(y)), (1.0, math.inf, 1.0)]
    if not math.isinf(K):
        pieces.append((-math.inf, 0.0, math.exp(-K)))
    return pieces


def test_single_site_closed_form(make_params):
    params = make_params(h=1.0)
    s = 1 / math.sqrt(6)
    interior = norm.sf(1 / s) + math.e * (0.5 - norm.cdf(-1 / s))
    # the seven fixed sites of the window sit at height 0: contacts worth h each
    assert exact_log_Z_small(params) == pytest.approx(7.0 + math.log(interior), rel=1e-10)


def test_two_sites_against_double_integral(make_params):
    params = make_params(d=1, N=3, K=0.7, h=0.4, boundary=BoundarySpec("constant", 2.0))
    mean = np.array([2.0, 2.0])
    cov = np.array([[2.0, 1.0], [1.0, 2.0]]) / 3.0
    pdf = multivariate_normal(mean, cov).pdf
    lo_cut, hi_cut = 2.0 - 12.0, 2.0 + 12.0
    total = 0.0
    for a1, b1, w1 in _site_factor_pieces(0.4, 0.7):
        for a2, b2, w2 in _site_factor_pieces(0.4, 0.7):
            value, _ = integrate.dblquad(
                lambda x2, x1: pdf([x1, x2]),
                max(a1, lo_cut), min(b1, hi_cut),
                max(a2, lo_cut), min(b2, hi_cut),
                epsabs=1e-12, epsrel=1e-10,
            )
            total += w1 * w2 * value
    assert exact_log_Z_small(params) == pytest.approx(math.log(total), abs=1e-7)


def test_three_sites_against_monte_carlo(make_params):
    params = make_params(d=1, N=4, K=1.0, h=0.8, boundary=BoundarySpec("constant", 0.5))
    lattice = params.lattice
    Q = lattice.dirichlet_laplacian().toarray()
    cov = np.linalg.inv(Q)
    boundary = resolve_boundary(params)
    mean = cov @ lattice.boundary_drive(boundary)
    x = np.random.default_rng(12).multivariate_normal(mean, cov, size=400_000)
    weights = np.where(x < 0, math.exp(-1.0), np.where(x <= 1, math.exp(0.8), 1.0)).prod(axis=1)
    const = boundary_energy(params, boundary, np.zeros(lattice.shape))
    estimate = weights.mean()
    se = weights.std(ddof=1) / math.sqrt(weights.size)
    exact = math.exp(exact_log_Z_small(params) - const)
    assert exact == pytest.approx(estimate, abs=4 * se)


def test_refuses_large_boxes(make_params):
    with pytest.raises(OracleRefused):
        exact_log_Z_small(make_params(N=3))


def test_hard_wall_with_negative_fixed_site(make_params):
    params = make_params(boundary=BoundarySpec("constant", -0.5))
    assert exact_log_Z_small(params) == -math.inf


def test_annealed_dominates_quenched(make_params):
    params = make_params(beta=0.8, h=0.2, K=2.0, boundary=BoundarySpec("constant", 0.5))
    assert annealed_log_Z(params) >= quenched_log_Z_single_site(params)


def test_without_disorder_all_oracles_agree(make_params):
    params = make_params(h=0.3, K=1.0, boundary=BoundarySpec("constant", 0.5))
    exact = exact_log_Z_small(params)
    assert annealed_log_Z(params) == pytest.approx(exact, rel=1e-10)
    assert quenched_log_Z_single_site(params) == pytest.approx(exact, rel=1e-10)


def test_quenched_matches_disorder_average(make_params):
    params = make_params(beta=0.6, h=0.2, K=1.5, boundary=BoundarySpec("constant", 0.5))
    law = DisorderLaw("standard_gaussian")
    rng = np.random.default_rng(3)
    samples = np.array([
        exact_log_Z_small(params, omega=law.sample(rng, params.lattice.shape)) for _ in range(3000)
    ])
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    assert quenched_log_Z_single_site(params) == pytest.approx(samples.mean(), abs=4 * se)


def test_contact_density_matches_derivative(make_params):
    params = make_params(h=0.5, boundary=BoundarySpec("constant", 1.0))
    boundary = resolve_boundary(params)
    omega = np.zeros(params.lattice.shape)

    def interior_log_z(h):
        p = params.replace(h=h)
        return exact_log_Z_small(p) - boundary_energy(p, boundary, omega)

    eps = 1e-4
    derivative = (interior_log_z(0.5 + eps) - interior_log_z(0.5 - eps)) / (2 * eps)
    rec = contact_density(params, McmcSettings(n_samples=3000, burn_in=5, thinning=1))
    assert rec.method == "mcmc-contact"
    assert rec.value == pytest.approx(derivative, abs=4 * rec.std_error + 1e-3)


def test_no_field_no_wall_is_free(make_params):
    params = make_params(beta=0.0, h=0.0, K=0.0)
    assert exact_log_Z_small(params) == pytest.approx(0.0, abs=1e-9)


class TestReducedOracle:
    def test_single_site_closed_form(self, make_params):
        params = make_params(beta=0.5, h=0.3, K=2.0, boundary=BoundarySpec("constant", 3.0))
        omega = disorder_values(params)
        y = site_rewards(params, omega)[1, 1, 1]
        s = 1 / math.sqrt(6)
        expected = norm.sf(-2 / s) + math.exp(y) * (norm.cdf(-2 / s) - norm.cdf(-3 / s))
        assert exact_reduced_Q_small(params, 3.0, omega) == pytest.approx(expected, rel=1e-10)

    def test_blocked_by_low_fixed_sites(self, make_params):
        assert exact_reduced_Q_small(make_params(K=1.0), 0.5) == 0.0

    def test_three_sites_against_sampling(self, make_params):
        params = make_params(d=1, N=4, beta=0.5, h=0.2, K=1.0, boundary=BoundarySpec("constant", 1.5))
        omega = disorder_values(params)
        rec = reduced_Q(params, 1.5, omega, 20_000, np.random.default_rng(9))
        exact = exact_reduced_Q_small(params, 1.5, omega)
        assert rec.value == pytest.approx(exact, abs=4 * rec.std_error + 1e-9)
