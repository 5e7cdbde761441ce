# tests/test_reduced.py
import math

import numpy as np
import pytest
from scipy.stats import norm

from estimators.oracle import exact_log_Z_small
from estimators.reduced import reduced_Q, second_moment_report
from field.model import BoundarySpec, disorder_values, site_rewards
from models.errors import DomainError

S = 1 / math.sqrt(6)


def test_single_site_closed_form(make_params):
    params = make_params(beta=0.5, h=0.3, K=2.0, boundary=BoundarySpec("constant", 3.0))
    omega = disorder_values(params)
    result = reduced_Q(params, 3.0, omega, 500, np.random.default_rng(1))
    y = site_rewards(params, omega)[1, 1, 1]
    p_contact = norm.cdf(-2 / S) - norm.cdf(-3 / S)
    p_low = norm.cdf(-2 / S)
    assert result.value == pytest.approx(1 - p_low + math.exp(y) * p_contact, rel=1e-9)
    assert result.in_good_event


def test_reduced_partition_below_full(make_params):
    params = make_params(beta=0.5, h=0.3, K=2.0, boundary=BoundarySpec("constant", 3.0))
    omega = disorder_values(params)
    result = reduced_Q(params, 3.0, omega, 500, np.random.default_rng(2))
    assert result.value <= math.exp(exact_log_Z_small(params, 3.0, omega)) * (1 + 1e-12)


def test_probabilities_are_consistent(make_params):
    params = make_params(N=3, beta=0.5, h=0.2, K=1.0, boundary=BoundarySpec("constant", 2.5))
    result = reduced_Q(params, 2.5, None, 2000, np.random.default_rng(3))
    assert 0.0 <= result.p_none <= 1.0
    assert np.all(result.p_single <= result.p_contact + 1e-12)
    slack = 4 * (result.p_none_se + result.p_single_se.sum()) + 1e-6
    assert result.p_none + result.p_single.sum() <= 1.0 + slack
    assert result.value > 0


def test_two_low_fixed_sites_block(make_params):
    params = make_params(K=1.0, boundary=BoundarySpec("constant", 0.5))
    result = reduced_Q(params, 0.5, None, 100, np.random.default_rng(4))
    assert result.blocked
    assert result.value == 0.0


def test_other_windows_rejected(make_params):
    params = make_params(window=2.0)
    with pytest.raises(DomainError):
        reduced_Q(params, 3.0, None, 10, np.random.default_rng(0))


class TestSecondMoment:
    def test_no_disorder_no_variance(self, make_params):
        params = make_params(h=0.3, K=1.0, boundary=BoundarySpec("constant", 1.5))
        report = second_moment_report(params, 1.5, replicas=20, n_samples=200, rng=np.random.default_rng(5))
        assert report.variance == pytest.approx(0.0, abs=1e-20)
        assert report.bound_holds

    def test_single_site_variance(self, make_params):
        params = make_params(beta=0.5, h=0.3, K=1.0, boundary=BoundarySpec("constant", 1.5))
        report = second_moment_report(params, 1.5, replicas=400, n_samples=200, rng=np.random.default_rng(6))
        p_contact = norm.cdf(-0.5 / S) - norm.cdf(-1.5 / S)
        analytic = math.exp(0.6) * math.expm1(0.25) * p_contact ** 2
        assert report.analytic_variance == pytest.approx(analytic, rel=1e-9)
        assert report.analytic_variance <= report.variance_bound * (1 + 1e-12)
        assert report.variance == pytest.approx(analytic, abs=4 * report.variance_se)
        assert report.bound_holds

    def test_first_moment_sandwich(self, make_params):
        params = make_params(beta=0.5, h=0.3, K=1.0, boundary=BoundarySpec("constant", 1.5))
        report = second_moment_report(params, 1.5, replicas=50, n_samples=200, rng=np.random.default_rng(7))
        assert report.sandwich_lower <= report.analytic_mean_q_minus_1 <= report.sandwich_upper + 1e-12

    def test_needs_two_replicas(self, make_params):
        with pytest.raises(DomainError):
            second_moment_report(make_params(), 3.0, replicas=1, n_samples=10, rng=np.random.default_rng(0))

    def test_variance_bound_on_larger_box(self, make_params):
        params = make_params(N=4, beta=0.5, h=0.3, K=1.0, boundary=BoundarySpec("constant", 1.5))
        report = second_moment_report(params, 1.5, replicas=200, n_samples=300, rng=np.random.default_rng(8))
        assert report.analytic_variance <= report.variance_bound * (1 + 1e-12)
        assert report.bound_holds
        assert report.variance == pytest.approx(report.analytic_variance, abs=4 * report.variance_se + 1e-12)
