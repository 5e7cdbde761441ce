# tests/test_sampler.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstest, norm

from field.disorder import DisorderLaw
from field.gaussian import sample_free_field
from field.model import BoundarySpec, ModelParams, disorder_values, resolve_boundary
from models.errors import CouplingViolation, DomainError
from sampler.coupling import CoupledLadder, CoupledPair, coupled_sweep
from sampler.gibbs import GibbsChain, site_conditional, sweep
from sampler.probe import marginal_probe
from utils.stats import batch_means_se


def _single_site(K: float) -> ModelParams:
    return ModelParams(d=3, N=2, beta=0.0, h=0.5, K=K, law=DisorderLaw("standard_gaussian"), seed=1)


@settings(max_examples=200, deadline=None)
@given(
    m1=st.floats(-5, 5),
    dm=st.floats(0, 3),
    u=st.floats(0.001, 0.999),
    y=st.floats(-3, 3),
    K=st.sampled_from([0.5, 2.0, float("inf")]),
)
def test_quantile_monotone_in_mean(m1, dm, u, y, K):
    params = _single_site(K)
    nsum = np.array([m1, m1 + dm]) * 6.0
    cond = site_conditional(params, nsum, np.array([y, y]))
    low, high = cond.quantile(np.array([u, u]))
    assert low <= high + 1e-7


@settings(max_examples=200, deadline=None)
@given(
    m=st.floats(-5, 5),
    u1=st.floats(0.001, 0.999),
    du=st.floats(0, 0.5),
    K=st.sampled_from([0.5, float("inf")]),
)
def test_quantile_monotone_in_uniform(m, u1, du, K):
    params = _single_site(K)
    u2 = min(u1 + du, 0.999)
    cond = site_conditional(params, np.array([6.0 * m, 6.0 * m]), np.array([0.3, 0.3]))
    low, high = cond.quantile(np.array([u1, u2]))
    assert low <= high + 1e-7


def test_conditional_probabilities(make_params):
    params = make_params(K=1.0, h=0.5)
    cond = site_conditional(params, np.array([3.0]), np.array([0.5]))
    s = 1 / math.sqrt(6)
    weights = np.array([
        math.exp(-1.0) * norm.cdf(-0.5 / s),
        math.exp(0.5) * (norm.cdf(0.5 / s) - norm.cdf(-0.5 / s)),
        norm.sf(0.5 / s),
    ])
    assert np.allclose(cond.probabilities[0], weights / weights.sum())


def _mixture_cdf(cond, m: float):
    """CDF of the three-interval mixture for a single conditional mean m"""
    s, a = cond.sd, cond.window
    p_below, p_contact, p_above = cond.probabilities[0]
    f0, f1 = norm.cdf(-m / s), norm.cdf((a - m) / s)

    def cdf(t):
        ft = norm.cdf((np.asarray(t) - m) / s)
        below = p_below * np.clip(ft / f0, 0.0, 1.0) if f0 > 0 else 0.0
        contact = p_contact * np.clip((ft - f0) / (f1 - f0), 0.0, 1.0)
        above = p_above * np.clip((ft - f1) / (1.0 - f1), 0.0, 1.0)
        return below + contact + above

    return cdf


@pytest.mark.parametrize("K", [1.0, float("inf")])
def test_conditional_samples_match_mixture_cdf(make_params, K):
    n = 100_000
    params = make_params(K=K, h=0.5)
    cond = site_conditional(params, np.full(n, 2.4), np.full(n, 0.5))
    samples = cond.quantile(np.random.default_rng(17).random(n))
    result = kstest(samples, _mixture_cdf(cond, 0.4))
    assert result.statistic < 0.01


def test_no_field_no_wall_is_plain_gaussian(make_params):
    params = make_params(beta=0.0, h=0.0, K=0.0)
    m = np.array([-0.7, 0.2, 1.4])
    cond = site_conditional(params, 6.0 * m, np.zeros(3))
    s = 1 / math.sqrt(6)
    masses = np.stack([norm.cdf(-m / s), norm.cdf((1 - m) / s) - norm.cdf(-m / s), norm.sf((1 - m) / s)], axis=1)
    assert np.allclose(cond.probabilities, masses, atol=1e-12)
    u = np.array([0.1, 0.5, 0.9])
    assert np.allclose(cond.quantile(u), norm.ppf(u, m, s), atol=1e-8)


class TestGibbsChain:
    def test_hard_wall_keeps_heights_nonnegative(self, make_params):
        params = make_params(N=4, h=0.0)
        chain = GibbsChain(params, np.random.default_rng(1))
        for values in chain.samples(50, burn_in=10, thinning=1):
            assert values[params.lattice.interior_slice].min() >= 0.0

    def test_boundary_is_never_touched(self, make_params):
        params = make_params(N=4, K=1.0, boundary=BoundarySpec("constant", -0.5))
        chain = GibbsChain(params, np.random.default_rng(2))
        chain.run(20)
        assert np.all(chain.values[params.lattice.boundary_mask] == -0.5)

    def test_same_seed_same_trajectory(self, make_params):
        params = make_params(N=4, beta=0.5)
        a = GibbsChain(params, np.random.default_rng(3))
        b = GibbsChain(params, np.random.default_rng(3))
        a.run(15)
        b.run(15)
        assert np.array_equal(a.values, b.values)

    def test_colour_update_leaves_other_colour(self, make_params):
        params = make_params(N=4, K=1.0)
        chain = GibbsChain(params, np.random.default_rng(5))
        zero, one = chain.color_mask(0), chain.color_mask(1)
        assert not np.any(zero & one)
        assert np.all(zero | one)
        before = chain.interior.copy()
        chain.update_color(0, np.full(params.lattice.interior_shape, 0.5))
        assert np.array_equal(chain.interior[one], before[one])

    def test_free_law_is_preserved(self, make_params):
        # no pinning, no wall: the heat bath targets the plain free field
        params = make_params(N=3, beta=0.0, h=0.0, K=0.0)
        lattice = params.lattice
        site = lattice.array_index((1, 1, 1))
        chain = GibbsChain(params, np.random.default_rng(12), init=np.zeros(lattice.interior_shape))
        trace = np.array([v[site] for v in chain.samples(4000, burn_in=50, thinning=2)])
        rng = np.random.default_rng(13)
        free = np.array([sample_free_field(lattice, 0.0, rng).values[site] for _ in range(4000)])
        for moment in (1, 2):
            a, b = trace ** moment, free ** moment
            se = math.hypot(batch_means_se(a), b.std(ddof=1) / math.sqrt(b.size))
            assert a.mean() == pytest.approx(b.mean(), abs=4 * se)

    def test_sweep_counts(self, make_params):
        chain = GibbsChain(make_params(N=3), np.random.default_rng(3))
        assert sweep(sweep(chain)).sweeps == 2

    def test_single_site_law(self, make_params):
        # one free site: every sweep is an exact draw of its conditional law
        params = make_params(h=0.5, boundary=BoundarySpec("constant", 1.0))
        chain = GibbsChain(params, np.random.default_rng(4))
        contacts = [float(0 <= v[1, 1, 1] <= 1) for v in chain.samples(4000, burn_in=1, thinning=1)]
        s = 1 / math.sqrt(6)
        p_contact = math.exp(0.5) * (norm.cdf(0.0) - norm.cdf(-1 / s))
        expected = p_contact / (p_contact + 0.5)
        se = math.sqrt(expected * (1 - expected) / 4000)
        assert np.mean(contacts) == pytest.approx(expected, abs=4 * se)

    def test_coupling_out_of_range(self, make_params):
        with pytest.raises(DomainError):
            GibbsChain(make_params(K=1.0), np.random.default_rng(0), coupling=1.5)


class TestCoupling:
    def test_shifted_boundaries_stay_ordered(self, make_params):
        params = make_params(N=4, K=1.0, beta=0.5)
        omega = disorder_values(params)
        rng = np.random.default_rng(5)
        upper = GibbsChain(params, rng, resolve_boundary(params), omega, init=np.zeros(params.lattice.interior_shape))
        low_params = params.replace(boundary=BoundarySpec("constant", -1.0))
        lower = GibbsChain(low_params, rng, resolve_boundary(low_params), omega,
                           init=np.full(params.lattice.interior_shape, -1.0))
        pair = CoupledPair(upper, lower, rng)
        for _ in range(100):
            coupled_sweep(pair)
        assert np.all(pair.upper.values >= pair.lower.values - 1e-9)

    def test_unordered_start_rejected(self, make_params):
        params = make_params(N=3, K=1.0)
        rng = np.random.default_rng(6)
        upper = GibbsChain(params, rng, init=np.zeros(params.lattice.interior_shape))
        lower = GibbsChain(params, rng, init=np.ones(params.lattice.interior_shape))
        with pytest.raises(DomainError):
            CoupledPair(upper, lower, rng)

    def test_order_check_detects_violation(self, make_params):
        params = make_params(N=3, K=1.0)
        rng = np.random.default_rng(7)
        upper = GibbsChain(params, rng, init=np.ones(params.lattice.interior_shape))
        lower = GibbsChain(params, rng, init=np.zeros(params.lattice.interior_shape))
        pair = CoupledPair(upper, lower, rng)
        lower.values[params.lattice.interior_slice] = 5.0
        with pytest.raises(CouplingViolation):
            pair.check_order()

    def test_nested_boxes_need_hard_wall(self, make_params):
        rng = np.random.default_rng(8)
        big = make_params(N=4, K=1.0, origin_mode="centered")
        small = big.replace(N=2)
        zero = np.zeros
        with pytest.raises(DomainError):
            CoupledLadder([
                GibbsChain(big, rng, init=zero(big.lattice.interior_shape)),
                GibbsChain(small, rng, init=zero(small.lattice.interior_shape)),
            ], rng)

    def test_nested_boxes_stay_ordered(self, make_params):
        rng = np.random.default_rng(9)
        big = make_params(N=4, h=0.2, origin_mode="centered")
        small = big.replace(N=2)
        ladder = CoupledLadder([
            GibbsChain(big, rng, init=np.zeros(big.lattice.interior_shape)),
            GibbsChain(small, rng, init=np.zeros(small.lattice.interior_shape)),
        ], rng)
        for _ in range(50):
            ladder.sweep()
            ladder.check_order()


def test_marginal_probe_orders_box_sizes(make_params):
    params = make_params(h=0.0, origin_mode="centered")
    probe = marginal_probe(
        params, (0, 0, 0), [2, 3, 4], [0.5, 1.0, 2.0],
        n_samples=300, burn_in=20, thinning=1, seed=11,
    )
    assert list(probe.N_list) == [2, 3, 4]
    assert probe.coupled
    assert probe.is_monotone(n_se=3.0)
    assert probe.mean_height[-1] >= probe.mean_height[0]


def test_pinned_marginal_stabilizes(make_params):
    params = make_params(h=0.5, origin_mode="centered")
    result = marginal_probe(
        params, (0, 0, 0), [8, 12], [0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
        n_samples=2000, burn_in=200, thinning=1, seed=31,
    )
    assert result.coupled
    assert result.sup_distance[0] < 0.03


def test_repelled_marginal_escapes(make_params):
    params = make_params(h=-0.5, origin_mode="centered")
    result = marginal_probe(
        params, (0, 0, 0), [2, 8], [1.0],
        n_samples=1500, burn_in=300, thinning=1, seed=32,
    )
    small, large = result.cdf[0, 0], result.cdf[1, 0]
    assert large < small - 3 * math.hypot(result.cdf_se[0, 0], result.cdf_se[1, 0])
    assert result.mean_height[1] > result.mean_height[0]
