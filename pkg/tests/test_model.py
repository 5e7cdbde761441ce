# tests/test_model.py
import math

import numpy as np
import pytest

from field.disorder import DisorderLaw
from field.gaussian import FieldConfig, boundary_array
from field.model import (
    BoundarySpec, boundary_energy, disorder_values, generalized_indicator, log_weight,
    resolve_boundary, site_indicators, site_rewards,
)
from models.errors import DomainError


def test_validation_lists_every_problem(make_params):
    with pytest.raises(DomainError) as exc:
        make_params(K=-1.0, window=-1.0)
    message = str(exc.value)
    assert "K must" in message
    assert "window" in message


def test_beta_outside_law_domain(make_params):
    with pytest.raises(DomainError):
        make_params(law=DisorderLaw("shifted_exponential"), beta=1.0)


def test_site_indicators():
    ind = site_indicators(np.array([-0.5, 0.0, 0.7, 1.0, 1.2]))
    assert ind.delta.tolist() == [False, True, True, True, False]
    assert ind.rho.tolist() == [True, False, False, False, False]
    assert ind.rho_plus.tolist() == [True, True, True, True, False]


def test_generalized_indicator():
    values = generalized_indicator(2.0, 3.0, [-1.0, 1.5, 2.5])
    assert values.tolist() == [0.0, 3.0, 0.0]
    with pytest.raises(DomainError):
        generalized_indicator(0.0, 1.0, 0.5)


def test_rewards_without_disorder(make_params):
    params = make_params(h=0.7)
    omega = disorder_values(params)
    assert np.all(omega == 0)
    assert np.allclose(site_rewards(params, omega), 0.7)


def test_rewards_are_centred(make_params):
    params = make_params(beta=0.5, N=6)
    omega = disorder_values(params)
    y = site_rewards(params, omega)
    assert np.allclose(y, 0.5 * omega - 0.125 + params.h)


class TestLogWeight:
    def test_hard_wall_excludes_negative_heights(self, make_params):
        params = make_params()
        values = boundary_array(params.lattice, 2.0)
        values[1, 1, 1] = -0.1
        assert log_weight(params, FieldConfig(params.lattice, values)) == -math.inf

    def test_soft_wall_penalty(self, make_params):
        params = make_params(K=1.5, h=0.3)
        values = boundary_array(params.lattice, 2.0)
        values[1, 1, 1] = -0.1
        assert log_weight(params, FieldConfig(params.lattice, values)) == pytest.approx(-1.5)
        values[1, 1, 1] = 0.4
        assert log_weight(params, FieldConfig(params.lattice, values)) == pytest.approx(0.3)

    def test_boundary_contacts_in_window(self, make_params):
        # boundary at 0.5: the seven fixed sites of the window are all in contact
        params = make_params(h=1.0, boundary=BoundarySpec("constant", 0.5))
        boundary = resolve_boundary(params)
        assert boundary_energy(params, boundary, disorder_values(params)) == pytest.approx(7.0)

    def test_lower_faces_do_not_count(self, make_params):
        params = make_params(K=2.0)
        values = boundary_array(params.lattice, 3.0)
        values[0, :, :] = -1.0
        values[1, 1, 1] = 3.0
        assert log_weight(params, FieldConfig(params.lattice, values)) == 0.0


def test_sampled_boundary_needs_rng(make_params):
    params = make_params(boundary=BoundarySpec("sampled", 2.0))
    with pytest.raises(DomainError):
        resolve_boundary(params)
    values = resolve_boundary(params, np.random.default_rng(0))
    assert values.shape == params.lattice.shape
