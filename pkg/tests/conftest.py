# tests/conftest.py
import os
import sys

import numpy as np
import pytest

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from field.disorder import DisorderLaw  # noqa: E402
from field.model import BoundarySpec, ModelParams  # noqa: E402


@pytest.fixture
def gaussian_law():
    return DisorderLaw("standard_gaussian")


@pytest.fixture
def make_params():
    """ModelParams factory with small-box defaults (d=3, N=2: one interior site)"""
    def factory(**changes):
        base = dict(
            d=3, N=2, beta=0.0, h=0.5, K=float("inf"),
            law=DisorderLaw("standard_gaussian"), seed=1234,
            boundary=BoundarySpec("constant", 0.0),
        )
        base.update(changes)
        return ModelParams(**base)
    return factory


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
