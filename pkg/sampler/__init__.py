# sampler/__init__.py
"""Heat-bath sampling, monotone coupling and the marginal probe"""

from .gibbs import SiteConditional, GibbsChain, site_conditional, sweep, DEFAULT_BURN_IN, DEFAULT_THINNING
from .coupling import CoupledLadder, CoupledPair, coupled_sweep
from .probe import MarginalProbe, marginal_probe

__all__ = [
    'SiteConditional', 'GibbsChain', 'site_conditional', 'sweep', 'DEFAULT_BURN_IN', 'DEFAULT_THINNING',
    'CoupledLadder', 'CoupledPair', 'coupled_sweep',
    'MarginalProbe', 'marginal_probe',
]
