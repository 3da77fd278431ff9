"""Gibbs-state preparation with strong external fields: operators, kernels,
detailed-balance Lindbladians and the locality and contraction checks
around them."""
__version__ = "0.1.0"

from .hamiltonian import LocalHamiltonian, SpecError, chain, random_chain
from .kernels import SiteKernelParams, field_resonant_params

from .qop import Superoperator, gibbs_state
from .report import make_rng

__all__ = [
    "LocalHamiltonian",
    "SiteKernelParams",
    "SpecError",
    "Superoperator",
    "chain",
    "field_resonant_params",
    "gibbs_state",
    "make_rng",
    "random_chain",
]
