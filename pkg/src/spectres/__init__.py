"""Exact n-dimensional spectral resolutions, observables, lifts and joints."""
from .algebra import Algebra, AlgebraError, AlgebraMismatch, UnsupportedOperation
from .cuboids import Chain, Cuboid, chain_eval, vertex
from .joint import (ComposedResolution, claim_volume, counterexample, delta_volume, group_joint,
                    marginal_and_bound_checks, meet_joint, odot_joint, odot_search, product_joint)
from .lifting import GridSpec, PartialLift, SigmaHom, lift_spectral, lp_oracle, partial_lift
from .observable import (BlockSet, InvalidResolution, Observable, State, measure, moment,
                         observable_to_spectral, spectral_to_observable)
from .spectral import (DiscreteSpectralResolution, ExtendedBlock, TabulatedResolution,
                       check_spectral_resolution, volume)

__version__ = "0.1.0"

__all__ = [
    "Algebra", "AlgebraError", "AlgebraMismatch", "BlockSet", "Chain", "ComposedResolution",
    "Cuboid", "DiscreteSpectralResolution", "ExtendedBlock", "GridSpec", "InvalidResolution",
    "Observable", "PartialLift", "SigmaHom", "State", "TabulatedResolution",
    "UnsupportedOperation", "chain_eval", "check_spectral_resolution", "claim_volume",
    "counterexample", "delta_volume", "group_joint", "lift_spectral", "lp_oracle",
    "marginal_and_bound_checks", "measure", "meet_joint", "moment", "observable_to_spectral",
    "odot_joint", "odot_search", "partial_lift", "product_joint", "spectral_to_observable",
    "vertex", "volume",
]
