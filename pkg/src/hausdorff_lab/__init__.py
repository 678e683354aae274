"""Hausdorff operators on homogeneous spaces G/K: models, numerics, bounds and atoms."""

from .hardy_atomic import (
    AtomCandidate,
    AtomicDecomposition,
    AtomReport,
    Ball,
    h1_bound,
    k_average_atom,
    make_haar_atom,
    pushforward_atom,
    verify_atom,
)
from .hausdorff_op import apply, cesaro_kernel, discrete_kernel, empirical_opnorm, lp_bound, regularity_profile
from .homogeneous_models import ModelId, make_model
from .numerics import DensityKernel, DiscreteKernel, QuadratureSpec, QuotientFunction, phi_norm_pA

__all__ = [
    "AtomCandidate",
    "AtomicDecomposition",
    "AtomReport",
    "Ball",
    "DensityKernel",
    "DiscreteKernel",
    "ModelId",
    "QuadratureSpec",
    "QuotientFunction",
    "apply",
    "cesaro_kernel",
    "discrete_kernel",
    "empirical_opnorm",
    "h1_bound",
    "k_average_atom",
    "lp_bound",
    "make_haar_atom",
    "make_model",
    "phi_norm_pA",
    "pushforward_atom",
    "regularity_profile",
    "verify_atom",
]
