"""Evaluate and verify Ramanujan's identity for odd zeta values."""

from .exact import (
    BernoulliCache,
    bernoulli,
    euler_zeta_coefficient,
    fold_symmetry_check,
    lerch_rational_coefficient,
    ramanujan_bernoulli_coeffs,
    zeta_convolution_rational_check,
)
from .identities import (
    IdentityParams,
    IdentityReport,
    QuasiZetaSequences,
    fast_odd_zeta,
    telescope_check,
    verify_convolution_recursion,
    verify_coth_variant,
    verify_lerch,
    verify_ramanujan,
)
from .realseries import Real, SeriesTruncation, lambert_sum, pi, zeta_integer

__version__ = "0.1.0"

__all__ = [
    "BernoulliCache", "bernoulli", "euler_zeta_coefficient", "fold_symmetry_check",
    "lerch_rational_coefficient", "ramanujan_bernoulli_coeffs", "zeta_convolution_rational_check",
    "IdentityParams", "IdentityReport", "QuasiZetaSequences", "fast_odd_zeta", "telescope_check",
    "verify_convolution_recursion", "verify_coth_variant", "verify_lerch", "verify_ramanujan",
    "Real", "SeriesTruncation", "lambert_sum", "pi", "zeta_integer",
]
