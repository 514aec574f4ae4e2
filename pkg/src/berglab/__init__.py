"""Numerical laboratory for vector-valued Bergman-type reproducing-kernel spaces.

Concrete model regions (weighted disc, Gaussian plane, bidisc) carry component
spaces of square-summable sequences.  The package builds quadrature rules,
orthonormal coefficient bases, Toeplitz/Hankel/translation operators, and the
compactness and localization diagnostics used by the batch CLI.
"""

__version__ = "0.1.0"

from .spaces import (SpaceSpec, bidisc_space, disc_space, fock_space,
                     involution, kernel_eval, kernel_norm, metric,
                     normalized_kernel_eval, normalized_pairing)
from .quadrature import (MatrixKernelSample, QuadratureRule, build_rule,
                         discretized_norm, rudin_forelli, schur_test)
from .coeffs import (BasisSpec, CoeffFunction, kernel_coeff_vector,
                     random_coeff_function, random_polynomial,
                     scalar_basis_matrix)
from .operators import (BallPart, MatrixSymbol, OperatorMatrix,
                        ball_indicator_symbol, constant_symbol,
                        conjugate_operator, hankel_apply, identity_operator,
                        poly_symbol, pullback_symbol, rank_one,
                        rank_one_toeplitz_sum, toeplitz_matrix,
                        translation_certificate, translation_matrix)
from .analysis import (berezin, berezin_decay_profile,
                       berezin_injectivity_probe, essential_norm_estimate,
                       hankel_rkt_check, rkt_boundedness_check,
                       rkt_product_check, rkt_toeplitz_symbol_check)
from .covering import Covering, build_covering, localization_error

__all__ = [
    "__version__",
    "SpaceSpec", "disc_space", "fock_space", "bidisc_space",
    "kernel_eval", "kernel_norm", "normalized_kernel_eval",
    "normalized_pairing", "involution", "metric",
    "QuadratureRule", "build_rule", "MatrixKernelSample", "schur_test",
    "discretized_norm", "rudin_forelli",
    "BasisSpec", "CoeffFunction", "scalar_basis_matrix", "kernel_coeff_vector",
    "random_coeff_function", "random_polynomial",
    "MatrixSymbol", "BallPart", "OperatorMatrix", "poly_symbol",
    "constant_symbol", "ball_indicator_symbol", "pullback_symbol",
    "identity_operator", "toeplitz_matrix", "translation_matrix",
    "translation_certificate", "conjugate_operator", "hankel_apply",
    "rank_one", "rank_one_toeplitz_sum",
    "berezin", "berezin_decay_profile", "berezin_injectivity_probe",
    "essential_norm_estimate", "rkt_boundedness_check",
    "rkt_toeplitz_symbol_check", "rkt_product_check", "hankel_rkt_check",
    "Covering", "build_covering", "localization_error",
]
