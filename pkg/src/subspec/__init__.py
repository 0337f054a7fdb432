"""subspec: spectral analysis of primitive aperiodic substitutions.

Exact combinatorics of substitutions, symbolic/algebraic classification,
the spectral cocycle with matrix Riesz-product densities, Lyapunov-exponent
estimation, and a reproducible CLI.
"""

__version__ = "0.1.0"

from ._kernels import backend_name as kernel_backend
from .errors import NumericalError, PreconditionError, RuleError, SubspecError
from .substitution import (
    Substitution,
    SuspensionParams,
    parse_substitution,
    substitution_matrix,
    is_primitive,
    perron_data,
    fixed_point_prefix,
    aperiodicity_verdict,
    return_words,
    good_return_words,
    population_vector,
    tiling_length,
)

__all__ = [
    "Substitution",
    "SuspensionParams",
    "parse_substitution",
    "substitution_matrix",
    "is_primitive",
    "perron_data",
    "fixed_point_prefix",
    "aperiodicity_verdict",
    "return_words",
    "good_return_words",
    "population_vector",
    "tiling_length",
    "SubspecError",
    "RuleError",
    "PreconditionError",
    "NumericalError",
    "kernel_backend",
]
