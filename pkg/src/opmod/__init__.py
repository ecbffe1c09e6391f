"""Numerical harness for operator differences, commutators and moduli of continuity.

Submodules
----------
linalg_core
    Hermitian eigensolvers, Schatten and Ky Fan norms, matrix I/O.
funcalc
    Functional calculus, finite differences, divided differences.
schur
    Schur products and multiplier-norm lower bounds.
bernstein
    Band-limited functions and Bernstein-type operator inequalities.
besov
    Dyadic (Littlewood-Paley) decompositions on sampled grids.
moduli
    Searches and explicit constructions for operator moduli of continuity.
suites, bundle, cli
    Batch verification suites, witness bundles and the ``opmod`` command.
"""

__version__ = "0.1.0"

from .errors import (AliasingError, BranchAmbiguityWarning, CoincidentNodeError, ConfigError,  # noqa: E402
                     InstanceOverflowError, InvalidInputError, InvalidParameterError, OpmodError,
                     ResolutionError, SchemaError)

__all__ = [
    "__version__", "OpmodError", "InvalidInputError", "InvalidParameterError", "CoincidentNodeError",
    "AliasingError", "ResolutionError", "InstanceOverflowError", "SchemaError", "ConfigError",
    "BranchAmbiguityWarning",
]
