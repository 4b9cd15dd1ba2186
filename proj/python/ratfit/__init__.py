"""Rational approximation on scattered data.

Thin wrapper over the C++ core: stabilized Sanathanan-Koerner iteration on
discrete orthonormal (Vandermonde-with-Arnoldi) polynomial bases.
"""

from ._core import (
    BreakdownError,
    MultiIndexSet,
    ParseError,
    RationalFit,
    arnoldi_basis,
    fit_linearized,
    fit_sk,
    fit_stabilized_sk,
    gen_abs,
    gen_exp,
    gen_exp2d,
    gen_penzl1,
    gen_penzl2,
    gen_tan,
)

__all__ = [
    "BreakdownError",
    "MultiIndexSet",
    "ParseError",
    "RationalFit",
    "arnoldi_basis",
    "fit_linearized",
    "fit_sk",
    "fit_stabilized_sk",
    "gen_abs",
    "gen_exp",
    "gen_exp2d",
    "gen_penzl1",
    "gen_penzl2",
    "gen_tan",
]

__version__ = "0.1.0"
