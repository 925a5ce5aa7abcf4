"""Exact-arithmetic involutivity analysis for tableau-defined PDE systems.

The package computes prolongations, Cartan characters, Spencer cohomology,
harmonic decompositions and normal forms of linear tableaux, builds the
quotient-space and harmonic-map example systems, and solves the associated
first-order systems by formal power series from Cauchy data along a flag.

Everything is done over the rationals with fractions.Fraction, so results
are exact and reproducible.
"""

from __future__ import annotations

from .errors import (
    BadDecomposition,
    CapExceeded,
    DimensionMismatch,
    Inconsistent,
    InconsistentData,
    InputError,
    InvolutiveError,
    JacobiViolation,
    NotInImage,
    NotInvolutive,
    NotRegular,
    NotTwoAcyclic,
    StructureViolation,
    UnstableGenericity,
)

__version__ = "0.1.0"

__all__ = [
    "BadDecomposition",
    "CapExceeded",
    "DimensionMismatch",
    "Inconsistent",
    "InconsistentData",
    "InputError",
    "InvolutiveError",
    "JacobiViolation",
    "NotInImage",
    "NotInvolutive",
    "NotRegular",
    "NotTwoAcyclic",
    "StructureViolation",
    "UnstableGenericity",
    "__version__",
]
