"""
Ample simplicial complexes

Verification, random constructions and finite-field witnesses for r-ample
simplicial complexes, with a reproducible batch command line.
"""

from .core.ampleness import AmpleChallenge, AmpleReport, verify_ample
from .core.iterated_paley import XnpOracle, example13
from .core.random_complex import HashComplexOracle
from .core.simplex_core import ExplicitComplex

__version__ = "1.0.0"
__all__ = [
    "AmpleChallenge",
    "AmpleReport",
    "ExplicitComplex",
    "HashComplexOracle",
    "XnpOracle",
    "example13",
    "verify_ample",
]
