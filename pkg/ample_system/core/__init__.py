"""
Core components of the ample-complex toolkit.
"""

from .ampleness import AmpleChallenge, AmpleReport, find_witness, verify_ample
from .errors import AmpleError, BudgetExceededError, ComplexInputError
from .iterated_paley import WitnessProblem, XnpOracle, example13, solve_witness
from .random_complex import HashComplexOracle, ProbProfile, sample_explicit
from .settings import Settings, load_settings
from .simplex_core import ComplexView, ExplicitComplex, from_facets

__all__ = [
    "AmpleChallenge",
    "AmpleReport",
    "AmpleError",
    "BudgetExceededError",
    "ComplexInputError",
    "ComplexView",
    "ExplicitComplex",
    "HashComplexOracle",
    "ProbProfile",
    "Settings",
    "WitnessProblem",
    "XnpOracle",
    "example13",
    "find_witness",
    "from_facets",
    "load_settings",
    "sample_explicit",
    "solve_witness",
    "verify_ample",
]
