"""
Shared fixtures for the ample-complex test suite.
"""

from pathlib import Path

import pytest

from ample_system.core.finite_field import FieldCtx
from ample_system.core.iterated_paley import example13
from ample_system.core.settings import Settings
from ample_system.core.simplex_core import ExplicitComplex, from_facets

FIXTURES = Path(__file__).parent / "fixtures"



@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture(scope="session")
def x13() -> ExplicitComplex:
    return example13()


@pytest.fixture
def example13_path() -> Path:
    return FIXTURES / "example13.json"


@pytest.fixture
def hollow_triangle() -> ExplicitComplex:
    return from_facets(range(3), [(0, 1), (0, 2), (1, 2)], 2)


@pytest.fixture
def full_triangle() -> ExplicitComplex:
    return from_facets(range(3), [(0, 1, 2)], 2)


@pytest.fixture(scope="session")
def ctx13() -> FieldCtx:
    return FieldCtx.create(13, 3, 2)
