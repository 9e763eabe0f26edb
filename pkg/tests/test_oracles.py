"""
Tests for oracle spec strings.
"""

import pytest

from ample_system.cli.oracles import OracleSpec, parse_field, require_explicit
from ample_system.core.errors import ComplexInputError
from ample_system.core.iterated_paley import XnpOracle, example13
from ample_system.core.random_complex import HashComplexOracle, ProbProfile, sample_explicit
from ample_system.core.simplex_core import ExplicitComplex


@pytest.mark.parametrize(
    "text,canonical",
    [
        ("hash:n=100", "hash:n=100,p=0.5,dim=2,seed=0"),
        ("hash:seed=3, n=64 ,p=.25", "hash:n=64,p=0.25,dim=2,seed=3"),
        ("random:n=8,p=1", "random:n=8,p=1.0,dim=2,seed=0"),
        ("xnp:n=13,p=3", "xnp:n=13,p=3,dim=2"),
        ("xnp:n=13,p=3,g=2,dim=3", "xnp:n=13,p=3,g=2,dim=3"),
        ("paley:q=13", "paley:q=13"),
        ("example13", "example13"),
    ],
)
def test_canonical_form(text, canonical):
    spec = OracleSpec.parse(text)
    assert spec.canonical() == canonical
    assert OracleSpec.parse(canonical) == spec


@pytest.mark.parametrize(
    "text",
    ["bogus", "hash:", "hash:n=5,zzz=1", "hash:n=abc", "hash:n", "field:n=13,p=3", "file:", "nope:q=1"],
)
def test_rejected_specs(text):
    with pytest.raises(ComplexInputError):
        OracleSpec.parse(text)


def test_build_hash():
    view = OracleSpec.parse("hash:n=100,seed=7").build()
    assert isinstance(view, HashComplexOracle)
    assert view.spec() == "hash:n=100,p=0.5,dim=2,seed=7"


def test_build_random_is_an_explicit_sample():
    view = OracleSpec.parse("random:n=12,p=0.5,seed=4").build()
    assert isinstance(view, ExplicitComplex)
    assert view == sample_explicit(12, ProbProfile(p_vertex=1.0, p=0.5), 2, 4)
    assert require_explicit(view, "betti") is view


def test_build_xnp_fills_in_the_generator():
    view = OracleSpec.parse("xnp:n=13,p=3").build()
    assert isinstance(view, XnpOracle)
    assert view.spec() == "xnp:n=13,p=3,g=2,dim=2"


def test_build_explicit(example13_path):
    assert OracleSpec.parse("example13").build() == example13()
    assert OracleSpec.parse(f"file:{example13_path}").build() == example13()
    assert OracleSpec.parse("paley:q=13").build().f_vector() == (13, 39)


def test_missing_file(tmp_path):
    with pytest.raises(ComplexInputError):
        OracleSpec.parse(f"file:{tmp_path / 'absent.json'}").build()


def test_parse_field():
    ctx = parse_field("field:n=13,p=3")
    assert ctx.spec() == "field:n=13,p=3,g=2"
    with pytest.raises(ComplexInputError):
        parse_field("xnp:n=13,p=3")
    with pytest.raises(ComplexInputError):
        parse_field("field:n=13")


def test_require_explicit():
    with pytest.raises(ComplexInputError):
        require_explicit(OracleSpec.parse("hash:n=10").build(), "betti")
    assert require_explicit(example13(), "betti") == example13()
