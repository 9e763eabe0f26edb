"""
Tests for disc filling, cone points and GF(2) Betti numbers.
"""

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from ample_system.core.errors import (
    BudgetExceededError,
    ComplexInputError,
    WitnessNotFoundError,
)
from ample_system.core.random_complex import HashComplexOracle, ProbProfile
from ample_system.core.seeding import derive_rng
from ample_system.core.simplex_core import cone, cycle_graph, from_facets, full_simplex
from ample_system.core.topo_checks import (
    DiscCertificate,
    SimplicialLoop,
    betti_gf2,
    cone_point,
    fill_bounds,
    fill_loop,
    hollow_triangle,
    random_loop,
    validate_certificate,
)


@pytest.fixture
def k12():
    return full_simplex(range(12), 2)


@pytest.fixture
def ten_cycle_disc(k12):
    return fill_loop(k12, SimplicialLoop(tuple(range(10))), 5)


class TestBetti:
    def test_example13(self, x13):
        assert betti_gf2(x13) == (1, 14, 0)

    def test_small_complexes(self, full_triangle):
        assert betti_gf2(hollow_triangle()) == (1, 1)
        assert betti_gf2(full_triangle) == (1, 0, 0)
        assert betti_gf2(cycle_graph(5)) == (1, 1)
        assert betti_gf2(from_facets([0, 1, 2], [], 1)) == (3,)

    def test_euler_relation(self, x13):
        betti = betti_gf2(x13)
        assert sum((-1) ** k * b for k, b in enumerate(betti)) == x13.euler_characteristic()

    @hsettings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=7), min_size=1, max_size=4, unique=True),
            max_size=10,
        )
    )
    def test_euler_relation_on_random_complexes(self, facets):
        X = from_facets(range(8), facets, 3)
        betti = betti_gf2(X)
        assert sum((-1) ** k * b for k, b in enumerate(betti)) == X.euler_characteristic()
        assert betti[0] >= 1

    def test_cone_is_acyclic(self):
        assert betti_gf2(cone(hollow_triangle(), 3)) == (1, 0, 0)

    def test_cell_budget(self, x13):
        with pytest.raises(BudgetExceededError) as info:
            betti_gf2(x13, max_cells=10)
        assert info.value.budget == "max_rank_cells"


class TestConePoint:
    def test_edge_of_example13(self, x13):
        assert cone_point(x13, [0, 1]) == 4

    def test_empty_set(self, x13):
        assert cone_point(x13, []) == 0

    def test_too_many_vertices(self, x13):
        with pytest.raises(ComplexInputError):
            cone_point(x13, [0, 1, 2], r=2)

    def test_no_cone_over_a_triangle(self, x13):
        with pytest.raises(WitnessNotFoundError) as info:
            cone_point(x13, [0, 1, 4])
        assert info.value.to_dict()["challenge"]["U"] == [0, 1, 4]


class TestFillBounds:
    @pytest.mark.parametrize(
        "length,r,cone_at_three,expected",
        [(3, 5, True, (1, 3)), (3, 5, False, (0, 1)), (4, 4, False, (1, 4)), (10, 5, False, (4, 17))],
    )
    def test_values(self, length, r, cone_at_three, expected):
        assert fill_bounds(length, r, cone_at_three) == expected


class TestFillLoop:
    def test_ten_cycle_in_a_simplex(self, ten_cycle_disc, k12):
        cert = ten_cycle_disc
        assert cert.internal_vertices == [-1, -2, -3, -4]
        assert len(cert.triangles) == 16
        assert cert.mapping[-1] == 10
        assert validate_certificate(k12, cert, 5) == []

    def test_triangle_shortcut(self, x13):
        cert = fill_loop(x13, SimplicialLoop((0, 1, 4)), 5)
        assert cert.triangles == [(0, 1, 4)]
        assert cert.internal_vertices == []
        assert not cert.cone_at_three

    def test_cone_at_three(self):
        X = cone(hollow_triangle(), 3)
        cert = fill_loop(X, SimplicialLoop((0, 1, 2)), 4)
        assert cert.cone_at_three
        assert cert.mapping[-1] == 3
        assert len(cert.triangles) == 3
        assert validate_certificate(X, cert, 4) == []

    def test_square(self):
        X = full_simplex(range(6), 2)
        cert = fill_loop(X, SimplicialLoop((0, 1, 2, 3)), 4)
        assert cert.internal_vertices == [-1]
        assert len(cert.triangles) == 4

    def test_exact_witness_mode_needs_an_induced_path(self, k12):
        # every outside vertex of a full simplex sees the chords of the arc too
        with pytest.raises(WitnessNotFoundError) as info:
            fill_loop(k12, SimplicialLoop(tuple(range(6))), 5, witness_mode="exact")
        assert info.value.challenge["mode"] == "exact"

    def test_stuck_on_a_bare_cycle(self):
        X = cycle_graph(6)
        with pytest.raises(WitnessNotFoundError) as info:
            fill_loop(X, SimplicialLoop(tuple(range(6))), 4)
        assert info.value.challenge["arc"] == [0, 1, 2, 3]

    def test_level_must_be_at_least_four(self, k12):
        with pytest.raises(ComplexInputError):
            fill_loop(k12, SimplicialLoop((0, 1, 2)), 3)

    def test_loop_must_use_edges(self, x13):
        with pytest.raises(ComplexInputError):
            fill_loop(x13, SimplicialLoop((0, 2, 5)), 5)

    def test_unknown_witness_mode(self, k12):
        with pytest.raises(ComplexInputError):
            fill_loop(k12, SimplicialLoop(tuple(range(8))), 5, witness_mode="guess")

    def test_certificate_dict(self, ten_cycle_disc):
        data = ten_cycle_disc.to_dict()
        assert data["map"]["-1"] == 10
        assert DiscCertificate.from_dict(data) == ten_cycle_disc
        with pytest.raises(ComplexInputError):
            DiscCertificate.from_dict({"boundary": [0, 1, 2]})


class TestCorruptedCertificates:
    def test_bad_image(self, ten_cycle_disc, k12):
        cert = DiscCertificate.from_dict(ten_cycle_disc.to_dict())
        cert.mapping[-1] = 0
        assert validate_certificate(k12, cert) != []

    def test_missing_triangle(self, ten_cycle_disc, k12):
        cert = DiscCertificate.from_dict(ten_cycle_disc.to_dict())
        cert.triangles.pop()
        failures = validate_certificate(k12, cert)
        assert any("euler" in f or "covered" in f or "lies in" in f for f in failures)

    def test_tight_bound(self, ten_cycle_disc, k12):
        assert validate_certificate(k12, ten_cycle_disc, 5) == []
        assert validate_certificate(k12, ten_cycle_disc, 7) != []


class TestRandomLoops:
    @pytest.fixture(scope="class")
    def dense(self):
        return HashComplexOracle(3000, ProbProfile(p=0.5), 2, seed=1)

    def test_random_loop_is_valid(self, dense):
        loop = random_loop(dense, 6, derive_rng(0, "loops"))
        assert len(loop) == 6
        loop.validate(dense)

    def test_fill_random_loop_on_hash_oracle(self, dense):
        loop = random_loop(dense, 6, derive_rng(1, "loops"))
        cert = fill_loop(dense, loop, 4)
        assert validate_certificate(dense, cert, 4) == []

    def test_budget(self):
        X = from_facets(range(3), [], 1)
        with pytest.raises(BudgetExceededError) as info:
            random_loop(X, 3, derive_rng(0, "loops"), restarts=2, draws=10)
        assert info.value.budget == "loop_trials"

    def test_short_loop(self, dense):
        with pytest.raises(ComplexInputError):
            random_loop(dense, 2, derive_rng(0, "loops"))

    @pytest.mark.slow
    def test_fill_longer_loops_at_level_five(self):
        X = HashComplexOracle(20_000, ProbProfile(p=0.5), 2, seed=3)
        for index in range(3):
            loop = random_loop(X, 11, derive_rng(3, "loops", index))
            cert = fill_loop(X, loop, 5)
            assert validate_certificate(X, cert, 5) == []
