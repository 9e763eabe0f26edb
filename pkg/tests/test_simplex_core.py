"""
Tests for simplex storage and the set-level operations.
"""

from itertools import combinations

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from ample_system.core.errors import ComplexInputError
from ample_system.core.simplex_core import (
    ComplexView,
    ExplicitComplex,
    RemovalFamily,
    antichain_reduce,
    cone,
    cycle_graph,
    external_faces,
    from_facets,
    full_simplex,
    induced,
    join,
    link,
    make_simplex,
    remove_family,
)


def test_make_simplex_sorts_and_rejects_repeats():
    assert make_simplex([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(ComplexInputError):
        make_simplex([1, 1])
    with pytest.raises(ComplexInputError):
        make_simplex([])


def test_from_facets_closes_downward(hollow_triangle, full_triangle):
    assert hollow_triangle.f_vector() == (3, 3)
    assert full_triangle.f_vector() == (3, 3, 1)
    assert full_triangle.contains((0, 2))
    assert not hollow_triangle.contains((0, 1, 2))
    assert full_triangle.is_downward_closed()


def test_from_facets_rejects_unknown_vertices():
    with pytest.raises(ComplexInputError):
        from_facets([0, 1], [(0, 2)], 1)


def test_example13_counts(x13):
    assert x13.f_vector() == (13, 39, 13)
    assert x13.euler_characteristic() == -13
    assert len(x13.facets()) == 13
    assert isinstance(x13, ComplexView)


def test_fixture_file_matches_construction(x13, example13_path):
    assert ExplicitComplex.load(example13_path) == x13


def test_save_and_load(tmp_path, x13):
    path = tmp_path / "x.json"
    x13.save(path)
    assert ExplicitComplex.load(path) == x13


def test_from_dict_rejects_other_versions():
    with pytest.raises(ComplexInputError):
        ExplicitComplex.from_dict({"version": 99, "vertices": [], "facets": [], "dim_cap": 0})


def test_induced_subcomplex(x13):
    X_U = induced(x13, [0, 1, 4])
    assert X_U.f_vector() == (3, 3, 1)
    assert induced(x13, [0, 2]).f_vector() == (2,)
    with pytest.raises(ComplexInputError):
        induced(x13, [0, 99])


def test_induced_large_vertex_set_uses_stored_simplices(x13):
    assert induced(x13, range(13)) == x13


def test_vertex_link_in_example13(x13):
    lk = link(x13, 0)
    assert lk.vertex_set == {1, 3, 4, 9, 10, 12}
    assert sorted(lk.simplices[1]) == [(1, 4), (3, 12), (9, 10)]


def test_cone_and_join(hollow_triangle):
    coned = cone(hollow_triangle, 3)
    assert coned.f_vector() == (4, 6, 3)
    assert not coned.contains((0, 1, 2))
    edge = join(from_facets([0], [], 0), from_facets([1], [], 0))
    assert edge.f_vector() == (2, 1)
    with pytest.raises(ComplexInputError):
        join(hollow_triangle, hollow_triangle)


def test_remove_family_drops_cofaces(full_triangle):
    smaller = remove_family(full_triangle, RemovalFamily.of([(0, 1)]))
    assert smaller.f_vector() == (3, 2)
    with pytest.raises(ComplexInputError):
        remove_family(full_triangle, RemovalFamily.of([(0, 5)]))


def test_removal_family_weight_and_reduction():
    family = RemovalFamily.of([(0,), (0, 1), (2, 3)])
    assert family.weight == 3 + 0 + 1 + 1
    assert family.a_i() == (1, 2)
    reduced = antichain_reduce(family)
    assert reduced.sorted_members() == [(0,), (2, 3)]
    assert RemovalFamily.of([[7]]).weight == 1


def test_external_faces(hollow_triangle):
    assert external_faces(hollow_triangle, 2) == [(0, 1, 2)]
    points = from_facets([0, 1], [], 1)
    assert external_faces(points, 1) == [(0, 1)]


def test_cycle_and_full_simplex():
    assert cycle_graph(5).f_vector() == (5, 5)
    assert full_simplex(range(4), 3).f_vector() == (4, 6, 4, 1)
    assert full_simplex(range(4), 3).skeleton(1).f_vector() == (4, 6)


@hsettings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=4, unique=True),
        max_size=8,
    )
)
def test_random_facets_build_downward_closed_complexes(facets):
    X = from_facets(range(7), facets, 3)
    assert X.is_downward_closed()
    assert X.euler_characteristic() == sum((-1) ** d * f for d, f in enumerate(X.f_vector()))
    for facet in facets:
        assert X.contains(tuple(sorted(facet)))


facet_lists = st.lists(
    st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=4, unique=True),
    max_size=8,
)


@hsettings(max_examples=50, deadline=None)
@given(facet_lists, st.data())
def test_removal_ignores_members_with_a_removed_face(facets, data):
    X = from_facets(range(7), facets, 3)
    simplices = sorted(X.iter_simplices())
    members = data.draw(st.lists(st.sampled_from(simplices), min_size=1, max_size=5))
    family = RemovalFamily.of(members)
    assert remove_family(X, family) == remove_family(X, antichain_reduce(family))


@hsettings(max_examples=50, deadline=None)
@given(facet_lists)
def test_link_of_cone_apex_is_the_base(facets):
    X = from_facets(range(7), facets, 2)
    assert link(cone(X, 7), 7) == X


def test_join_of_two_edges_is_a_full_simplex():
    left = from_facets([0, 1], [(0, 1)], 1)
    right = from_facets([2, 3], [(2, 3)], 1)
    assert join(left, right) == full_simplex(range(4), 3)
    assert join(left, right, dim_cap=2) == full_simplex(range(4), 2)


def test_example13_edges_and_empty_triangles(x13):
    for i in range(13):
        edge = tuple(sorted((i, (i + 1) % 13)))
        holding = [t for t in x13.simplices[2] if set(edge) <= set(t)]
        assert holding == [tuple(sorted((i, (i + 1) % 13, (i + 4) % 13)))]
        hollow = tuple(sorted(((i - 3) % 13, i, (i + 1) % 13)))
        assert all(x13.contains(pair) for pair in combinations(hollow, 2))
        assert not x13.contains(hollow)
