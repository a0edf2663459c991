import random

import pytest

from combtypes import (
    CombType,
    Split,
    SplitError,
    all_splits,
    codim1_faces,
    enumerate_types,
    random_type,
    resolutions,
    resolved_vertex,
    splits_compatible,
    tree_from_splits,
)
from modulifan import distance_vector, pair_index


def _double_factorial(k):
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def _trivalent_count(n):
    # cada nova folha entra numa das 2n-5 arestas da árvore anterior
    if n == 3:
        return 1
    return _trivalent_count(n - 1) * (2 * (n - 1) - 3)


def test_split_canonical_side():
    assert Split.of(5, {3, 4, 5}) == Split.of(5, {1, 2})
    assert Split.of(4, {3, 4}) == Split.of(4, {1, 2})
    assert Split.of(5, {1, 2}).members == (1, 2)


@pytest.mark.parametrize("n, labels", [(5, {1}), (5, {1, 2, 3, 4}), (4, {1, 7})])
def test_split_rejects_degenerate(n, labels):
    with pytest.raises(SplitError):
        Split.of(n, labels)


def test_splits_compatible_cases():
    assert splits_compatible(Split.of(5, {1, 2}), Split.of(5, {3, 4}))
    assert not splits_compatible(Split.of(4, {1, 2}), Split.of(4, {2, 3}))
    assert splits_compatible(Split.of(4, {1, 2}), Split.of(4, {3, 4}))


def test_splits_compatible_rejects_mixed_n():
    with pytest.raises(SplitError):
        splits_compatible(Split.of(5, {1, 2}), Split.of(6, {1, 2}))


def test_all_splits_counts():
    for n in range(4, 8):
        assert len(all_splits(n)) == 2 ** (n - 1) - n - 1


@pytest.mark.parametrize("n, dim, expected", [(5, 1, 10), (5, 2, 15), (4, 0, 1), (7, 3, 1260)])
def test_enumerate_types_counts(n, dim, expected):
    assert len(enumerate_types(n, dim)) == expected


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_top_dimensional_count_is_double_factorial(n):
    count = len(enumerate_types(n, n - 3))
    assert count == _double_factorial(2 * n - 5)
    assert count == _trivalent_count(n)


@pytest.mark.slow
def test_top_dimensional_count_n8():
    assert len(enumerate_types(8, 5)) == _double_factorial(11)


def test_enumerate_types_rejects_bad_dim():
    with pytest.raises(SplitError):
        enumerate_types(5, 3)


def test_enumeration_is_sorted_and_unique():
    types = enumerate_types(6, 2)
    assert len(set(types)) == len(types)
    assert types == sorted(types)


def test_combtype_rejects_incompatible():
    with pytest.raises(SplitError):
        CombType.of(5, [[1, 2], [2, 3]])


def test_combtype_json_round_trip():
    ctype = CombType.of(6, [[1, 2], [4, 5, 6]])
    assert ctype.to_json() == {"n": 6, "splits": [[1, 2], [1, 2, 3]]}
    assert CombType.from_json(ctype.to_json()) == ctype


def test_tree_of_star():
    tree = tree_from_splits(CombType.star(4))
    (vertex,) = tree.vertices()
    assert tree.valence(vertex) == 4


def test_tree_one_split_n5():
    tree = tree_from_splits(CombType.of(5, [[1, 2]]))
    assert sorted(tree.valence(v) for v in tree.vertices()) == [3, 4]


def test_tree_path_n6():
    tree = tree_from_splits(CombType.of(6, [[1, 2], [1, 2, 3]]))
    groups = sorted(tree.labels_at(v) for v in tree.vertices())
    assert groups == [[1, 2], [3], [4, 5, 6]]
    valence = {tuple(tree.labels_at(v)): tree.valence(v) for v in tree.vertices()}
    assert valence == {(1, 2): 3, (3,): 3, (4, 5, 6): 4}


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_dimension_formula_for_all_types(n):
    for dim in range(n - 2):
        for ctype in enumerate_types(n, dim):
            tree = tree_from_splits(ctype)
            excess = sum(tree.valence(v) - 3 for v in tree.vertices())
            assert n - 3 - excess == ctype.dim
            assert len(tree.bounded_edges()) == ctype.dim


def test_codim1_faces_examples():
    ray = CombType.of(5, [[1, 2]])
    assert codim1_faces(ray) == [CombType.star(5)]
    path = CombType.of(6, [[1, 2], [1, 2, 3]])
    assert codim1_faces(path) == [CombType.of(6, [[1, 2]]), CombType.of(6, [[1, 2, 3]])]
    assert len(codim1_faces(CombType.of(5, [[1, 2], [4, 5]]))) == 2
    with pytest.raises(SplitError):
        codim1_faces(CombType.star(5))


def test_resolutions_of_star():
    assert resolutions(CombType.star(4)) == [CombType.of(4, [s]) for s in ([1, 2], [1, 3], [1, 4])]
    assert len(resolutions(CombType.star(5))) == 10


def test_resolutions_keeping_marking_on_high_valence():
    found = []
    for ray in resolutions(CombType.star(7)):
        tree = tree_from_splits(ray)
        if tree.valence(tree.vertex_of_label(1)) >= 4:
            found.append(len(ray.splits[0].side_of(1)))
    assert len(found) == 50
    assert {size: found.count(size) for size in set(found)} == {3: 15, 4: 20, 5: 15}


@pytest.mark.parametrize("n", [5, 6, 7])
def test_resolution_then_face_recovers(n):
    for dim in range(n - 3):
        for face in enumerate_types(n, dim):
            for cone in resolutions(face):
                assert face in codim1_faces(cone)


def test_resolutions_rejects_full_type():
    with pytest.raises(SplitError):
        resolutions(CombType.of(4, [[1, 2]]))


def test_distance_matches_tree():
    ctype = CombType.of(6, [[1, 2], [1, 2, 3]])
    tree = tree_from_splits(ctype)
    vector = distance_vector(ctype)
    for (i, j), k in pair_index(6).items():
        assert vector.coords[k] == tree.distance(i, j)
    assert tree.distance(1, 4) == 2
    assert tree.distance(1, 2) == 0


def test_four_valent_vertex_and_marking_sets():
    tree = tree_from_splits(CombType.of(5, [[1, 2]]))
    vertex = tree.four_valent_vertex()
    assert tree.marking_sets(vertex) == [frozenset({1, 2}), frozenset({3}), frozenset({4}), frozenset({5})]
    with pytest.raises(SplitError):
        tree_from_splits(CombType.star(5)).four_valent_vertex()


def test_resolved_vertex():
    face = CombType.of(6, [[1, 2, 3]])
    inner = resolved_vertex(face, Split.of(6, [1, 2]))
    assert inner == ("v", (1, 2, 3))
    assert resolved_vertex(face, Split.of(6, [4, 5])) == ("v", ())


def test_random_type_is_valid_and_reproducible():
    first = [random_type(8, 3, random.Random(5)) for _ in range(3)]
    second = [random_type(8, 3, random.Random(5)) for _ in range(3)]
    assert first == second
    rng = random.Random(11)
    for _ in range(50):
        ctype = random_type(7, rng.randint(0, 4), rng)
        assert CombType.of(7, ctype.splits) == ctype
