import pytest

from combtypes import CombType, Split, all_splits, resolutions
from irreducibility import (
    circuits,
    connectivity_components,
    is_globally_irreducible,
    is_locally_irreducible,
    local_solution_space,
    marking_partition_weights,
    weight_space,
)
from modulifan import (
    Cycle,
    add_cycles,
    psi,
    psi_natural,
    psi_skeleton,
    scale_cycle,
    skeleton,
    subset_vector,
    tilde_v,
    vital,
)


def test_local_solution_at_m04_origin():
    solution = local_solution_space(skeleton(4, 0).support(), CombType.star(4))
    assert solution.dim == 1
    assert solution.basis == ((1, 1, 1),)
    assert solution.full_basis == ((1,) * 7,)


def test_local_solution_psi_star_in_m05():
    solution = local_solution_space(psi(1, 5).support(), CombType.star(5))
    assert solution.basis == ((1,) * 6,)
    assert solution.full_basis == ((1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2),)


def test_local_solution_two_four_valent_vertices():
    face = CombType.of(6, [[1, 2, 3]])
    solution = local_solution_space(resolutions(face), face)
    assert solution.dim == 2
    # ordem dos cones: {12}, {56}, {46}, {13}, {23}, {45} ao lado de {1,2,3}
    sides = [c.without(Split.of(6, {1, 2, 3})).splits[0] for c in solution.cones]
    left = [i for i, s in enumerate(sides) if s.label_set <= {1, 2, 3}]
    assert left == [0, 3, 4]
    assert solution.basis == ((1, 0, 0, 1, 1, 0), (0, 1, 1, 0, 0, 1))


def test_local_solution_rejects_foreign_face():
    with pytest.raises(ValueError):
        local_solution_space(psi(1, 5).support(), CombType.of(5, [[1, 2]]))


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_full_fan_is_locally_irreducible(n):
    assert is_locally_irreducible(skeleton(n, 0)).ok


def test_vital_123_is_not_locally_irreducible():
    result = is_locally_irreducible(vital(Split.of(6, {1, 2, 3}), 6))
    assert not result.ok
    assert 2 in result.dims.values()


def test_psi_skeleton_is_not_locally_irreducible():
    assert not is_locally_irreducible(psi_skeleton(1, 6, 1)).ok


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_full_fan_is_connected(n):
    assert len(connectivity_components(skeleton(n, 0))) == 1


@pytest.mark.slow
def test_full_fan_is_connected_n8():
    assert len(connectivity_components(skeleton(8, 0))) == 1


@pytest.mark.parametrize("i, n", [(i, n) for n in range(5, 8) for i in (1, 2, n)])
def test_psi_is_connected(i, n):
    assert len(connectivity_components(psi(i, n))) == 1


def test_single_cone_is_connected():
    cone = skeleton(5, 0).support()[0]
    assert connectivity_components(Cycle.from_weights(5, 2, {cone: 1})) == [[cone]]


@pytest.mark.parametrize("n", [4, 5, 6])
def test_weight_space_of_full_fan(n):
    space = weight_space(skeleton(n, 0).support())
    assert space.dim == 1
    assert space.basis == ((1,) * len(space.cones),)


@pytest.mark.slow
def test_weight_space_of_full_fan_n7():
    space = weight_space(skeleton(7, 0).support())
    assert space.dim == 1


def test_weight_space_of_psi_natural():
    space = weight_space(psi_natural(1, 5).support())
    assert space.basis == ((1, 1, 1, 1),)


def test_weight_space_of_vital_12():
    space = weight_space(vital(Split.of(5, {1, 2}), 5).support())
    # ({1,2},{3,4},{3,5},{4,5}), primeira entrada positiva
    assert space.basis == ((1, -1, -1, -1),)


@pytest.mark.parametrize("i", range(1, 7))
def test_psi_is_globally_irreducible(i):
    report = is_globally_irreducible(psi(i, 6))
    assert report.global_
    assert report.connected
    assert report.own_weights_in_space


@pytest.mark.parametrize("n", [5, 6])
def test_every_vital_divisor_is_globally_irreducible(n):
    for split in all_splits(n):
        report = is_globally_irreducible(vital(split, n))
        assert report.global_
        assert report.own_weights_in_space
        if n == 6 and len(split.members) == 3:
            assert not report.local


def test_psi_skeleton_is_not_globally_irreducible():
    report = is_globally_irreducible(psi_skeleton(1, 6, 1))
    assert not report.global_
    assert report.weight_space_dim >= 2
    assert not report.local


def test_report_json_shape():
    data = is_globally_irreducible(psi(1, 5)).to_json()
    assert data["global"] is True
    assert data["weight_space_dim"] == 1
    assert data["basis"] == [[1] * 6]


def test_m05_circuit_census():
    rays = all_splits(5)
    found = circuits([tilde_v(s) for s in rays], modulo_lineality=True)
    assert len(found) == 30

    def support(cycle):
        return frozenset(rays.index(c.splits[0]) for c in cycle.support())

    naturals = {support(psi_natural(i, 5)) for i in range(1, 6)}
    vitals = {support(vital(s, 5)) for s in rays}
    psis = {support(psi(i, 5)) for i in range(1, 6)}
    differences = {
        support(add_cycles(psi_natural(i, 5), scale_cycle(psi_natural(j, 5), -1)))
        for i in range(1, 6) for j in range(i + 1, 6)
    }
    small = {frozenset(c.indices) for c in found if len(c.indices) == 4}
    large = {frozenset(c.indices) for c in found if len(c.indices) == 6}
    assert small == naturals | vitals
    assert large == psis | differences
    assert (len(naturals), len(vitals), len(psis), len(differences)) == (5, 10, 5, 10)

    for circuit in found:
        if frozenset(circuit.indices) in naturals:
            assert circuit.coefficients == (1, 1, 1, 1)
        elif frozenset(circuit.indices) in vitals:
            assert sorted(circuit.coefficients) in ([-1, -1, -1, 1], [-1, 1, 1, 1])


def test_circuits_trivial_cases():
    v = subset_vector(5, {1, 2})
    (pair,) = circuits([v, v])
    assert pair.indices == (0, 1)
    assert pair.coefficients == (1, -1)
    independent = [subset_vector(5, {i}) for i in range(1, 4)]
    assert circuits(independent) == []


@pytest.mark.parametrize("n", [6, 7])
def test_weights_depend_only_on_partition(n):
    cycles = [psi(1, n), vital(Split.of(n, {1, 2}), n)]
    if n == 6:
        cycles.append(vital(Split.of(6, {1, 2, 3}), 6))
    for cycle in cycles:
        for weights in marking_partition_weights(cycle).values():
            assert len(set(weights)) == 1
