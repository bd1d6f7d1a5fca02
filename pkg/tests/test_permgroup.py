import pytest
from hypothesis import given, settings

from rigidity.errors import CapExceeded
from rigidity.permgroup import (
    OrbitAction,
    OrbitFamily,
    PermutationGroup,
    act,
    domain_size,
    format_cycles,
    is_orbit_closed,
    is_relation_group,
    orbit_closure,
    orbit_equivalent,
    orbit_transfer_check,
    orbits,
    parse_cycles,
    regular_powerset_orbit,
)
from tests.oracles import brute_subgroups
from tests.strategies import permutation_groups, transitive_groups


def test_parse_and_format_cycles():
    generators, degree = parse_cycles("(0 1 2)(3 4); (0 1)")
    assert degree == 5
    assert generators == [(1, 2, 0, 4, 3), (1, 0, 2, 3, 4)]
    assert format_cycles(generators[0]) == "(0 1 2)(3 4)"
    assert format_cycles((0, 1, 2)) == "()"
    assert parse_cycles("(0,2)", degree=4)[0] == [(2, 1, 0, 3)]


@pytest.mark.parametrize("text", ["0 1 2", "(0 0)", "(0 1", "(0 1) x"])
def test_malformed_cycles(text):
    with pytest.raises(ValueError):
        parse_cycles(text)


def test_points_beyond_the_degree():
    with pytest.raises(ValueError):
        PermutationGroup.parse("(0 5)", degree=3)
    with pytest.raises(ValueError):
        PermutationGroup(degree=3, generators=((0, 0, 1),))


def test_named_groups():
    assert PermutationGroup.symmetric(4).order() == 24
    assert PermutationGroup.alternating(4).order() == 12
    assert PermutationGroup.cyclic(5).order() == 5
    assert PermutationGroup.dihedral(5).order() == 10
    assert PermutationGroup.alternating(2).order() == 1
    assert PermutationGroup.alternating(4).is_subgroup_of(PermutationGroup.symmetric(4))
    assert not PermutationGroup.symmetric(3).is_subgroup_of(PermutationGroup.alternating(3))
    assert PermutationGroup.parse("(0 1 2)").contains((1, 2, 0))
    assert not PermutationGroup.parse("(0 1 2)").contains((1, 0, 2))


def test_orbits_of_a_three_cycle():
    c3 = PermutationGroup.cyclic(3)
    assert orbits(c3, OrbitAction.subsets, 2).lengths() == [3]
    assert orbits(c3, OrbitAction.tuples, 2).lengths() == [3, 3]
    assert orbits(c3).orbits == (((0,), (1,), (2,)),)
    power = orbits(c3, OrbitAction.power_set)
    assert power.k == 0
    assert power.lengths() == [1, 3, 3, 1]


def test_orbit_family_json():
    family = orbits(PermutationGroup.parse("(0 1)", degree=3))
    assert family.to_json() == {"on": "points", "k": 1, "orbits": [[[0], [1]], [[2]]]}
    assert OrbitFamily.from_json(family.to_json()) == family


def test_orbit_cap():
    with pytest.raises(CapExceeded):
        orbits(PermutationGroup.symmetric(10), OrbitAction.tuples, 5, cap=100)
    with pytest.raises(ValueError):
        orbits(PermutationGroup.symmetric(3), OrbitAction.subsets, -1)


def test_alternating_group_is_subset_equivalent_to_symmetric():
    verdict = orbit_equivalent(PermutationGroup.symmetric(3), PermutationGroup.alternating(3), 3)
    assert verdict.equivalent
    assert verdict.subsets_diverge_at is None
    assert verdict.tuples_diverge_at == 2


def test_cyclic_group_splits_pairs():
    verdict = orbit_equivalent(PermutationGroup.symmetric(4), PermutationGroup.cyclic(4), 3)
    assert verdict.subsets_diverge_at == 2
    assert verdict.to_json()["subsetsDivergeAt"] == 2


def test_orbit_equivalence_needs_one_degree():
    with pytest.raises(ValueError):
        orbit_equivalent(PermutationGroup.symmetric(3), PermutationGroup.symmetric(4), 2)


def test_orbit_closures():
    assert orbit_closure(PermutationGroup.alternating(3)).order() == 6
    assert orbit_closure(PermutationGroup.cyclic(4)).order() == 8
    assert orbit_closure(PermutationGroup.symmetric(5)).order() == 120
    assert is_orbit_closed(PermutationGroup.dihedral(5))
    assert not is_orbit_closed(PermutationGroup.cyclic(4))
    with pytest.raises(CapExceeded):
        orbit_closure(PermutationGroup.symmetric(9))


def test_relation_groups():
    assert not is_relation_group(PermutationGroup.alternating(3)).holds
    full = is_relation_group(PermutationGroup.symmetric(3))
    assert full.holds and full.witness == ()
    trivial = is_relation_group(PermutationGroup(degree=3))
    assert trivial.holds
    assert "witness" in trivial.to_json()
    with pytest.raises(CapExceeded):
        is_relation_group(PermutationGroup.symmetric(7))


def test_regular_powerset_orbits():
    assert regular_powerset_orbit(PermutationGroup.cyclic(2)) == ((0,), (1,))
    assert regular_powerset_orbit(PermutationGroup.symmetric(3)) is None
    assert regular_powerset_orbit(PermutationGroup(degree=3)) == ((),)


@pytest.mark.parametrize("name, group", transitive_groups())
def test_transfer_within_a_group(name, group):
    report = orbit_transfer_check(group, group, 3)
    assert report.fully_succeeded, name
    assert all(level.pairs == domain_size(group.degree, OrbitAction.tuples, level.n) for level in report.levels)


def test_transfer_to_a_subgroup_fails_on_pairs():
    report = orbit_transfer_check(PermutationGroup.symmetric(3), PermutationGroup.alternating(3), 2)
    assert report.levels[0].failed == 0
    assert report.first_failure == 2
    assert report.to_json()["fullySucceeded"] is False


def test_transfer_preconditions():
    with pytest.raises(ValueError):
        orbit_transfer_check(PermutationGroup.alternating(3), PermutationGroup.symmetric(3), 2)
    with pytest.raises(CapExceeded):
        orbit_transfer_check(PermutationGroup.symmetric(5), PermutationGroup.symmetric(5), 1, cap=100)


@given(permutation_groups())
def test_orbits_partition_the_domain(group):
    for on, k in ((OrbitAction.points, 1), (OrbitAction.subsets, 2), (OrbitAction.tuples, 2)):
        family = orbits(group, on, k)
        assert sum(family.lengths()) == domain_size(group.degree, on, k)
        for orbit in family.orbits:
            assert len(orbit) <= group.order()


@settings(max_examples=50)
@given(permutation_groups(max_degree=4))
def test_closure_keeps_subset_orbits(group):
    closure = orbit_closure(group)
    assert group.is_subgroup_of(closure)
    assert orbits(closure, OrbitAction.power_set).as_partition() == orbits(group, OrbitAction.power_set).as_partition()


def _proper_subgroups(group: PermutationGroup) -> list[PermutationGroup]:
    return [
        PermutationGroup(degree=group.degree, generators=tuple(sorted(S)))
        for S in brute_subgroups(group.element_list, group.degree)
        if len(S) < group.order()
    ]


def test_cyclic_group_of_order_four_is_not_a_relation_group():
    verdict = is_relation_group(PermutationGroup.parse("(0 1 2 3)"))
    assert not verdict.holds
    assert verdict.witness is None
    assert verdict.reason.startswith("not orbit-closed")


@pytest.mark.parametrize("name, group", transitive_groups())
def test_relation_groups_are_orbit_closed(name, group):
    if is_relation_group(group).holds:
        assert is_orbit_closed(group), name


@pytest.mark.parametrize("name, group", transitive_groups())
def test_regular_orbit_separates_proper_subgroups(name, group):
    if regular_powerset_orbit(group) is None:
        return
    subsets = orbits(group, OrbitAction.power_set).as_partition()
    for H in _proper_subgroups(group):
        assert orbits(H, OrbitAction.power_set).as_partition() != subsets, (name, str(H))


@settings(max_examples=50, deadline=None)
@given(permutation_groups(max_degree=4))
def test_regular_orbit_separates_proper_subgroups_of_random_groups(group):
    if regular_powerset_orbit(group) is None:
        return
    subsets = orbits(group, OrbitAction.power_set).as_partition()
    assert all(orbits(H, OrbitAction.power_set).as_partition() != subsets for H in _proper_subgroups(group))


@pytest.mark.parametrize("name, group", [(name, group) for name, group in transitive_groups() if group.degree <= 4])
def test_transfer_with_witnesses_gives_tuple_orbits(name, group):
    nmax = min(3, group.degree)
    for H in _proper_subgroups(group) + [group]:
        report = orbit_transfer_check(group, H, nmax)
        if any(level.no_witness for level in report.levels):
            continue
        if not orbit_equivalent(group, H, group.degree).equivalent:
            continue
        assert report.fully_succeeded, (name, str(H))
        assert orbit_equivalent(group, H, nmax).tuples_diverge_at is None, (name, str(H))


@given(permutation_groups())
def test_orbits_are_closed_under_generators(group):
    actions = ((OrbitAction.points, 1), (OrbitAction.subsets, 2), (OrbitAction.tuples, 2), (OrbitAction.power_set, 0))
    for on, k in actions:
        for orbit in orbits(group, on, k).orbits:
            members = set(orbit)
            for g in group.generators:
                assert {act(g, e, on) for e in orbit} == members
