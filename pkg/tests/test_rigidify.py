from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidity.autgroup import fixes_pointwise, is_rigid
from rigidity.errors import KindMismatch
from rigidity.oracles import OracleKind, OracleSpec, OracleView
from rigidity.rigidify import (
    CLUSTER_FACTOR,
    RigidifyConfig,
    RigidifyReport,
    _grow_block,
    certificate_check,
    rigidify_ordered_graph,
    rigidify_tournament,
    size_bounds,
)
from rigidity.structures import Graph, OrderedGraph, Tournament, validate


def test_size_bounds_for_two_targets():
    bounds = size_bounds(2)
    assert (bounds.m, bounds.k) == (1, 2)
    assert bounds.graph_bound == 11
    assert (bounds.tournament_sum, bounds.tournament_closed_form) == (14, 16)
    assert bounds.discrepancy


def test_size_bounds_for_three_targets():
    bounds = size_bounds(3)
    assert bounds.graph_bound == 93
    assert bounds.to_json()["tournamentSum"] == 255
    assert bounds.to_json()["tournamentClosedForm"] == 257


def test_size_bounds_need_a_target():
    with pytest.raises(ValueError):
        size_bounds(0)


def test_certificate_examples(cycle3):
    rejected = certificate_check(cycle3)
    assert not rejected.accepted
    assert str(rejected).startswith("rejected: 0 and 1")
    assert certificate_check(Tournament.transitive(5)).accepted
    assert certificate_check(Tournament.transitive(1)).accepted


def test_certificate_keeps_targets_apart():
    verdict = certificate_check(Tournament.transitive(4), U=[0, 3])
    assert not verdict.accepted
    assert "from U" in verdict.reason


def test_config_validation(rado):
    with pytest.raises(ValueError):
        RigidifyConfig(oracle=rado, targets=())
    with pytest.raises(ValueError):
        RigidifyConfig(oracle=rado, targets=(1, 1))
    with pytest.raises(ValueError):
        RigidifyConfig(oracle=rado, targets=(-1, 2))
    with pytest.raises(ValueError):
        RigidifyConfig(oracle=rado, targets=(0, 1), budget=0)
    assert RigidifyConfig(oracle=rado, targets=(5, 2)).U == (2, 5)


def test_constructions_check_the_oracle_kind(rado, generic):
    with pytest.raises(KindMismatch):
        rigidify_tournament(RigidifyConfig(oracle=rado, targets=(0, 1)))
    with pytest.raises(KindMismatch):
        rigidify_ordered_graph(RigidifyConfig(oracle=generic, targets=(0, 1)))


def test_tournament_for_two_targets(generic):
    report = rigidify_tournament(RigidifyConfig(oracle=generic, targets=(0, 1)))
    assert validate(report.built) is None
    assert report.size == 14
    assert report.within_bound
    assert report.certificate == "accepted"
    assert is_rigid(report.built)
    sizes = [entry["size"] for entry in report.ledger.blocks()]
    assert sizes == [4, 8]
    assert sorted(report.ledger.block_members() + list(report.embedded_u)) == list(range(14))


@pytest.mark.slow
def test_tournament_for_three_targets():
    local = OracleSpec(kind=OracleKind.local_order, seed=0)
    report = rigidify_tournament(RigidifyConfig(oracle=local, targets=(0, 1, 2)))
    assert report.size == 255
    assert report.certificate == "accepted"
    assert is_rigid(report.built)
    assert report.within_bound
    assert [entry["size"] for entry in report.ledger.blocks()] == [4, 8, 16, 32, 64, 128]


def test_single_target_is_its_own_extension(rado):
    report = rigidify_ordered_graph(RigidifyConfig(oracle=rado, targets=(7,)))
    assert report.size == 1
    assert report.vertices == (7,)
    assert report.fixes_u


@pytest.mark.parametrize("targets", [(0, 2), (1, 3), (3, 5), (0, 7), (4, 9)])
def test_ordered_graph_for_two_targets(rado, targets):
    report = rigidify_ordered_graph(RigidifyConfig(oracle=rado, targets=targets))
    assert isinstance(report.built, OrderedGraph)
    assert validate(report.built) is None
    assert report.within_bound
    assert report.fixes_u
    assert fixes_pointwise(report.built, report.embedded_u)
    assert [report.vertices[i] for i in report.embedded_u] == list(targets)


def test_ordered_graph_on_a_comparable_pair():
    layered = OracleSpec(kind=OracleKind.layered_rado)
    report = rigidify_ordered_graph(RigidifyConfig(oracle=layered, targets=(0, 1)))
    assert report.fixes_u
    assert report.within_bound
    assert report.built.less(*report.embedded_u)


@pytest.mark.slow
def test_ordered_graph_for_three_targets(rado):
    report = rigidify_ordered_graph(RigidifyConfig(oracle=rado, targets=(1, 3, 5)))
    assert report.within_bound
    assert fixes_pointwise(report.built, report.embedded_u)


def test_report_json_round_trip(rado):
    report = rigidify_ordered_graph(RigidifyConfig(oracle=rado, targets=(0, 2)))
    payload = report.to_json()
    assert payload["bounds"]["respected"] is True
    assert payload["fixesU"] is True
    restored = RigidifyReport.from_json(payload)
    assert restored.built == report.built
    assert restored.embedded_u == report.embedded_u
    assert restored.ledger.entries == report.ledger.entries


def _check_ordered(oracle: OracleSpec, targets: tuple[int, ...]):
    report = rigidify_ordered_graph(RigidifyConfig(oracle=oracle, targets=targets))
    assert report.within_bound, (targets, report.size)
    assert report.fixes_u
    assert fixes_pointwise(report.built, report.embedded_u), targets
    return report


# S blocks drawn next to a P block whose members straddle a power of two
@pytest.mark.slow
@pytest.mark.parametrize("targets", [(25, 1, 35), (37, 0, 28), (17, 34, 5), (5, 38, 34), (5, 26, 10, 39)])
def test_s_blocks_need_no_module_over_p_blocks(rado, targets):
    _check_ordered(rado, targets)


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(st.sets(st.integers(0, 39), min_size=3, max_size=4))
def test_small_target_sets_in_the_rado_graph(targets):
    _check_ordered(OracleSpec(kind=OracleKind.rado), tuple(targets))


@pytest.mark.slow
def test_random_rado_pairs_and_triples(rado):
    rnd = Random(2024)
    for size, count in ((2, 20), (3, 5)):
        for _ in range(count):
            _check_ordered(rado, tuple(rnd.sample(range(64), size)))


@pytest.mark.slow
@pytest.mark.parametrize("k", range(5))
def test_layered_base_and_shadow(k):
    layered = OracleSpec(kind=OracleKind.layered_rado)
    report = _check_ordered(layered, (2 * k, 2 * k + 1))
    assert report.built.less(*report.embedded_u)


def test_ordered_graph_runs_are_reproducible(rado):
    cfg = RigidifyConfig(oracle=rado, targets=(3, 5))
    first = rigidify_ordered_graph(cfg).to_json()
    assert rigidify_ordered_graph(cfg).to_json() == first


@pytest.mark.parametrize("wrapped", [Graph.complete(40), Tournament.transitive(40)])
def test_blocks_are_cut_from_an_over_provisioned_bucket(wrapped):
    view = OracleView(spec=OracleSpec(kind=OracleKind.finite, wrapped=wrapped))
    stream = iter(range(40))
    members = _grow_block(view, stream, 3, [], [])
    assert len(members) == 3
    assert max(members) < CLUSTER_FACTOR * 3
    assert next(stream) == CLUSTER_FACTOR * 3
