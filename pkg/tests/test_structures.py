import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidity.errors import CapExceeded, KindMismatch, VertexOutOfRange
from rigidity.structures import (
    Graph,
    OrderedGraph,
    Tournament,
    are_isomorphic,
    canonical_json,
    induced,
    preserves,
    structure_from_json,
    validate,
)
from tests.strategies import graphs, ordered_graphs, subsets, tournaments


def test_edges_are_normalised():
    g = Graph.from_edges(3, [(2, 0), [1, 0], (0, 2)])
    assert g.edges == frozenset({(0, 2), (0, 1)})
    assert g.neighbors(0) == frozenset({1, 2})
    assert g.has_edge(2, 0)


def test_validate_accepts_well_formed_structures():
    assert validate(Graph.path(4)) is None
    assert validate(Tournament.cycle3()) is None
    assert validate(OrderedGraph(base=Graph.path(3), order=frozenset({(0, 1), (1, 2), (0, 2)}))) is None


def test_validate_reports_first_violation():
    assert str(validate(Tournament(n=2, arcs=frozenset({(0, 1), (1, 0)})))) == "both directions on {0,1}"
    assert str(validate(Tournament(n=3, arcs=frozenset({(0, 1), (1, 2)})))) == "no arc on {0,2}"
    assert str(validate(Graph(n=2, edges=frozenset({(1, 1)})))) == "loop on 1 in edges"
    broken = OrderedGraph(base=Graph(n=3, edges=frozenset()), order=frozenset({(0, 1), (1, 2)}))
    violation = validate(broken)
    assert violation.message.startswith("order not transitive")
    assert violation.witness == (0, 1, 2)


def test_induced_relabels_in_increasing_order():
    sub, relabel = induced(Graph.path(5), [4, 1, 2])
    assert relabel == (1, 2, 4)
    assert sub.edges == frozenset({(0, 1)})
    with pytest.raises(VertexOutOfRange):
        induced(Graph.path(5), [9])


def test_induced_tournament_keeps_arc_directions():
    sub, _ = induced(Tournament.cycle3(), [0, 2])
    assert sub.arcs == frozenset({(1, 0)})


def test_isomorphism_of_relabelled_path():
    relabelled = Graph.from_edges(4, [(2, 0), (0, 3), (3, 1)])
    image = are_isomorphic(Graph.path(4), relabelled)
    assert image is not None
    assert preserves(Graph.path(4), relabelled, image)


def test_non_isomorphic_graphs():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert are_isomorphic(Graph.path(4), star) is None
    assert are_isomorphic(Graph.path(4), Graph.path(5)) is None


def test_isomorphism_errors():
    with pytest.raises(KindMismatch):
        are_isomorphic(Graph.path(3), Tournament.transitive(3))
    with pytest.raises(CapExceeded):
        are_isomorphic(Graph.path(13), Graph.path(13))


@given(graphs(max_n=7), st.randoms(use_true_random=False))
def test_relabelled_graph_is_isomorphic(g, rnd):
    p = list(range(g.n))
    rnd.shuffle(p)
    relabelled = Graph.from_edges(g.n, [(p[a], p[b]) for a, b in g.edges])
    image = are_isomorphic(g, relabelled)
    assert image is not None
    assert preserves(g, relabelled, image)


@given(tournaments(max_n=6))
def test_tournament_isomorphic_to_itself(t):
    image = are_isomorphic(t, t)
    assert image is not None and preserves(t, t, image)


@given(st.one_of(graphs(), tournaments(), ordered_graphs()))
def test_json_round_trip(s):
    assert validate(s) is None
    assert structure_from_json(s.to_json()) == s


def test_canonical_json_is_byte_stable():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert canonical_json(Tournament.cycle3().to_json()) == '{"arcs":[[0,1],[1,2],[2,0]],"kind":"tournament","n":3}'


def test_unknown_kind_is_rejected():
    with pytest.raises(KindMismatch):
        structure_from_json({"kind": "hypergraph", "n": 2})


@st.composite
def structures_with_two_subsets(draw):
    s = draw(st.one_of(graphs(), tournaments(), ordered_graphs()))
    return s, draw(subsets(s.n)), draw(subsets(s.n))


@given(structures_with_two_subsets())
def test_induced_composes(case):
    s, S, T = case
    both = set(S) & set(T)
    direct, relabel = induced(s, both)
    outer, outer_relabel = induced(s, S)
    position = {x: i for i, x in enumerate(outer_relabel)}
    nested, inner_relabel = induced(outer, [position[x] for x in both])
    assert nested == direct
    assert tuple(outer_relabel[i] for i in inner_relabel) == relabel


@given(
    st.one_of(
        st.tuples(graphs(max_n=4), graphs(max_n=4)),
        st.tuples(tournaments(max_n=5), tournaments(max_n=5)),
        st.tuples(ordered_graphs(max_n=6), ordered_graphs(max_n=6)),
    )
)
def test_isomorphism_is_reflexive_and_symmetric(pair):
    a, b = pair
    assert are_isomorphic(a, a) is not None
    forward, backward = are_isomorphic(a, b), are_isomorphic(b, a)
    assert (forward is None) == (backward is None)
    if forward is not None:
        inverse = [0] * a.n
        for x, y in enumerate(forward):
            inverse[y] = x
        assert preserves(b, a, inverse)
