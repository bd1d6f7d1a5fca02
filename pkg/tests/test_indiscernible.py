import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidity.errors import ExtractionFailed, UnverifiedFamily
from rigidity.indiscernible import (
    BlockKind,
    IndiscernibilityProblem,
    IndiscernibleFamily,
    extract,
    totally_ordered_or_free,
    verify,
    verify_exhaustive,
)
from rigidity.structures import Graph, Tournament, induced, preserves
from tests.strategies import graphs, tournaments


def _family(*blocks) -> IndiscernibleFamily:
    return IndiscernibleFamily(blocks=tuple(tuple(b) for b in blocks), color_class_size=0)


def test_problem_validation():
    with pytest.raises(ValueError):
        IndiscernibilityProblem(ambient=Graph.path(4), A=(0,), Q=((0, 1),), n=1)
    with pytest.raises(ValueError):
        IndiscernibilityProblem(ambient=Graph.path(4), A=(), Q=((1, 2),), n=0)
    with pytest.raises(ValueError):
        IndiscernibilityProblem(ambient=Graph.path(4), A=(), Q=(), n=1)


def test_single_element_blocks_take_the_first_candidate():
    problem = IndiscernibilityProblem(ambient=Graph.path(6), A=(0,), Q=((3, 1), (5, 4)), n=1)
    assert extract(problem).blocks == ((3,), (5,))


def test_extract_from_a_complete_graph():
    problem = IndiscernibilityProblem(ambient=Graph.complete(9), A=(0,), Q=((1, 2, 3, 4), (5, 6, 7, 8)), n=2)
    family = extract(problem)
    assert family.blocks == ((1, 2), (7, 8))
    assert verify(Graph.complete(9), (0,), family) is None


def test_extract_reports_the_largest_set_on_failure():
    # 1..4 see A = {0} in two different ways, so no type class holds three columns
    ambient = Graph.from_edges(5, [(0, 1), (0, 3)])
    problem = IndiscernibilityProblem(ambient=ambient, A=(0,), Q=((1, 2, 3, 4),), n=3)
    with pytest.raises(ExtractionFailed) as raised:
        extract(problem)
    assert len(raised.value.largest) == 2


def test_transitive_tournament_blocks_are_ordered():
    t = Tournament.transitive(9)
    family = extract(IndiscernibilityProblem(ambient=t, A=(0,), Q=((1, 2, 3, 4), (5, 6, 7, 8)), n=2))
    assert family.blocks == ((1, 2), (7, 8))
    assert verify(t, (0,), family) is None
    shape = totally_ordered_or_free(t, (0,), family, 0)
    assert shape.kind == BlockKind.ordered and shape.relation == "arc"


def test_graph_blocks_are_free():
    g = Graph.complete(5)
    shape = totally_ordered_or_free(g, (), _family((0, 1, 2), (3, 4)), 1)
    assert shape.kind == BlockKind.free


def test_shape_needs_a_verified_family():
    with pytest.raises(UnverifiedFamily):
        totally_ordered_or_free(Graph.path(4), (), _family((0, 1, 2)), 0)


def test_verify_counterexamples():
    path = Graph.path(5)
    assert verify(path, (), _family((0, 2, 4))) is None
    assert "differ over A" in verify(path, (1,), _family((0, 2, 4))).reason
    assert verify(path, (), _family((0, 1))) is None
    assert verify(path, (), _family((0, 1, 2))) is not None
    assert "repeated" in verify(path, (0,), _family((0, 2))).reason


@st.composite
def extraction_problems(draw):
    ambient = draw(st.one_of(graphs(min_n=12, max_n=30), tournaments(min_n=12, max_n=30)))
    a = draw(st.integers(0, 2))
    r = draw(st.integers(1, 3))
    n = draw(st.integers(1, 3))
    length = (ambient.n - a) // r
    Q = tuple(tuple(range(a + i * length, a + (i + 1) * length)) for i in range(r))
    return IndiscernibilityProblem(ambient=ambient, A=tuple(range(a)), Q=Q, n=n)


@settings(max_examples=1000)
@given(extraction_problems())
def test_extracted_families_verify(problem):
    try:
        family = extract(problem)
    except ExtractionFailed:
        return
    assert verify(problem.ambient, problem.A, family) is None
    for q, block in zip(problem.Q, family.blocks):
        assert len(block) == problem.n
        indices = [q.index(v) for v in block]
        assert indices == sorted(indices)


@settings(max_examples=100)
@given(st.one_of(graphs(min_n=4, max_n=8), tournaments(min_n=4, max_n=8)), st.randoms(use_true_random=False))
def test_pair_level_agrees_with_the_definition(ambient, rnd):
    vertices = list(range(ambient.n))
    rnd.shuffle(vertices)
    a = rnd.randint(0, 2)
    A, rest = vertices[:a], vertices[a:]
    cut = rnd.randint(1, len(rest))
    blocks = [sorted(rest[:cut])[:3]]
    if cut < len(rest):
        blocks.append(sorted(rest[cut:])[:3])
    family = _family(*blocks)
    assert (verify(ambient, A, family) is None) == (verify_exhaustive(ambient, A, family) is None)


def _same_pattern_map_preserves(ambient, A, first, second) -> bool:
    sub1, relabel1 = induced(ambient, [*A, *first])
    sub2, relabel2 = induced(ambient, [*A, *second])
    image = dict(zip(first, second)) | {a: a for a in A}
    position = {x: i for i, x in enumerate(relabel2)}
    return preserves(sub1, sub2, [position[image[x]] for x in relabel1])


@settings(max_examples=300)
@given(extraction_problems())
def test_same_pattern_configurations_are_interchangeable(problem):
    try:
        family = extract(problem)
    except ExtractionFailed:
        return
    blocks = family.blocks
    assert _same_pattern_map_preserves(
        problem.ambient, problem.A, [b[0] for b in blocks], [b[-1] for b in blocks]
    )
    if problem.n >= 2:
        head, rest = blocks[0], blocks[1:]
        assert _same_pattern_map_preserves(
            problem.ambient,
            problem.A,
            [head[0], head[1], *(b[0] for b in rest)],
            [head[-2], head[-1], *(b[-1] for b in rest)],
        )


@settings(max_examples=300)
@given(extraction_problems())
def test_block_shapes_are_exclusive(problem):
    try:
        family = extract(problem)
    except ExtractionFailed:
        return
    for i in range(len(family.blocks)):
        shape = totally_ordered_or_free(problem.ambient, problem.A, family, i)
        assert shape.kind in (BlockKind.ordered, BlockKind.free)
        assert (shape.relation is not None) == (shape.kind == BlockKind.ordered)
