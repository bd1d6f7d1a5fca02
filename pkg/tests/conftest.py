import pytest
from hypothesis import settings

from rigidity.oracles import OracleKind, OracleSpec
from rigidity.structures import Graph, Tournament

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def rado() -> OracleSpec:
    return OracleSpec(kind=OracleKind.rado)


@pytest.fixture
def generic() -> OracleSpec:
    return OracleSpec(kind=OracleKind.generic_tournament, seed=0)


@pytest.fixture
def cycle3() -> Tournament:
    return Tournament.cycle3()


@pytest.fixture
def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)
