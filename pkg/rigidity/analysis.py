from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from logging import getLogger
from typing import Iterable

import networkx as nx

from rigidity.errors import DisconnectedGraph
from rigidity.structures import Graph, OrderedGraph, Tournament, members

LOGGER = getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks, each sorted, listed by least member."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        normalized = [tuple(sorted(block)) for block in blocks]
        return cls(blocks=tuple(sorted(block for block in normalized if block)))

    @classmethod
    def from_labels(cls, labels: dict[int, int]) -> "Partition":
        grouped: dict[int, list[int]] = {}
        for vertex, label in labels.items():
            grouped.setdefault(label, []).append(vertex)
        return cls.from_blocks(grouped.values())

    def block_of(self, x: int) -> tuple[int, ...]:
        for block in self.blocks:
            if x in block:
                return block
        raise KeyError(x)

    def non_singletons(self) -> list[tuple[int, ...]]:
        return [block for block in self.blocks if len(block) > 1]

    def to_json(self) -> dict:
        return {"blocks": [list(block) for block in self.blocks]}


class UnionFind:
    def __init__(self, elements: Iterable[int] = ()):
        self.parent = {x: x for x in elements}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True

    def partition(self) -> Partition:
        return Partition.from_labels({x: self.find(x) for x in self.parent})


class Direction(Enum):
    forward = "x->z->y"
    backward = "y->z->x"


@dataclass(frozen=True)
class SeparatorReport:
    pair: tuple[int, int]
    separators: tuple[int, ...]
    directions: tuple[Direction, ...] = ()

    def to_json(self) -> dict:
        x, y = self.pair
        payload = {"pair": [x, y], "separators": list(self.separators)}
        if self.directions:
            payload["directions"] = [
                f"{x}->{z}->{y}" if d == Direction.forward else f"{y}->{z}->{x}"
                for z, d in zip(self.separators, self.directions)
            ]
        return payload


def _check_pair(s, x: int, y: int):
    s.check_vertex(x)
    s.check_vertex(y)
    if x == y:
        raise ValueError(f"Separators need two distinct vertices, got {x} twice")


def graph_separators(g: Graph | OrderedGraph, x: int, y: int) -> SeparatorReport:
    _check_pair(g, x, y)
    difference = (g.adjacency[x] ^ g.adjacency[y]) & ~((1 << x) | (1 << y))
    return SeparatorReport(pair=(x, y), separators=tuple(members(difference)))


def tournament_separators(t: Tournament, x: int, y: int) -> SeparatorReport:
    _check_pair(t, x, y)
    out = t.out_masks
    forward = out[x] & ~out[y] & ~(1 << y)
    backward = out[y] & ~out[x] & ~(1 << x)
    tagged = sorted(
        [(z, Direction.forward) for z in members(forward)]
        + [(z, Direction.backward) for z in members(backward)]
    )
    return SeparatorReport(
        pair=(x, y),
        separators=tuple(z for z, _ in tagged),
        directions=tuple(d for _, d in tagged),
    )


class ClassType(Enum):
    complete = "complete"
    null = "null"
    mixed = "mixed"


@dataclass(frozen=True)
class ApproxClasses:
    partition: Partition
    types: tuple[ClassType, ...]

    def type_of(self, block: tuple[int, ...]) -> ClassType:
        return self.types[self.partition.blocks.index(block)]

    def to_json(self) -> dict:
        return self.partition.to_json() | {"types": [t.value for t in self.types]}


def class_type(g: Graph | OrderedGraph, block: Iterable[int]) -> ClassType:
    """Singletons count as null."""
    pairs = list(combinations(block, 2))
    adjacent = sum(g.has_edge(a, b) for a, b in pairs)
    if pairs and adjacent == len(pairs):
        return ClassType.complete
    if adjacent == 0:
        return ClassType.null
    return ClassType.mixed


def approx_classes(g: Graph | OrderedGraph, Y: Iterable[int]) -> ApproxClasses:
    """Classes of x ≈_Y y, i.e. (Γ(x)△Γ(y)) ∩ Y ⊆ {x, y}, with their induced types."""
    Y = sorted(set(Y))
    for x in Y:
        g.check_vertex(x)
    y_mask = sum(1 << x for x in Y)
    adjacency = g.adjacency
    classes = UnionFind(Y)
    for x, y in combinations(Y, 2):
        outside = y_mask & ~((1 << x) | (1 << y))
        if not (adjacency[x] ^ adjacency[y]) & outside:
            classes.union(x, y)
    partition = classes.partition()
    types = tuple(class_type(g, block) for block in partition.blocks)
    if ClassType.mixed in types:
        LOGGER.warning(f"Mixed ≈_Y class found in {partition.blocks}")
    return ApproxClasses(partition=partition, types=types)


def is_transitive_set(t: Tournament, mask: int) -> bool:
    """A tournament is a total order iff its score sequence has no repeats."""
    scores = set()
    for v in members(mask):
        score = (t.out_masks[v] & mask).bit_count()
        if score in scores:
            return False
        scores.add(score)
    return True


def module_closure(t: Tournament, S: Iterable[int], stop_when_cyclic: bool = False) -> int:
    """Smallest nice set containing S, as a bitmask.

    With ``stop_when_cyclic`` the growth stops as soon as the set stops being
    totally ordered; the returned mask is then only a subset of the closure.
    """
    out = t.out_masks
    closed = sum(1 << v for v in S)
    while True:
        added = 0
        for v in range(t.n):
            if closed >> v & 1:
                continue
            hits = out[v] & closed
            if hits and hits != closed:
                added |= 1 << v
        if not added:
            return closed
        closed |= added
        if stop_when_cyclic and not is_transitive_set(t, closed):
            return closed


def maximal_good_partition(t: Tournament) -> Partition:
    """Blocks are the maximal good sets, i.e. maximal nice totally ordered sets.

    x and y share a block iff the module closure of {x, y} is totally ordered.
    Separators of a pair inside one good block all lie between the pair, which
    rules out most pairs before any closure is computed.
    """
    out = t.out_masks
    label = [-1] * t.n
    for x in range(t.n):
        if label[x] >= 0:
            continue
        label[x] = x
        for y in range(x + 1, t.n):
            if label[y] >= 0:
                continue
            low, high = (x, y) if out[x] >> y & 1 else (y, x)
            wrong_side = out[high] & ~out[low] & ~(1 << low)
            if wrong_side:
                continue
            closure = module_closure(t, (x, y), stop_when_cyclic=True)
            if is_transitive_set(t, closure):
                for v in members(closure):
                    label[v] = x
    partition = Partition.from_labels(dict(enumerate(label)))
    LOGGER.debug(f"Maximal good partition of {t.n} vertices: {len(partition.blocks)} blocks")
    return partition


def is_nice(t: Tournament, mask: int) -> bool:
    return module_closure(t, members(mask)) == mask


def is_good(t: Tournament, mask: int) -> bool:
    return is_nice(t, mask) and is_transitive_set(t, mask)


@dataclass(frozen=True)
class Equiv0Classes:
    partition: Partition
    raw_transitive: bool

    def to_json(self) -> dict:
        return self.partition.to_json() | {"rawTransitive": self.raw_transitive}


def equiv0_classes(g: Graph | OrderedGraph, threshold: int) -> Equiv0Classes:
    """Transitive closure of |Γ(x)△Γ(y)| <= threshold."""
    adjacency = g.adjacency
    close = {
        (x, y)
        for x, y in combinations(range(g.n), 2)
        if (adjacency[x] ^ adjacency[y]).bit_count() <= threshold
    }
    classes = UnionFind(range(g.n))
    for x, y in close:
        classes.union(x, y)
    partition = classes.partition()
    raw_transitive = all(
        (x, y) in close for block in partition.blocks for x, y in combinations(block, 2)
    )
    if not raw_transitive:
        LOGGER.info(f"Thresholded relation at {threshold} is not transitive; closure taken")
    return Equiv0Classes(partition=partition, raw_transitive=raw_transitive)


def even_distance_graph(g: Graph | OrderedGraph) -> Graph:
    """Join x and y whenever their distance in g is even and positive."""
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(g.n))
    nx_graph.add_edges_from(g.base.edges if isinstance(g, OrderedGraph) else g.edges)
    if g.n > 0 and not nx.is_connected(nx_graph):
        raise DisconnectedGraph(
            f"Graph has {nx.number_connected_components(nx_graph)} components; distances are undefined"
        )
    edges = set()
    for x, distances in nx.all_pairs_shortest_path_length(nx_graph):
        for y, distance in distances.items():
            if x < y and distance > 0 and distance % 2 == 0:
                edges.add((x, y))
    return Graph(n=g.n, edges=frozenset(edges))
