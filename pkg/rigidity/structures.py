from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from json import dumps as json_dumps
from logging import getLogger
from typing import Iterable

from rigidity.config import DEFAULTS
from rigidity.errors import CapExceeded, KindMismatch, VertexOutOfRange

LOGGER = getLogger(__name__)

Pair = tuple[int, int]


class StructureKind(Enum):
    graph = "graph"
    tournament = "tournament"
    ordered_graph = "ordered-graph"


def _sorted_pairs(pairs: Iterable[Pair]) -> list[list[int]]:
    return [list(pair) for pair in sorted(pairs)]


def _masks_from_pairs(n: int, pairs: Iterable[Pair], symmetric: bool) -> tuple[int, ...]:
    masks = [0] * n
    for a, b in pairs:
        masks[a] |= 1 << b
        if symmetric:
            masks[b] |= 1 << a
    return tuple(masks)


def transpose(masks: tuple[int, ...]) -> tuple[int, ...]:
    """Reverse every arc of a relation stored as out-masks."""
    result = [0] * len(masks)
    for x, mask in enumerate(masks):
        while mask:
            low = mask & -mask
            result[low.bit_length() - 1] |= 1 << x
            mask ^= low
    return tuple(result)


def members(mask: int) -> list[int]:
    found = []
    while mask:
        low = mask & -mask
        found.append(low.bit_length() - 1)
        mask ^= low
    return found


@dataclass(frozen=True)
class Violation:
    message: str
    witness: tuple[int, ...] = ()

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Pair]

    kind = StructureKind.graph

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "Graph":
        normalized = set()
        for a, b in (tuple(edge) for edge in edges):
            normalized.add((a, b) if a < b else (b, a))
        return cls(n=n, edges=frozenset(normalized))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n=n, edges=frozenset(combinations(range(n), 2)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n=n, edges=frozenset((i, i + 1) for i in range(n - 1)))

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        return _masks_from_pairs(self.n, self.edges, symmetric=True)

    def check_vertex(self, x: int):
        if not 0 <= x < self.n:
            raise VertexOutOfRange(x, self.n)

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self.adjacency[x] >> y & 1)

    def neighbors(self, x: int) -> frozenset[int]:
        self.check_vertex(x)
        return frozenset(members(self.adjacency[x]))

    def relations(self) -> dict[str, tuple[int, ...]]:
        return {"edge": self.adjacency}

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "edges": _sorted_pairs(self.edges)}


@dataclass(frozen=True)
class Tournament:
    """Each unordered pair is stored once, as the arc that is present."""

    n: int
    arcs: frozenset[Pair]

    kind = StructureKind.tournament

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Iterable[int]]) -> "Tournament":
        return cls(n=n, arcs=frozenset(tuple(arc) for arc in arcs))

    @classmethod
    def transitive(cls, n: int) -> "Tournament":
        return cls(n=n, arcs=frozenset(combinations(range(n), 2)))

    @classmethod
    def cycle3(cls) -> "Tournament":
        return cls(n=3, arcs=frozenset({(0, 1), (1, 2), (2, 0)}))

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        return _masks_from_pairs(self.n, self.arcs, symmetric=False)

    def check_vertex(self, x: int):
        if not 0 <= x < self.n:
            raise VertexOutOfRange(x, self.n)

    def has_arc(self, x: int, y: int) -> bool:
        return bool(self.out_masks[x] >> y & 1)

    def outneighbors(self, x: int) -> frozenset[int]:
        self.check_vertex(x)
        return frozenset(members(self.out_masks[x]))

    def relations(self) -> dict[str, tuple[int, ...]]:
        return {"arc": self.out_masks}

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "arcs": _sorted_pairs(self.arcs)}


@dataclass(frozen=True)
class OrderedGraph:
    """A graph together with a strict partial order; (a, b) in order means a < b."""

    base: Graph
    order: frozenset[Pair]

    kind = StructureKind.ordered_graph

    @classmethod
    def unordered(cls, base: Graph) -> "OrderedGraph":
        return cls(base=base, order=frozenset())

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def adjacency(self) -> tuple[int, ...]:
        return self.base.adjacency

    @cached_property
    def above(self) -> tuple[int, ...]:
        return _masks_from_pairs(self.n, self.order, symmetric=False)

    def check_vertex(self, x: int):
        self.base.check_vertex(x)

    def has_edge(self, x: int, y: int) -> bool:
        return self.base.has_edge(x, y)

    def less(self, x: int, y: int) -> bool:
        return bool(self.above[x] >> y & 1)

    def neighbors(self, x: int) -> frozenset[int]:
        return self.base.neighbors(x)

    def relations(self) -> dict[str, tuple[int, ...]]:
        return {"edge": self.base.adjacency, "order": self.above}

    def to_json(self) -> dict:
        return self.base.to_json() | {
            "kind": self.kind.value,
            "order": _sorted_pairs(self.order),
        }


Structure = Graph | Tournament | OrderedGraph


def structure_from_json(data: dict) -> Structure:
    n = int(data["n"])
    match data["kind"]:
        case "graph":
            return Graph.from_edges(n, data.get("edges", []))
        case "tournament":
            return Tournament.from_arcs(n, data.get("arcs", []))
        case "ordered-graph":
            return OrderedGraph(
                base=Graph.from_edges(n, data.get("edges", [])),
                order=frozenset(tuple(pair) for pair in data.get("order", [])),
            )
        case _:
            raise KindMismatch(f"Unknown structure kind {data['kind']!r}")


def canonical_json(payload) -> str:
    """Byte-stable JSON text: sorted keys, no insignificant whitespace."""
    return json_dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _check_pairs(n: int, pairs: Iterable[Pair], label: str) -> Violation | None:
    for a, b in sorted(pairs):
        if a == b:
            return Violation(f"loop on {a} in {label}", (a,))
        if not (0 <= a < n and 0 <= b < n):
            return Violation(f"{label} pair ({a},{b}) out of range for n={n}", (a, b))
    return None


def validate(s: Structure) -> Violation | None:
    """Return None when every invariant of the structure holds, else the first violation."""
    if s.n < 0:
        return Violation(f"negative vertex count {s.n}")
    match s:
        case Graph():
            return _check_pairs(s.n, s.edges, "edges")
        case Tournament():
            if violation := _check_pairs(s.n, s.arcs, "arcs"):
                return violation
            for a, b in sorted(s.arcs):
                if (b, a) in s.arcs and a < b:
                    return Violation(f"both directions on {{{a},{b}}}", (a, b))
            for a, b in combinations(range(s.n), 2):
                if (a, b) not in s.arcs and (b, a) not in s.arcs:
                    return Violation(f"no arc on {{{a},{b}}}", (a, b))
            return None
        case OrderedGraph():
            if violation := validate(s.base):
                return violation
            if violation := _check_pairs(s.n, s.order, "order"):
                return violation
            for a, b in sorted(s.order):
                if (b, a) in s.order:
                    return Violation(f"order not antisymmetric on {{{a},{b}}}", (a, b))
            above = s.above
            for a, b in sorted(s.order):
                missing = above[b] & ~above[a]
                if missing:
                    c = members(missing)[0]
                    return Violation(f"order not transitive: ({a},{b}),({b},{c}) without ({a},{c})", (a, b, c))
            return None
        case _:
            raise KindMismatch(f"Cannot validate {type(s).__name__}")


def _restrict_pairs(pairs: Iterable[Pair], index: dict[int, int]) -> frozenset[Pair]:
    return frozenset(
        (index[a], index[b]) for a, b in pairs if a in index and b in index
    )


def induced(s: Structure, S: Iterable[int]) -> tuple[Structure, tuple[int, ...]]:
    """Substructure on S, reindexed in increasing original order.

    The second element maps each new vertex id to its original id.
    """
    relabel = tuple(sorted(set(S)))
    for x in relabel:
        s.check_vertex(x)
    index = {x: i for i, x in enumerate(relabel)}
    n = len(relabel)
    match s:
        case Graph():
            return Graph(n=n, edges=_restrict_pairs(s.edges, index)), relabel
        case Tournament():
            return Tournament(n=n, arcs=_restrict_pairs(s.arcs, index)), relabel
        case OrderedGraph():
            base = Graph(n=n, edges=_restrict_pairs(s.base.edges, index))
            return OrderedGraph(base=base, order=_restrict_pairs(s.order, index)), relabel
        case _:
            raise KindMismatch(f"Cannot induce on {type(s).__name__}")


def neighbors(g: Graph | OrderedGraph, x: int) -> frozenset[int]:
    return g.neighbors(x)


def outneighbors(t: Tournament, x: int) -> frozenset[int]:
    return t.outneighbors(x)


def vertex_profile(s: Structure, x: int) -> tuple[int, ...]:
    """Out- and in-degree of x in every relation; an isomorphism invariant."""
    profile = []
    for masks in s.relations().values():
        profile.append(masks[x].bit_count())
        profile.append(sum(mask >> x & 1 for mask in masks))
    return tuple(profile)


def preserves(s1: Structure, s2: Structure, mapping: dict[int, int] | list[int] | tuple[int, ...]) -> bool:
    """True when mapping (a bijection given by images) carries every relation of s1 onto s2."""
    for masks1, masks2 in zip(s1.relations().values(), s2.relations().values()):
        for x in range(s1.n):
            image = 0
            for y in members(masks1[x]):
                image |= 1 << mapping[y]
            if image != masks2[mapping[x]]:
                return False
    return True


def are_isomorphic(
    s1: Structure,
    s2: Structure,
    kind: StructureKind | None = None,
    cap: int = DEFAULTS.iso_cap,
) -> tuple[int, ...] | None:
    """Exhaustive isomorphism search; returns the images of 0..n-1 or None."""
    kind = kind or s1.kind
    if s1.kind != kind or s2.kind != kind:
        raise KindMismatch(f"Expected two {kind.value} structures, got {s1.kind.value} and {s2.kind.value}")
    if s1.n != s2.n:
        return None
    if s1.n > cap:
        raise CapExceeded(f"Isomorphism search is capped at {cap} vertices, got {s1.n}")

    n = s1.n
    profiles1 = [vertex_profile(s1, x) for x in range(n)]
    profiles2 = [vertex_profile(s2, x) for x in range(n)]
    if sorted(profiles1) != sorted(profiles2):
        return None

    rel1 = list(s1.relations().values())
    rel2 = list(s2.relations().values())
    image: list[int] = []
    used = 0

    def consistent(x: int, y: int) -> bool:
        for masks1, masks2 in zip(rel1, rel2):
            for earlier, target in enumerate(image):
                if (masks1[x] >> earlier & 1) != (masks2[y] >> target & 1):
                    return False
                if (masks1[earlier] >> x & 1) != (masks2[target] >> y & 1):
                    return False
        return True

    def extend() -> bool:
        nonlocal used
        x = len(image)
        if x == n:
            return True
        for y in range(n):
            if used >> y & 1 or profiles2[y] != profiles1[x] or not consistent(x, y):
                continue
            image.append(y)
            used |= 1 << y
            if extend():
                return True
            image.pop()
            used &= ~(1 << y)
        return False

    return tuple(image) if extend() else None
