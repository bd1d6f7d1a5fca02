from dataclasses import dataclass
from logging import getLogger
from typing import Iterable, Sequence

from rigidity.analysis import Partition, UnionFind
from rigidity.config import DEFAULTS
from rigidity.errors import CapExceeded
from rigidity.structures import Structure, members, preserves, transpose

LOGGER = getLogger(__name__)

Permutation = tuple[int, ...]


@dataclass(frozen=True)
class AutomorphismSet:
    generators: tuple[Permutation, ...]
    order: int
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "exact": self.exact,
            "generators": [list(g) for g in self.generators],
        }


def _neighbour_lists(s: Structure) -> list[list[list[int]]]:
    lists = []
    for masks in s.relations().values():
        lists.append([members(mask) for mask in masks])
        lists.append([members(mask) for mask in transpose(masks)])
    return lists


def _relabel(signatures: Sequence) -> list[int]:
    index = {sig: i for i, sig in enumerate(sorted(set(signatures)))}
    return [index[sig] for sig in signatures]


def _refine(neighbours: list[list[list[int]]], colours: Sequence[int]) -> list[int]:
    colours = _relabel(colours)
    cells = len(set(colours))
    while True:
        signatures = [
            (colours[v],) + tuple(tuple(sorted(colours[w] for w in lists[v])) for lists in neighbours)
            for v in range(len(colours))
        ]
        refined = _relabel(signatures)
        refined_cells = len(set(refined))
        if refined_cells == cells:
            return refined
        colours, cells = refined, refined_cells


def refine(s: Structure, colours: Sequence[int] | None = None) -> list[int]:
    """Colour refinement to an equitable colouring; colours are isomorphism invariant."""
    return _refine(_neighbour_lists(s), colours if colours is not None else [0] * s.n)


def _individualize(colours: Sequence[int], v: int) -> list[int]:
    result = [2 * c + 1 for c in colours]
    result[v] = 2 * colours[v]
    return result


def _profile(colours: Sequence[int]) -> list[int]:
    sizes = [0] * len(colours)
    for c in colours:
        sizes[c] += 1
    return sizes


def _orbit(point: int, generators: Iterable[Permutation]) -> set[int]:
    generators = list(generators)
    orbit = {point}
    frontier = [point]
    while frontier:
        x = frontier.pop()
        for g in generators:
            if g[x] not in orbit:
                orbit.add(g[x])
                frontier.append(g[x])
    return orbit


def automorphisms(
    s: Structure,
    search_cap: int = DEFAULTS.search_cap,
    node_budget: int = DEFAULTS.node_budget,
) -> AutomorphismSet:
    """Generators of Aut(s) by individualisation-refinement over a stabiliser chain.

    The first path individualises the least vertex of the first non-singleton
    cell until the colouring is discrete. Walking that path bottom-up, for each
    vertex w in the target cell outside the orbit found so far, the subtree
    rooted at w is searched for a leaf whose matching with the first leaf is an
    automorphism. The order is the product of the orbit lengths.
    """
    n = s.n
    if n > search_cap:
        raise CapExceeded(f"Automorphism search is capped at {search_cap} vertices, got {n}")
    neighbours = _neighbour_lists(s)
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise CapExceeded(f"Automorphism search exceeded {node_budget} tree nodes on {n} vertices")

    colouring = _refine(neighbours, [0] * n)
    path_colourings = [colouring]
    path_vertices: list[int] = []
    while len(set(colouring)) < n:
        tick()
        sizes = _profile(colouring)
        target = min(c for c in range(n) if sizes[c] > 1)
        v = colouring.index(target)
        path_vertices.append(v)
        colouring = _refine(neighbours, _individualize(colouring, v))
        path_colourings.append(colouring)

    first_leaf = [0] * n
    for v, c in enumerate(colouring):
        first_leaf[c] = v
    profiles = [_profile(c) for c in path_colourings]

    def explore(depth: int, colours: list[int]) -> Permutation | None:
        tick()
        if _profile(colours) != profiles[depth]:
            return None
        if depth == len(path_vertices):
            image = [0] * n
            for c, v in enumerate(first_leaf):
                image[v] = colours.index(c)
            return tuple(image) if preserves(s, s, image) else None
        anchor = path_vertices[depth]
        target = path_colourings[depth][anchor]
        for u in (u for u in range(n) if colours[u] == target):
            found = explore(depth + 1, _refine(neighbours, _individualize(colours, u)))
            if found:
                return found
        return None

    generators: list[Permutation] = []
    order = 1
    for level in reversed(range(len(path_vertices))):
        v = path_vertices[level]
        prefix = path_vertices[:level]
        base = path_colourings[level]
        stabiliser = [g for g in generators if all(g[p] == p for p in prefix)]
        orbit = _orbit(v, stabiliser)
        for w in range(n):
            if base[w] != base[v] or w in orbit:
                continue
            found = explore(level + 1, _refine(neighbours, _individualize(base, w)))
            if found:
                generators.append(found)
                stabiliser.append(found)
                orbit = _orbit(v, stabiliser)
        order *= len(orbit)

    LOGGER.debug(f"Automorphism search on {n} vertices: {nodes} nodes, order {order}")
    return AutomorphismSet(generators=tuple(generators), order=order)


def is_rigid(s: Structure, **caps: int) -> bool:
    return automorphisms(s, **caps).order == 1


def fixes_pointwise(s: Structure, U: Iterable[int], **caps: int) -> bool:
    """True iff every automorphism of s fixes each vertex of U."""
    U = list(U)
    for u in U:
        s.check_vertex(u)
    if not U:
        return True
    generators = automorphisms(s, **caps).generators
    return all(_orbit(u, generators) == {u} for u in U)


def vertex_orbits(s: Structure, **caps: int) -> Partition:
    orbits = UnionFind(range(s.n))
    for g in automorphisms(s, **caps).generators:
        for x, y in enumerate(g):
            orbits.union(x, y)
    return orbits.partition()
