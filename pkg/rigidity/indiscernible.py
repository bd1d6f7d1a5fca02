"""Mutually indiscernible blocks over a base set.

Blocks P_1..P_r (each an indexed sequence) are mutually indiscernible over A
when replacing, block by block, an increasing tuple with another increasing
tuple of the same length, while fixing A, is always an isomorphism of the
induced configuration.

All relations here are binary, so checking pairs and singletons suffices:
every element of a block has the same type over A, every increasing pair
inside a block has the same type, and every cross-block pair between two
given blocks has the same type. ``verify_exhaustive`` checks the literal
definition on small instances.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from logging import getLogger
from typing import Iterable, Sequence

from rigidity.errors import ExtractionFailed, UnverifiedFamily
from rigidity.structures import Structure

LOGGER = getLogger(__name__)


@dataclass(frozen=True)
class IndiscernibilityProblem:
    ambient: Structure
    A: tuple[int, ...]
    Q: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Block size must be at least 1, got {self.n}")
        if not self.Q:
            raise ValueError("At least one candidate set is required")
        seen = set(self.A)
        for candidates in self.Q:
            for v in candidates:
                self.ambient.check_vertex(v)
                if v in seen:
                    raise ValueError(f"Vertex {v} occurs twice among A and the candidate sets")
                seen.add(v)

    @classmethod
    def from_json(cls, ambient: Structure, data: dict) -> "IndiscernibilityProblem":
        return cls(
            ambient=ambient,
            A=tuple(data.get("A", [])),
            Q=tuple(tuple(q) for q in data["Q"]),
            n=int(data["n"]),
        )


@dataclass(frozen=True)
class IndiscernibleFamily:
    blocks: tuple[tuple[int, ...], ...]
    color_class_size: int

    def to_json(self) -> dict:
        return {"P": [list(block) for block in self.blocks], "colorClassSize": self.color_class_size}


@dataclass(frozen=True)
class Counterexample:
    reason: str
    witness: tuple[int, ...]

    def to_json(self) -> dict:
        return {"reason": self.reason, "witness": list(self.witness)}


class BlockKind(Enum):
    ordered = "ordered-by-relation"
    free = "freely-permutable"


@dataclass(frozen=True)
class BlockShape:
    kind: BlockKind
    relation: str | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "relation": self.relation}


def _pair_type(relations: Sequence[tuple[int, ...]], a: int, b: int) -> tuple[int, ...]:
    bits = []
    for masks in relations:
        bits.append(masks[a] >> b & 1)
        bits.append(masks[b] >> a & 1)
    return tuple(bits)


def _type_over(relations: Sequence[tuple[int, ...]], v: int, A: Iterable[int]) -> tuple:
    return tuple(_pair_type(relations, v, a) for a in A)


def _greedy_monochromatic(indices: list[int], colour) -> list[int]:
    """Pivot on the least index, keep its largest colour class, repeat.

    Pivots sharing their colour, plus the final pivot, form a monochromatic set.
    """
    pivots: list[tuple[int, object]] = []
    candidates = indices
    while candidates:
        pivot, rest = candidates[0], candidates[1:]
        if not rest:
            pivots.append((pivot, None))
            break
        classes: dict[object, list[int]] = {}
        for j in rest:
            classes.setdefault(colour(pivot, j), []).append(j)
        chosen, candidates = max(classes.items(), key=lambda item: len(item[1]))
        pivots.append((pivot, chosen))
    tally: dict[object, int] = {}
    for _, c in pivots[:-1]:
        tally[c] = tally.get(c, 0) + 1
    if not tally:
        return [pivots[-1][0]] if pivots else []
    best = max(tally, key=tally.get)
    return [p for p, c in pivots[:-1] if c == best] + [pivots[-1][0]]


def extract(p: IndiscernibilityProblem) -> IndiscernibleFamily:
    """Greedy Ramsey extraction of r blocks of size n, mutually indiscernible over A.

    Index pairs {i < j} are coloured by the type over A of
    (q_1i, q_1j, ..., q_ri, q_rj); a monochromatic index set m of size r*n
    gives P_i = (q_i[m[(i-1)n]], ..., q_i[m[in - 1]]).
    """
    r, n = len(p.Q), p.n
    if n == 1:
        return IndiscernibleFamily(blocks=tuple((q[0],) for q in p.Q), color_class_size=1)

    relations = list(p.ambient.relations().values())
    length = min(len(q) for q in p.Q)
    need = r * n

    def colour(i: int, j: int) -> tuple:
        configuration = [v for q in p.Q for v in (q[i], q[j])]
        return tuple(_pair_type(relations, a, b) for a, b in combinations(configuration, 2))

    column_types: dict[tuple, list[int]] = {}
    for c in range(length):
        key = tuple(_type_over(relations, q[c], p.A) for q in p.Q)
        column_types.setdefault(key, []).append(c)

    largest: list[int] = []
    for columns in sorted(column_types.values(), key=len, reverse=True):
        if len(columns) < need and len(columns) <= len(largest):
            break
        mono = _greedy_monochromatic(columns, colour)
        if len(mono) > len(largest):
            largest = mono
        if len(mono) >= need:
            used = mono[:need]
            blocks = tuple(
                tuple(q[used[i * n + s]] for s in range(n)) for i, q in enumerate(p.Q)
            )
            family = IndiscernibleFamily(blocks=blocks, color_class_size=len(mono))
            if counterexample := verify(p.ambient, p.A, family):
                raise ExtractionFailed(f"Extracted family failed verification: {counterexample.reason}", used)
            LOGGER.debug(f"Extracted {r} blocks of size {n} from {length} columns")
            return family

    raise ExtractionFailed(
        f"No monochromatic index set of size {need} among {length} columns; largest has {len(largest)}",
        largest,
    )


def verify(ambient: Structure, A: Iterable[int], family: IndiscernibleFamily) -> Counterexample | None:
    """Pair-level check of mutual indiscernibility; None when the family passes."""
    A = tuple(A)
    relations = list(ambient.relations().values())
    used = set(A)
    for block in family.blocks:
        for v in block:
            if v in used:
                return Counterexample(f"vertex {v} is repeated across A and the blocks", (v,))
            used.add(v)

    for i, block in enumerate(family.blocks):
        reference = _type_over(relations, block[0], A)
        for v in block[1:]:
            if _type_over(relations, v, A) != reference:
                return Counterexample(f"{block[0]} and {v} in P{i} differ over A", (block[0], v))
        if len(block) >= 2:
            reference = _pair_type(relations, block[0], block[1])
            for a, b in combinations(block, 2):
                if _pair_type(relations, a, b) != reference:
                    return Counterexample(
                        f"pairs ({block[0]},{block[1]}) and ({a},{b}) of P{i} differ", (block[0], block[1], a, b)
                    )

    for (i, first), (j, second) in combinations(enumerate(family.blocks), 2):
        reference = _pair_type(relations, first[0], second[0])
        for a, b in product(first, second):
            if _pair_type(relations, a, b) != reference:
                return Counterexample(
                    f"cross pairs ({first[0]},{second[0]}) and ({a},{b}) of P{i}, P{j} differ",
                    (first[0], second[0], a, b),
                )
    return None


def verify_exhaustive(
    ambient: Structure, A: Iterable[int], family: IndiscernibleFamily, max_arity: int = 3
) -> Counterexample | None:
    """The defining condition for every tuple length up to ``max_arity`` per block."""
    A = tuple(A)
    relations = list(ambient.relations().values())
    shapes = product(*(range(min(max_arity, len(block)) + 1) for block in family.blocks))
    for shape in shapes:
        choices = product(*(combinations(block, e) for block, e in zip(family.blocks, shape)))
        reference = next(choices)
        domain = list(A) + [v for chosen in reference for v in chosen]
        for choice in choices:
            image = list(A) + [v for chosen in choice for v in chosen]
            for (a, fa), (b, fb) in combinations(zip(domain, image), 2):
                if _pair_type(relations, a, b) != _pair_type(relations, fa, fb):
                    return Counterexample(f"replacing {reference} by {choice} breaks ({a},{b})", (a, b, fa, fb))
    return None


def totally_ordered_or_free(
    ambient: Structure, A: Iterable[int], family: IndiscernibleFamily, i: int
) -> BlockShape:
    """Whether some relation totally orders block i, or every permutation of it is an automorphism."""
    if counterexample := verify(ambient, A, family):
        raise UnverifiedFamily(f"Family is not mutually indiscernible: {counterexample.reason}")
    block = family.blocks[i]
    if len(block) < 2:
        return BlockShape(BlockKind.free)
    a, b = block[0], block[1]
    for name, masks in ambient.relations().items():
        if (masks[a] >> b & 1) != (masks[b] >> a & 1):
            return BlockShape(BlockKind.ordered, name)
    return BlockShape(BlockKind.free)
