"""Finite permutation groups: orbits, orbit-equivalence, closures, relation groups.

A permutation is a tuple ``p`` with ``p[x]`` the image of ``x``. Groups are
given by generators; order, membership and element lists come from
``sympy.combinatorics``. Everything else works on explicit orbits.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations, permutations
from logging import getLogger
from math import comb, perm
from typing import Iterable, Iterator

from sympy.combinatorics import Permutation
from sympy.combinatorics import PermutationGroup as SympyGroup
from sympy.combinatorics.named_groups import AlternatingGroup, CyclicGroup, DihedralGroup, SymmetricGroup

from rigidity.analysis import UnionFind
from rigidity.config import DEFAULTS
from rigidity.errors import CapExceeded

LOGGER = getLogger(__name__)

Perm = tuple[int, ...]
Element = tuple[int, ...]

CYCLE = re.compile(r"\(([^()]*)\)")


def _identity(degree: int) -> Perm:
    return tuple(range(degree))


def parse_cycles(text: str, degree: int | None = None) -> tuple[list[Perm], int]:
    """Parse ``"(0 1 2)(3 4); (0 1)"`` into image tuples and the degree used.

    Generators are separated by semicolons, points inside a cycle by spaces or
    commas. Cycles within one generator are composed left to right. Without an
    explicit degree the largest point plus one is used.
    """
    generators: list[list[list[int]]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if CYCLE.sub("", chunk).strip():
            raise ValueError(f"Malformed cycle notation {chunk!r}")
        cycles = []
        for body in CYCLE.findall(chunk):
            points = [int(p) for p in re.split(r"[\s,]+", body.strip()) if p]
            if len(set(points)) != len(points):
                raise ValueError(f"Repeated point in cycle ({body})")
            if points:
                cycles.append(points)
        generators.append(cycles)
    largest = max((p for cycles in generators for cycle in cycles for p in cycle), default=-1)
    if degree is None:
        degree = max(largest + 1, 1)
    elif largest >= degree:
        raise ValueError(f"Point {largest} is out of range for degree {degree}")
    parsed = []
    for cycles in generators:
        if not cycles:
            parsed.append(_identity(degree))
            continue
        parsed.append(tuple(Permutation(cycles, size=degree).array_form))
    return parsed, degree


def format_cycles(p: Perm) -> str:
    cycles = Permutation(list(p)).cyclic_form
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x) for x in cycle) + ")" for cycle in cycles)


@dataclass(frozen=True)
class PermutationGroup:
    degree: int
    generators: tuple[Perm, ...] = ()

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"Degree must be positive, got {self.degree}")
        for g in self.generators:
            if sorted(g) != list(range(self.degree)):
                raise ValueError(f"{list(g)} is not a permutation of 0..{self.degree - 1}")

    @classmethod
    def parse(cls, text: str, degree: int | None = None) -> "PermutationGroup":
        generators, degree = parse_cycles(text, degree)
        return cls(degree=degree, generators=tuple(generators))

    @classmethod
    def from_sympy(cls, group: SympyGroup) -> "PermutationGroup":
        degree = group.degree
        generators = []
        for g in group.generators:
            image = list(g.array_form)
            generators.append(tuple(image + list(range(len(image), degree))))
        return cls(degree=degree, generators=tuple(generators))

    @classmethod
    def symmetric(cls, degree: int) -> "PermutationGroup":
        return cls.from_sympy(SymmetricGroup(degree))

    @classmethod
    def alternating(cls, degree: int) -> "PermutationGroup":
        if degree < 3:
            return cls(degree=degree)
        return cls.from_sympy(AlternatingGroup(degree))

    @classmethod
    def cyclic(cls, degree: int) -> "PermutationGroup":
        return cls.from_sympy(CyclicGroup(degree))

    @classmethod
    def dihedral(cls, degree: int) -> "PermutationGroup":
        if degree < 3:
            return cls.symmetric(degree)
        return cls.from_sympy(DihedralGroup(degree))

    @cached_property
    def as_sympy(self) -> SympyGroup:
        generators = self.generators or (_identity(self.degree),)
        return SympyGroup([Permutation(list(g)) for g in generators])

    @cached_property
    def element_list(self) -> tuple[Perm, ...]:
        return tuple(sorted(tuple(af) for af in self.as_sympy.generate(af=True)))

    @cached_property
    def element_set(self) -> frozenset[Perm]:
        return frozenset(self.element_list)

    def order(self) -> int:
        return int(self.as_sympy.order())

    def contains(self, p: Iterable[int]) -> bool:
        p = tuple(p)
        if len(p) != self.degree:
            return False
        return bool(self.as_sympy.contains(Permutation(list(p))))

    def is_subgroup_of(self, other: "PermutationGroup") -> bool:
        return self.degree == other.degree and all(other.contains(g) for g in self.generators)

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [format_cycles(g) for g in self.generators]}

    def __str__(self) -> str:
        return "; ".join(format_cycles(g) for g in self.generators) or "()"


class OrbitAction(Enum):
    points = "points"
    tuples = "tuples"
    subsets = "subsets"
    power_set = "power-set"


@dataclass(frozen=True)
class OrbitFamily:
    on: OrbitAction
    k: int
    orbits: tuple[tuple[Element, ...], ...]

    def as_partition(self) -> frozenset[frozenset[Element]]:
        return frozenset(frozenset(orbit) for orbit in self.orbits)

    def lengths(self) -> list[int]:
        return [len(orbit) for orbit in self.orbits]

    def to_json(self) -> dict:
        return {
            "on": self.on.value,
            "k": self.k,
            "orbits": [[list(element) for element in orbit] for orbit in self.orbits],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OrbitFamily":
        return cls(
            on=OrbitAction(data["on"]),
            k=int(data.get("k", 1)),
            orbits=tuple(tuple(tuple(element) for element in orbit) for orbit in data["orbits"]),
        )


def domain_size(degree: int, on: OrbitAction, k: int) -> int:
    match on:
        case OrbitAction.points:
            return degree
        case OrbitAction.tuples:
            return perm(degree, k)
        case OrbitAction.subsets:
            return comb(degree, k)
        case OrbitAction.power_set:
            return 2**degree


def _domain(degree: int, on: OrbitAction, k: int) -> Iterator[Element]:
    match on:
        case OrbitAction.points:
            return ((x,) for x in range(degree))
        case OrbitAction.tuples:
            return permutations(range(degree), k)
        case OrbitAction.subsets:
            return combinations(range(degree), k)
        case OrbitAction.power_set:
            return (s for size in range(degree + 1) for s in combinations(range(degree), size))


def act(p: Perm, element: Element, on: OrbitAction) -> Element:
    image = tuple(p[x] for x in element)
    if on in (OrbitAction.subsets, OrbitAction.power_set):
        return tuple(sorted(image))
    return image


def orbits(
    G: PermutationGroup, on: OrbitAction = OrbitAction.points, k: int = 1, cap: int = DEFAULTS.orbit_cap
) -> OrbitFamily:
    """Orbit partition of G acting on points, distinct k-tuples, k-subsets or all subsets.

    Orbits list their elements in enumeration order and are listed by first element.
    """
    if k < 0:
        raise ValueError(f"Arity must be non-negative, got {k}")
    size = domain_size(G.degree, on, k)
    if size > cap:
        raise CapExceeded(f"{size} {on.value} of degree {G.degree} exceed the orbit cap {cap}")
    elements = list(_domain(G.degree, on, k))
    index = {e: i for i, e in enumerate(elements)}
    classes = UnionFind(range(len(elements)))
    for i, e in enumerate(elements):
        for g in G.generators:
            classes.union(i, index[act(g, e, on)])
    grouped: dict[int, list[Element]] = {}
    for i, e in enumerate(elements):
        grouped.setdefault(classes.find(i), []).append(e)
    family = OrbitFamily(on=on, k=k if on != OrbitAction.power_set else 0, orbits=tuple(tuple(o) for o in grouped.values()))
    LOGGER.debug(f"{len(family.orbits)} orbits on {size} {on.value} of degree {G.degree}")
    return family


@dataclass(frozen=True)
class LevelVerdict:
    k: int
    subsets: bool
    tuples: bool


@dataclass(frozen=True)
class OrbitEquivalence:
    degree: int
    levels: tuple[LevelVerdict, ...]

    @property
    def subsets_diverge_at(self) -> int | None:
        return next((level.k for level in self.levels if not level.subsets), None)

    @property
    def tuples_diverge_at(self) -> int | None:
        return next((level.k for level in self.levels if not level.tuples), None)

    @property
    def equivalent(self) -> bool:
        return self.subsets_diverge_at is None

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "levels": [{"k": v.k, "subsets": v.subsets, "tuples": v.tuples} for v in self.levels],
            "subsetsDivergeAt": self.subsets_diverge_at,
            "tuplesDivergeAt": self.tuples_diverge_at,
        }


def _same_degree(G: PermutationGroup, H: PermutationGroup):
    if G.degree != H.degree:
        raise ValueError(f"Groups act on different degrees {G.degree} and {H.degree}")


def orbit_equivalent(
    G: PermutationGroup, H: PermutationGroup, kmax: int, cap: int = DEFAULTS.orbit_cap
) -> OrbitEquivalence:
    _same_degree(G, H)
    levels = []
    for k in range(1, kmax + 1):
        same = [
            orbits(G, on, k, cap).as_partition() == orbits(H, on, k, cap).as_partition()
            for on in (OrbitAction.subsets, OrbitAction.tuples)
        ]
        levels.append(LevelVerdict(k=k, subsets=same[0], tuples=same[1]))
    return OrbitEquivalence(degree=G.degree, levels=tuple(levels))


def _check_degree(G: PermutationGroup, cap: int, operation: str):
    if G.degree > cap:
        raise CapExceeded(f"{operation} is capped at degree {cap}, got {G.degree}")


def _mask_labels(G: PermutationGroup) -> list[int]:
    """Orbit label of every subset of the points, subsets given as bitmasks."""
    size = 1 << G.degree
    classes = UnionFind(range(size))
    for g in G.generators:
        images = _mask_images(g)
        for mask in range(size):
            classes.union(mask, images[mask])
    return [classes.find(mask) for mask in range(size)]


def _mask_images(p: Perm) -> list[int]:
    images = [0] * (1 << len(p))
    for mask in range(1, len(images)):
        low = mask & -mask
        images[mask] = images[mask ^ low] | 1 << p[low.bit_length() - 1]
    return images


def _preserves_labels(p: Perm, labels: list[int]) -> bool:
    # subsets come in order of their masks, so small supports are checked first
    images = [0] * len(labels)
    for mask in range(1, len(labels)):
        low = mask & -mask
        images[mask] = images[mask ^ low] | 1 << p[low.bit_length() - 1]
        if labels[images[mask]] != labels[mask]:
            return False
    return True


def orbit_closure(G: PermutationGroup, degree_cap: int = DEFAULTS.closure_degree_cap) -> PermutationGroup:
    """All permutations that map every G-orbit on subsets onto itself.

    G is orbit-closed exactly when this group equals ⟨G⟩. Fixed points and
    intransitive actions need no special handling: a permutation mixing two
    G-orbits on points already moves a singleton out of its orbit.
    """
    _check_degree(G, degree_cap, "Orbit closure")
    labels = _mask_labels(G)
    if len(set(labels)) == G.degree + 1:
        return PermutationGroup.symmetric(G.degree)
    closure = G
    for p in permutations(range(G.degree)):
        if p in closure.element_set or not _preserves_labels(p, labels):
            continue
        closure = PermutationGroup(degree=G.degree, generators=closure.generators + (p,))
        LOGGER.debug(f"Orbit closure grows by {format_cycles(p)} to order {closure.order()}")
    return closure


def is_orbit_closed(G: PermutationGroup, degree_cap: int = DEFAULTS.closure_degree_cap) -> bool:
    return orbit_closure(G, degree_cap).order() == G.order()


@dataclass(frozen=True)
class RelationGroupVerdict:
    holds: bool
    witness: tuple[Element, ...] | None = None
    reason: str = ""

    def to_json(self) -> dict:
        payload = {"holds": self.holds, "reason": self.reason}
        if self.witness is not None:
            payload["witness"] = [list(a) for a in self.witness]
        return payload


def is_relation_group(
    G: PermutationGroup,
    degree_cap: int = DEFAULTS.relation_degree_cap,
    candidate_cap: int = DEFAULTS.relation_candidate_cap,
) -> RelationGroupVerdict:
    """Whether ⟨G⟩ is the full stabiliser of some family R of subsets.

    Any such R is a union of G-orbits on subsets. A permutation p outside G
    stabilises R iff R is a union of components of the graph joining the
    orbit of a to the orbit of a^p, so each p contributes a list of components
    and R must cut one of them for every p. Candidates are tried by
    increasing number of orbits, so the witness is minimal.
    """
    _check_degree(G, degree_cap, "Relation-group search")
    if not is_orbit_closed(G, degree_cap=degree_cap):
        return RelationGroupVerdict(False, reason="not orbit-closed: a larger group has the same subset orbits")

    labels = _mask_labels(G)
    orbit_ids = {label: i for i, label in enumerate(dict.fromkeys(labels))}
    orbit_of = [orbit_ids[label] for label in labels]
    constraints: set[tuple[int, ...]] = set()
    for p in permutations(range(G.degree)):
        if p in G.element_set:
            continue
        components = UnionFind(range(len(orbit_ids)))
        for mask, image in enumerate(_mask_images(p)):
            components.union(orbit_of[mask], orbit_of[image])
        blocks = components.partition().non_singletons()
        constraints.add(tuple(sum(1 << o for o in block) for block in blocks))

    tried = 0
    for size in range(len(orbit_ids) + 1):
        for chosen in combinations(range(len(orbit_ids)), size):
            tried += 1
            if tried > candidate_cap:
                raise CapExceeded(f"Relation-group search tried {candidate_cap} orbit unions without a witness")
            R = sum(1 << o for o in chosen)
            if all(any(R & block not in (0, block) for block in blocks) for blocks in constraints):
                witness = tuple(
                    tuple(x for x in range(G.degree) if mask >> x & 1)
                    for mask in range(len(labels))
                    if R >> orbit_of[mask] & 1
                )
                LOGGER.info(f"Relation-group witness with {size} orbits after {tried} candidates")
                return RelationGroupVerdict(True, witness=witness, reason=f"union of {size} subset orbits")
    return RelationGroupVerdict(False, reason="no union of subset orbits has stabiliser exactly G")


def regular_powerset_orbit(
    G: PermutationGroup, degree_cap: int = DEFAULTS.powerset_degree_cap
) -> tuple[Element, ...] | None:
    """First orbit on subsets whose length equals |G|, if any."""
    _check_degree(G, degree_cap, "Power-set orbit search")
    order = G.order()
    for orbit in orbits(G, OrbitAction.power_set, cap=1 << degree_cap).orbits:
        if len(orbit) == order:
            return orbit
    return None


@dataclass
class TransferCounts:
    n: int
    pairs: int = 0
    succeeded: int = 0
    via_witness: int = 0
    no_witness: int = 0
    no_h: int = 0
    mismatch: int = 0

    @property
    def failed(self) -> int:
        return self.no_h + self.mismatch

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pairs": self.pairs,
            "succeeded": self.succeeded,
            "viaWitness": self.via_witness,
            "noWitness": self.no_witness,
            "noH": self.no_h,
            "mismatch": self.mismatch,
        }


@dataclass
class TransferReport:
    levels: list[TransferCounts] = field(default_factory=list)

    @property
    def fully_succeeded(self) -> bool:
        return all(level.failed == 0 for level in self.levels)

    @property
    def first_failure(self) -> int | None:
        return next((level.n for level in self.levels if level.failed), None)

    def to_json(self) -> dict:
        return {
            "levels": [level.to_json() for level in self.levels],
            "fullySucceeded": self.fully_succeeded,
            "firstFailure": self.first_failure,
        }


def _witness(G: PermutationGroup, U: Element) -> frozenset[int] | None:
    """Least V ⊇ U whose setwise stabiliser in G fixes U pointwise."""
    rest = [x for x in range(G.degree) if x not in U]
    for extra in range(len(rest) + 1):
        for added in combinations(rest, extra):
            V = frozenset(U + added)
            if all(g[u] == u for g in G.element_list if frozenset(g[x] for x in V) == V for u in U):
                return V
    return None


def orbit_transfer_check(
    G: PermutationGroup, H: PermutationGroup, nmax: int, cap: int = DEFAULTS.orbit_cap
) -> TransferReport:
    """Replay the local-rigidity transfer argument for every G-equivalent pair of n-tuples.

    For ū1 and ū2 = ū1^g, a witness V ⊇ U1 whose setwise stabiliser fixes U1
    pointwise is sought; then any h in H with V^h = V^g must send ū1 to ū2.
    Without a witness the pair is transferred directly when some h does it.
    """
    _same_degree(G, H)
    if not H.is_subgroup_of(G):
        raise ValueError("H must be a subgroup of G")
    if G.order() > cap:
        raise CapExceeded(f"Group order {G.order()} exceeds the cap {cap}")
    report = TransferReport()
    witnesses: dict[frozenset[int], frozenset[int] | None] = {}
    for n in range(1, nmax + 1):
        counts = TransferCounts(n=n)
        for orbit in orbits(G, OrbitAction.tuples, n, cap).orbits:
            u1 = orbit[0]
            key = frozenset(u1)
            if key not in witnesses:
                witnesses[key] = _witness(G, u1)
            V = witnesses[key]
            for u2 in orbit:
                counts.pairs += 1
                g = next(g for g in G.element_list if act(g, u1, OrbitAction.tuples) == u2)
                if V is None:
                    counts.no_witness += 1
                    if any(act(h, u1, OrbitAction.tuples) == u2 for h in H.element_list):
                        counts.succeeded += 1
                    else:
                        counts.no_h += 1
                    continue
                V2 = frozenset(g[x] for x in V)
                h = next((h for h in H.element_list if frozenset(h[x] for x in V) == V2), None)
                if h is None:
                    counts.no_h += 1
                elif act(h, u1, OrbitAction.tuples) != u2:
                    counts.mismatch += 1
                else:
                    counts.succeeded += 1
                    counts.via_witness += 1
        LOGGER.info(f"Transfer at n={n}: {counts.succeeded}/{counts.pairs} succeeded, {counts.failed} failed")
        report.levels.append(counts)
    return report
