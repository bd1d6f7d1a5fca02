"""Seeded presentations of countable structures.

Every oracle is a pure function of its ``OracleSpec``. The vertex set is the natural
numbers and relations are computed on demand:

rado
    For i < j, i ~ j iff bit i of j is 1.
generic-tournament
    For i < j, i -> j iff ``prf(seed, i, j)`` is 1, otherwise j -> i.
layered-rado
    2k is a base vertex and 2k+1 its shadow. Bases follow the rado rule on
    (k, k'). Shadow 2k+1 is adjacent exactly to the bases 2m with m even and
    m ~ k in the rado graph. Shadows are never adjacent to each other, nor to
    their own base.
local-order
    Vertex v sits at angle ``theta(v) = v * K mod 2**64`` (in units of a full
    turn) with K odd. x -> y iff y lies strictly less than half a turn
    clockwise from x.
finite
    A wrapped finite structure; queries outside it are errors.

``prf`` is bit-exact and platform independent:

    z = seed ^ (lo * 0x9E3779B97F4A7C15 mod 2**64) ^ rotl64(hi, 17)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z = z ^ (z >> 31)
    prf = parity(z)
"""

from dataclasses import dataclass, field
from enum import Enum
from heapq import merge
from itertools import combinations, count
from logging import getLogger
from typing import Iterable, Iterator

from rigidity.config import DEFAULTS
from rigidity.errors import BudgetExhausted, KindMismatch, RigidityError, VertexOutOfRange
from rigidity.structures import (
    Graph,
    OrderedGraph,
    Structure,
    Tournament,
    induced,
    structure_from_json,
)

LOGGER = getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
HALF_TURN = 1 << 63


class OracleKind(Enum):
    rado = "rado"
    generic_tournament = "generic-tournament"
    layered_rado = "layered-rado"
    local_order = "local-order"
    finite = "finite"


CLI_ALIASES = {
    "rado": OracleKind.rado,
    "generic": OracleKind.generic_tournament,
    "generic-tournament": OracleKind.generic_tournament,
    "layered": OracleKind.layered_rado,
    "layered-rado": OracleKind.layered_rado,
    "local": OracleKind.local_order,
    "local-order": OracleKind.local_order,
}


class DiffSide(Enum):
    """Which neighbourhood difference to enumerate: x_minus_y is Γ(x)∖Γ(y)."""

    x_minus_y = "x-y"
    y_minus_x = "y-x"


class Comparison(Enum):
    less = "x<y"
    greater = "y<x"
    incomparable = "incomparable"
    unknown = "unknown"


@dataclass(frozen=True)
class OracleSpec:
    kind: OracleKind
    seed: int = 0
    wrapped: Structure | None = None

    def __post_init__(self):
        if (self.kind == OracleKind.finite) != (self.wrapped is not None):
            raise KindMismatch("A wrapped structure is required exactly for the finite oracle")

    @classmethod
    def parse(cls, text: str) -> "OracleSpec":
        """Parse the command-line form ``kind[:seed]``."""
        name, _, seed = text.partition(":")
        if name not in CLI_ALIASES:
            raise KindMismatch(f"Unknown oracle {name!r}; expected one of {sorted(CLI_ALIASES)}")
        return cls(kind=CLI_ALIASES[name], seed=int(seed) if seed else 0)

    @classmethod
    def from_json(cls, data: dict) -> "OracleSpec":
        if data["kind"] == OracleKind.finite.value:
            return cls(kind=OracleKind.finite, wrapped=structure_from_json(data["structure"]))
        return cls(kind=OracleKind(data["kind"]), seed=int(data.get("seed", 0)))

    def to_json(self) -> dict:
        match self.kind:
            case OracleKind.finite:
                return {"kind": "finite", "structure": self.wrapped.to_json()}
            case OracleKind.rado | OracleKind.layered_rado:
                return {"kind": self.kind.value}
            case _:
                return {"kind": self.kind.value, "seed": self.seed}

    @property
    def is_tournament(self) -> bool:
        match self.kind:
            case OracleKind.generic_tournament | OracleKind.local_order:
                return True
            case OracleKind.finite:
                return isinstance(self.wrapped, Tournament)
            case _:
                return False

    @property
    def is_ordered(self) -> bool:
        match self.kind:
            case OracleKind.layered_rado:
                return True
            case OracleKind.finite:
                return isinstance(self.wrapped, OrderedGraph)
            case _:
                return False


def rotl64(value: int, shift: int) -> int:
    value &= MASK64
    return ((value << shift) | (value >> (64 - shift))) & MASK64


def prf(seed: int, lo: int, hi: int) -> int:
    z = (seed & MASK64) ^ (lo * GOLDEN & MASK64) ^ rotl64(hi, 17)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    z ^= z >> 31
    return z.bit_count() & 1


def rado_edge(x: int, y: int) -> bool:
    if x == y:
        return False
    lo, hi = (x, y) if x < y else (y, x)
    return bool(hi >> lo & 1)


def layered_edge(x: int, y: int) -> bool:
    if x == y:
        return False
    match x % 2, y % 2:
        case 0, 0:
            return rado_edge(x // 2, y // 2)
        case 1, 1:
            return False
        case _:
            base, shadow = (x, y) if x % 2 == 0 else (y, x)
            m, k = base // 2, shadow // 2
            return m % 2 == 0 and rado_edge(m, k)


def angle(seed: int, v: int) -> int:
    multiplier = (GOLDEN + 2 * seed) & MASK64 | 1
    return v * multiplier & MASK64


def local_arc(seed: int, x: int, y: int) -> bool:
    if x == y:
        return False
    return (angle(seed, y) - angle(seed, x)) & MASK64 < HALF_TURN


def _finite_check(o: OracleSpec, *vertices: int):
    for v in vertices:
        if not 0 <= v < o.wrapped.n:
            raise VertexOutOfRange(v, o.wrapped.n)


def query_edge(o: OracleSpec, x: int, y: int) -> bool:
    match o.kind:
        case OracleKind.rado:
            return rado_edge(x, y)
        case OracleKind.layered_rado:
            return layered_edge(x, y)
        case OracleKind.finite if not o.is_tournament:
            _finite_check(o, x, y)
            return x != y and o.wrapped.has_edge(x, y)
        case _:
            raise KindMismatch(f"Edge query on a {o.kind.value} tournament oracle")


def query_arc(o: OracleSpec, x: int, y: int) -> bool:
    match o.kind:
        case OracleKind.generic_tournament:
            if x == y:
                return False
            bit = prf(o.seed, min(x, y), max(x, y))
            return bool(bit) == (x < y)
        case OracleKind.local_order:
            return local_arc(o.seed, x, y)
        case OracleKind.finite if o.is_tournament:
            _finite_check(o, x, y)
            return x != y and o.wrapped.has_arc(x, y)
        case _:
            raise KindMismatch(f"Arc query on a {o.kind.value} graph oracle")


def query_related(o: OracleSpec, x: int, y: int) -> bool:
    """Edge for graph kinds, arc x -> y for tournament kinds."""
    return query_arc(o, x, y) if o.is_tournament else query_edge(o, x, y)


def _rado_stream(x: int) -> Iterator[int]:
    # bits of x below x, then every z > x carrying bit x
    for i in range(min(x, x.bit_length())):
        if x >> i & 1:
            yield i
    block = 1 << x
    for high in count():
        start = (2 * high + 1) * block
        yield from range(start, start + block)


def _scan(o: OracleSpec, x: int) -> Iterator[tuple[int, bool]]:
    """Ascending (z, z ∈ Γ(x)) pairs; pulled items are what the scan budget counts."""
    match o.kind:
        case OracleKind.rado:
            return ((z, True) for z in _rado_stream(x))
        case OracleKind.layered_rado if x % 2 == 0:
            k = x // 2
            bases = ((2 * m, True) for m in _rado_stream(k))
            if k % 2 == 1:
                return bases
            shadows = ((2 * j + 1, True) for j in _rado_stream(k))
            return merge(bases, shadows)
        case OracleKind.layered_rado:
            return ((2 * m, m % 2 == 0) for m in _rado_stream(x // 2))
        case OracleKind.finite:
            _finite_check(o, x)
            return ((z, query_related(o, x, z)) for z in range(o.wrapped.n))
        case _:
            return ((z, query_related(o, x, z)) for z in count())


@dataclass(frozen=True)
class DiffQuery:
    x: int
    y: int
    want: int
    side: DiffSide = DiffSide.x_minus_y
    exclude: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.want < 0:
            raise ValueError(f"want must be non-negative, got {self.want}")
        if self.x == self.y:
            raise ValueError(f"A difference needs two distinct vertices, got {self.x} twice")


def iter_difference(
    o: OracleSpec,
    x: int,
    y: int,
    side: DiffSide = DiffSide.x_minus_y,
    exclude: Iterable[int] = (),
    budget: int = DEFAULTS.scan_budget,
) -> Iterator[int]:
    """Lazily yield Γ(source)∖Γ(other) in increasing order, never x or y.

    Raises BudgetExhausted once ``budget`` candidates were examined, or when
    the scanned neighbourhood is finite and runs out.
    """
    source, other = (x, y) if side == DiffSide.x_minus_y else (y, x)
    skip = set(exclude) | {x, y}
    examined = 0
    for z, member in _scan(o, source):
        examined += 1
        if examined > budget:
            raise BudgetExhausted(
                f"Scan budget {budget} exhausted enumerating Γ({source})∖Γ({other}) on {o.kind.value}"
            )
        if member and z not in skip and not query_related(o, other, z):
            yield z
    raise BudgetExhausted(
        f"Γ({source}) is finite on {o.kind.value}; Γ({source})∖Γ({other}) ran out after {examined} candidates"
    )


def enumerate_difference(o: OracleSpec, q: DiffQuery, budget: int = DEFAULTS.scan_budget) -> list[int]:
    found: list[int] = []
    if q.want == 0:
        return found
    try:
        for z in iter_difference(o, q.x, q.y, q.side, q.exclude, budget):
            found.append(z)
            if len(found) == q.want:
                break
    except BudgetExhausted as error:
        raise BudgetExhausted(f"{error}; found {len(found)} of {q.want}", found) from None
    LOGGER.debug(f"Difference {q.side.value} of ({q.x},{q.y}) on {o.kind.value}: {found}")
    return found


def probe_mask(o: OracleSpec, x: int, probe: int) -> int:
    """Bitmask of Γ(x) ∩ [0, probe)."""
    mask = 0
    for z in range(probe):
        if z != x and query_edge(o, x, z):
            mask |= 1 << z
    return mask


def compare_masks(x: int, y: int, mask_x: int, mask_y: int, probe: int) -> Comparison:
    if probe <= 0:
        return Comparison.unknown
    keep = ~((1 << x) | (1 << y))
    only_x = (mask_x & ~mask_y & keep).bit_count()
    only_y = (mask_y & ~mask_x & keep).bit_count()
    threshold = max(1, probe // 8)
    if only_y == 0 and only_x >= threshold:
        return Comparison.less
    if only_x == 0 and only_y >= threshold:
        return Comparison.greater
    if only_x >= threshold and only_y >= threshold:
        return Comparison.incomparable
    return Comparison.unknown


def comparability(o: OracleSpec, x: int, y: int, probe: int = DEFAULTS.probe) -> Comparison:
    """Estimate x < y (Γ(x) almost contains Γ(y)) from the first ``probe`` naturals."""
    if o.is_tournament:
        raise KindMismatch(f"Comparability is defined for graph oracles, not {o.kind.value}")
    if o.kind == OracleKind.finite:
        return OracleView(spec=o, probe=probe).compare(x, y)
    if probe <= 0:
        return Comparison.unknown
    return compare_masks(x, y, probe_mask(o, x, probe), probe_mask(o, y, probe), probe)


@dataclass
class OracleView:
    """Memoised queries on one oracle, shared by a sampling or construction run."""

    spec: OracleSpec
    probe: int = DEFAULTS.probe
    _related: dict[tuple[int, int], bool] = field(default_factory=dict, repr=False)
    _masks: dict[int, int] = field(default_factory=dict, repr=False)

    def related(self, x: int, y: int) -> bool:
        key = (x, y) if self.spec.is_tournament or x < y else (y, x)
        if key not in self._related:
            self._related[key] = query_related(self.spec, *key)
        return self._related[key]

    def mask(self, x: int) -> int:
        if x not in self._masks:
            self._masks[x] = probe_mask(self.spec, x, self.probe)
        return self._masks[x]

    def compare(self, x: int, y: int) -> Comparison:
        if not self.spec.is_ordered:
            return Comparison.incomparable
        if self.spec.kind == OracleKind.finite:
            order = self.spec.wrapped
            if order.less(x, y):
                return Comparison.less
            if order.less(y, x):
                return Comparison.greater
            return Comparison.incomparable
        return compare_masks(x, y, self.mask(x), self.mask(y), self.probe)

    def sample(self, S: Iterable[int]) -> tuple[Structure, tuple[int, ...]]:
        """Finite structure induced on S, reindexed in increasing order.

        For layered oracles the order is the transitive closure of the pairwise
        comparisons on S.
        """
        relabel = tuple(sorted(set(S)))
        n = len(relabel)
        if self.spec.kind == OracleKind.finite:
            return induced(self.spec.wrapped, relabel)
        if self.spec.is_tournament:
            arcs = frozenset(
                (i, j) if self.related(relabel[i], relabel[j]) else (j, i)
                for i, j in combinations(range(n), 2)
            )
            return Tournament(n=n, arcs=arcs), relabel
        edges = frozenset(
            (i, j) for i, j in combinations(range(n), 2) if self.related(relabel[i], relabel[j])
        )
        base = Graph(n=n, edges=edges)
        if not self.spec.is_ordered:
            return base, relabel
        order = set()
        for i, j in combinations(range(n), 2):
            match self.compare(relabel[i], relabel[j]):
                case Comparison.less:
                    order.add((i, j))
                case Comparison.greater:
                    order.add((j, i))
        return OrderedGraph(base=base, order=frozenset(_transitive_closure(order, n))), relabel


def _transitive_closure(pairs: set[tuple[int, int]], n: int) -> set[tuple[int, int]]:
    above = [0] * n
    for a, b in pairs:
        above[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for a in range(n):
            reach = above[a]
            for b in range(n):
                if reach >> b & 1:
                    reach |= above[b]
            if reach != above[a]:
                above[a] = reach
                changed = True
    closure = {(a, b) for a in range(n) for b in range(n) if above[a] >> b & 1}
    if any(a == b for a, b in closure):
        raise RigidityError("Sampled comparabilities contain a cycle; raise the probe depth")
    return closure


def sample_structure(
    o: OracleSpec, S: Iterable[int], probe: int = DEFAULTS.probe
) -> tuple[Structure, tuple[int, ...]]:
    """Finite structure induced on S; the second element maps new ids to naturals."""
    return OracleView(spec=o, probe=probe).sample(S)
