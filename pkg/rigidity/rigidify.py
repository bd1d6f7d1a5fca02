"""Finite rigidifying extensions of a target set U inside an oracle structure.

Tournaments: for every ordered pair (u_i, u_j) a block V_ij of out-neighbours
of u_i that beat u_j is added, totally ordered and a module of the result.
Block sizes are 4, 8, 16, ... in lexicographic pair order, so every
non-singleton maximal good set has its own size and the result is rigid.

Ordered graphs: separating blocks P_ij of pairwise distinct sizes in
2..m+1 are placed first (m = C(n, 2)). For each ≈_W class C holding a
target u, every other c in C gets a block S_cu of its own size above m+1
drawn from the appropriate neighbourhood difference. The result is accepted
once the full automorphism search confirms that U is fixed pointwise.
"""

from dataclasses import dataclass, field
from itertools import combinations, islice, permutations
from logging import getLogger
from math import comb
from typing import Iterable, Iterator

from rigidity.analysis import ClassType, approx_classes, maximal_good_partition
from rigidity.autgroup import fixes_pointwise
from rigidity.config import DEFAULTS
from rigidity.errors import (
    BudgetExhausted,
    CapExceeded,
    ConstructionFailed,
    ExtractionFailed,
    KindMismatch,
    ProbeUndecided,
)
from rigidity.indiscernible import IndiscernibilityProblem, IndiscernibleFamily, extract, verify
from rigidity.ledger import BuildLedger
from rigidity.oracles import Comparison, DiffSide, OracleSpec, OracleView, iter_difference, query_related
from rigidity.structures import OrderedGraph, Structure, Tournament, structure_from_json

LOGGER = getLogger(__name__)

# buckets are grown to this multiple of the block size before a block is cut
CLUSTER_FACTOR = 4
# a bucket this many times the block size without a homogeneous subset is a failed extraction
STALL_FACTOR = 64
ATTEMPT_SKIP = 8


@dataclass(frozen=True)
class SizeBounds:
    n: int
    m: int
    k: int
    graph_bound: int
    tournament_sum: int
    tournament_closed_form: int

    @property
    def discrepancy(self) -> bool:
        return self.tournament_sum != self.tournament_closed_form

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "graphBound": self.graph_bound,
            "tournamentSum": self.tournament_sum,
            "tournamentClosedForm": self.tournament_closed_form,
            "discrepancy": self.discrepancy,
        }


def size_bounds(n: int) -> SizeBounds:
    if n < 1:
        raise ValueError(f"Target sets have at least one vertex, got n={n}")
    m = comb(n, 2)
    k = (m + 1) * (m + 2) // 2 - 1
    pairs = 2 * m
    return SizeBounds(
        n=n,
        m=m,
        k=k,
        graph_bound=(2 * n + k * (2 * m + k + 5)) // 2,
        tournament_sum=n + sum(2**i for i in range(2, pairs + 2)),
        tournament_closed_form=n + 2 ** (n * n - n + 2) - 2,
    )


@dataclass(frozen=True)
class RigidifyConfig:
    oracle: OracleSpec
    targets: tuple[int, ...]
    budget: int = DEFAULTS.scan_budget
    probe: int = DEFAULTS.probe
    attempts: int = DEFAULTS.attempts
    search_cap: int = DEFAULTS.search_cap
    node_budget: int = DEFAULTS.node_budget

    def __post_init__(self):
        if not self.targets:
            raise ValueError("At least one target vertex is required")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"Duplicate targets in {list(self.targets)}")
        if min(self.targets) < 0:
            raise ValueError(f"Targets must be naturals, got {list(self.targets)}")
        if self.budget <= 0 or self.probe <= 0 or self.attempts <= 0:
            raise ValueError("budget, probe and attempts must be positive")

    @property
    def U(self) -> tuple[int, ...]:
        return tuple(sorted(self.targets))

    def to_json(self) -> dict:
        return {
            "oracle": self.oracle.to_json(),
            "targets": list(self.U),
            "budget": self.budget,
            "probe": self.probe,
            "attempts": self.attempts,
        }


@dataclass(frozen=True)
class Certificate:
    accepted: bool
    reason: str = ""

    def __str__(self) -> str:
        return "accepted" if self.accepted else f"rejected: {self.reason}"


@dataclass
class RigidifyReport:
    built: Structure
    embedded_u: tuple[int, ...]
    vertices: tuple[int, ...]
    bounds: SizeBounds
    ledger: BuildLedger = field(default_factory=BuildLedger)
    certificate: str | None = None
    fixes_u: bool | None = None

    @property
    def size(self) -> int:
        return self.built.n

    @property
    def within_bound(self) -> bool:
        if isinstance(self.built, Tournament):
            return self.size == self.bounds.tournament_sum
        return self.size <= self.bounds.graph_bound

    def to_json(self) -> dict:
        payload = {
            "structure": self.built.to_json(),
            "embeddedU": list(self.embedded_u),
            "vertices": list(self.vertices),
            "ledger": self.ledger.to_json(),
            "bounds": self.bounds.to_json() | {"size": self.size, "respected": self.within_bound},
        }
        if self.certificate is not None:
            payload["certificate"] = self.certificate
        if self.fixes_u is not None:
            payload["fixesU"] = self.fixes_u
        return payload

    @classmethod
    def from_json(cls, data: dict) -> "RigidifyReport":
        return cls(
            built=structure_from_json(data["structure"]),
            embedded_u=tuple(data["embeddedU"]),
            vertices=tuple(data.get("vertices", range(data["structure"]["n"]))),
            bounds=size_bounds(len(data["embeddedU"])),
            ledger=BuildLedger(entries=list(data.get("ledger", []))),
            certificate=data.get("certificate"),
            fixes_u=data.get("fixesU"),
        )


def certificate_check(t: Tournament, U: Iterable[int] = ()) -> Certificate:
    """Polynomial sufficient condition for Aut(t) to be trivial.

    Accepted when the non-singleton maximal good sets have pairwise distinct
    sizes (so each is fixed setwise, hence pointwise) and every two vertices
    outside their union F are told apart by some vertex of F. Separation is
    only asked of pairs outside F: vertices inside F are already fixed by the
    size condition. When U is given, no maximal good set may hold two of its
    points either.
    """
    U = set(U)
    blocks = maximal_good_partition(t).non_singletons()
    seen: dict[int, tuple[int, ...]] = {}
    for block in blocks:
        if len(block) in seen:
            return Certificate(False, f"maximal good sets {list(seen[len(block)])} and {list(block)} share size {len(block)}")
        seen[len(block)] = block
        if len(U.intersection(block)) > 1:
            return Certificate(False, f"maximal good set {list(block)} holds {sorted(U.intersection(block))} from U")
    F = sum(1 << v for block in blocks for v in block)
    outside = [v for v in range(t.n) if not F >> v & 1]
    out = t.out_masks
    for x, y in combinations(outside, 2):
        if not (out[x] ^ out[y]) & F:
            return Certificate(False, f"{x} and {y} are not separated by the good sets")
    return Certificate(True)


def _block_rows(o: OracleSpec, v: int, placed: list[int], spans: list[tuple[int, int]]) -> tuple | None:
    """Relation of each placed vertex to v, or None when v splits an earlier block."""
    start = spans[0][0] if spans else len(placed)
    row = [query_related(o, w, v) for w in placed[:start]]
    for a, b in spans:
        first = query_related(o, placed[a], v)
        for w in placed[a + 1 : b]:
            if query_related(o, w, v) != first:
                return None
        row.append(first)
    return tuple(row)


def _chain(o: OracleSpec, candidates: list[int]) -> list[int]:
    """Greedy insertion into a transitive chain; chain[a] -> chain[b] whenever a < b."""
    chain: list[int] = []
    for v in candidates:
        beats_v = [query_related(o, c, v) for c in chain]
        position = beats_v.index(False) if False in beats_v else len(chain)
        if all(beats_v[:position]) and not any(beats_v[position:]):
            chain.insert(position, v)
    return chain


def _tournament_subset(o: OracleSpec, bucket: list[int], size: int) -> list[int] | None:
    chain = _chain(o, bucket)
    if len(chain) < size:
        return None
    start = (len(chain) - size) // 2
    return chain[start : start + size]


def _graph_subset(view: OracleView, bucket: list[int], size: int, placed: list[int], spans) -> list[int] | None:
    if view.spec.is_ordered:
        # the order is probed only for buckets that are ready to be cut
        groups: dict[tuple, list[int]] = {}
        for v in bucket:
            row = tuple(view.compare(w, v) for w in placed)
            if any(len(set(row[a:b])) > 1 for a, b in spans):
                continue
            groups.setdefault(row, []).append(v)
        bucket = max(groups.values(), key=len, default=[])
        if len(bucket) < size:
            return None
    ambient, relabel = view.sample(placed + bucket)
    index = {v: i for i, v in enumerate(relabel)}
    problem = IndiscernibilityProblem(
        ambient=ambient,
        A=tuple(index[w] for w in placed),
        Q=(tuple(index[v] for v in bucket),),
        n=size,
    )
    try:
        family = extract(problem)
    except ExtractionFailed:
        return None
    return [relabel[i] for i in family.blocks[0]]


def _grow_block(
    view: OracleView,
    stream: Iterator[int],
    size: int,
    placed: list[int],
    spans: list[tuple[int, int]],
) -> list[int]:
    """Draw a homogeneous block from the stream with a fixed type over every placed vertex.

    Candidates are bucketed by their relation to the placed vertices and must
    relate uniformly to each block listed in ``spans``. A bucket is first cut
    at four times the block size: a chain for tournaments, an indiscernible
    sequence for graphs.
    """
    o = view.spec
    first_cut = CLUSTER_FACTOR * size
    taken = set(placed)
    buckets: dict[tuple, list[int]] = {}
    thresholds: dict[tuple, int] = {}
    for v in stream:
        if v in taken:
            continue
        row = _block_rows(o, v, placed, spans)
        if row is None:
            continue
        bucket = buckets.setdefault(row, [])
        bucket.append(v)
        if len(bucket) < thresholds.get(row, first_cut):
            continue
        if o.is_tournament:
            chosen = _tournament_subset(o, bucket, size)
        else:
            chosen = _graph_subset(view, bucket, size, placed, spans)
        if chosen:
            return chosen
        if len(bucket) >= STALL_FACTOR * max(size, 2):
            raise ExtractionFailed(
                f"No homogeneous block of size {size} among {len(bucket)} equally placed candidates",
                bucket[:size],
            )
        thresholds[row] = 2 * len(bucket)
    raise BudgetExhausted(f"Candidate stream ended before a block of size {size} was found")


def _verify_family(built: Structure, relabel: tuple[int, ...], base: Iterable[int], blocks: list[list[int]]):
    index = {v: i for i, v in enumerate(relabel)}
    family = IndiscernibleFamily(
        blocks=tuple(tuple(index[v] for v in block) for block in blocks), color_class_size=0
    )
    return verify(built, [index[v] for v in base], family)


def _embed(relabel: tuple[int, ...], U: Iterable[int]) -> tuple[int, ...]:
    index = {v: i for i, v in enumerate(relabel)}
    return tuple(index[u] for u in U)


def _record_blocks(ledger: BuildLedger, relabel: tuple[int, ...], blocks: list[tuple[str, str, list[int]]]):
    index = {v: i for i, v in enumerate(relabel)}
    for name, role, members in blocks:
        ledger.add_block(name, [index[v] for v in members], role, naturals=list(members))


def rigidify_tournament(cfg: RigidifyConfig) -> RigidifyReport:
    o = cfg.oracle
    if not o.is_tournament:
        raise KindMismatch(f"Tournament construction needs a tournament oracle, got {o.kind.value}")
    U = list(cfg.U)
    n = len(U)
    bounds = size_bounds(n)
    view = OracleView(spec=o, probe=cfg.probe)
    ledger = BuildLedger()

    placed = list(U)
    spans: list[tuple[int, int]] = []
    blocks: list[tuple[str, str, list[int]]] = []
    ordered_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for t, (i, j) in enumerate(ordered_pairs):
        size = 2 ** (t + 2)
        stream = iter_difference(o, U[i], U[j], DiffSide.x_minus_y, exclude=placed, budget=cfg.budget)
        members = _grow_block(view, stream, size, placed, spans)
        LOGGER.info(f"Block V_{i}{j} of size {size} between {U[i]} and {U[j]}")
        spans.append((len(placed), len(placed) + size))
        placed.extend(members)
        blocks.append((f"V_{i}{j}", f"{U[i]}->V->{U[j]}", members))

    built, relabel = view.sample(placed)
    embedded = _embed(relabel, U)
    _record_blocks(ledger, relabel, blocks)

    if counterexample := _verify_family(built, relabel, U, [b[2] for b in blocks]):
        raise ConstructionFailed(f"Blocks are not mutually indiscernible over U: {counterexample.reason}")
    certificate = certificate_check(built, embedded)
    ledger.note("certificate", verdict=str(certificate))
    if not certificate.accepted:
        raise ConstructionFailed(f"Certificate rejected the built tournament: {certificate.reason}")
    LOGGER.info(f"Built a rigid tournament on {built.n} vertices around {U}")
    return RigidifyReport(
        built=built,
        embedded_u=embedded,
        vertices=relabel,
        bounds=bounds,
        ledger=ledger,
        certificate=str(certificate),
    )


def _as_ordered(s: Structure) -> OrderedGraph:
    return s if isinstance(s, OrderedGraph) else OrderedGraph.unordered(s)


def _separating_side(view: OracleView, a: int, b: int) -> tuple[int, int]:
    """(x, y) such that Γ(x)∖Γ(y) is the infinite side that separates a and b."""
    match view.compare(a, b):
        case Comparison.greater:
            return b, a
        case Comparison.unknown:
            raise ProbeUndecided(f"Comparability of targets {a} and {b} is undecided; raise the probe depth")
        case _:
            return a, b


def _separated(ambient: Structure, index: dict[int, int], U: list[int], blocks: list[list[int]]) -> bool:
    for a, b in combinations(U, 2):
        if not any(
            ambient.has_edge(index[a], index[block[0]]) != ambient.has_edge(index[b], index[block[0]])
            for block in blocks
        ):
            return False
    return True


def _build_ordered(
    cfg: RigidifyConfig, view: OracleView, attempt: int, sizes: tuple[int, ...], ledger: BuildLedger
) -> RigidifyReport:
    o = view.spec
    U = list(cfg.U)
    n = len(U)
    m = comb(n, 2)

    def stream(x: int, y: int, exclude: list[int]) -> Iterator[int]:
        candidates = iter_difference(o, x, y, DiffSide.x_minus_y, exclude=exclude, budget=cfg.budget)
        return islice(candidates, attempt * ATTEMPT_SKIP, None)

    placed = list(U)
    spans: list[tuple[int, int]] = []
    p_blocks: list[tuple[str, str, list[int]]] = []
    for (i, j), size in zip(combinations(range(n), 2), sizes):
        x, y = _separating_side(view, U[i], U[j])
        members = _grow_block(view, stream(x, y, placed), size, placed, spans)
        spans.append((len(placed), len(placed) + size))
        placed.extend(members)
        p_blocks.append((f"P_{i}{j}", f"Γ({x})∖Γ({y})", members))

    while True:
        ambient, relabel = view.sample(placed)
        index = {v: i for i, v in enumerate(relabel)}
        classes = approx_classes(ambient, range(ambient.n))
        owner = {index[v]: t for t, (_, _, members) in enumerate(p_blocks) for v in members}
        merged = [
            sorted({owner[v] for v in block if v in owner})
            for block in classes.partition.blocks
            if len({owner[v] for v in block if v in owner}) > 1
        ]
        if not merged:
            break
        drop = merged[0][-1]
        remaining = [members for t, (_, _, members) in enumerate(p_blocks) if t != drop]
        if not _separated(ambient, index, U, remaining):
            raise ExtractionFailed(f"≈_W merges {[p_blocks[t][0] for t in merged[0]]} and no block can be dropped")
        ledger.note("drop", attempt=attempt, block=p_blocks[drop][0])
        LOGGER.debug(f"Dropping {p_blocks[drop][0]}: ≈_W-equivalent to another block")
        del p_blocks[drop]
        placed = list(U) + [v for _, _, members in p_blocks for v in members]
        spans, start = [], len(U)
        for _, _, members in p_blocks:
            spans.append((start, start + len(members)))
            start += len(members)

    if ClassType.mixed in classes.types:
        raise ExtractionFailed("≈_W has a class that is neither complete nor null")
    sizes_seen = [len(block) for block in classes.partition.non_singletons()]
    if len(sizes_seen) != len(set(sizes_seen)):
        raise ExtractionFailed(f"≈_W classes of equal size: {sorted(sizes_seen)}")
    ledger.note(
        "approx",
        attempt=attempt,
        classes=[[relabel[v] for v in block] for block in classes.partition.blocks],
        types=[t.value for t in classes.types],
    )

    triggers: list[tuple[int, int, ClassType]] = []
    for block, kind in zip(classes.partition.blocks, classes.types):
        holders = [relabel[v] for v in block if relabel[v] in U]
        if len(block) < 2 or not holders:
            continue
        u = holders[0]
        for c in (relabel[v] for v in block if relabel[v] != u):
            relation = view.compare(c, u)
            if kind == ClassType.null and relation != Comparison.greater:
                triggers.append((c, u, kind))
            elif kind == ClassType.complete and relation != Comparison.less:
                triggers.append((c, u, kind))
    ledger.note("triggers", attempt=attempt, pairs=[[c, u, kind.value] for c, u, kind in triggers])

    s_blocks: list[tuple[str, str, list[int]]] = []
    base = list(placed)
    # S blocks only need a fixed type over W, so only S blocks are kept uniform
    s_spans: list[tuple[int, int]] = []
    for t, (c, u, kind) in enumerate(triggers):
        size = m + 2 + t
        x, y = (c, u) if kind == ClassType.null else (u, c)
        members = _grow_block(view, stream(x, y, placed), size, placed, s_spans)
        s_spans.append((len(placed), len(placed) + size))
        placed.extend(members)
        s_blocks.append((f"S_{c}_{u}", f"Γ({x})∖Γ({y})", members))

    built, relabel = view.sample(placed)
    built = _as_ordered(built)
    embedded = _embed(relabel, U)
    for label, base_set, family in (("P", U, p_blocks), ("S", base, s_blocks)):
        if counterexample := _verify_family(built, relabel, base_set, [b[2] for b in family]):
            raise ExtractionFailed(f"{label} blocks are not mutually indiscernible: {counterexample.reason}")
    _record_blocks(ledger, relabel, p_blocks + s_blocks)
    return RigidifyReport(built=built, embedded_u=embedded, vertices=relabel, bounds=size_bounds(n), ledger=ledger)


def rigidify_ordered_graph(cfg: RigidifyConfig) -> RigidifyReport:
    o = cfg.oracle
    if o.is_tournament:
        raise KindMismatch(f"Ordered-graph construction needs a graph oracle, got {o.kind.value}")
    U = list(cfg.U)
    n = len(U)
    view = OracleView(spec=o, probe=cfg.probe)
    caps = {"search_cap": cfg.search_cap, "node_budget": cfg.node_budget}

    if n == 1:
        built, relabel = view.sample(U)
        return RigidifyReport(
            built=_as_ordered(built),
            embedded_u=(0,),
            vertices=relabel,
            bounds=size_bounds(1),
            fixes_u=True,
        )
    for a, b in combinations(U, 2):
        _separating_side(view, a, b)

    m = comb(n, 2)
    schedules = list(islice(permutations(range(2, m + 2)), cfg.attempts))
    for attempt in range(cfg.attempts):
        sizes = schedules[attempt % len(schedules)]
        ledger = BuildLedger()
        ledger.note("attempt", attempt=attempt, sizes=list(sizes))
        try:
            report = _build_ordered(cfg, view, attempt, sizes, ledger)
        except (ExtractionFailed, BudgetExhausted) as error:
            LOGGER.warning(f"Attempt {attempt} for targets {U} failed: {error}")
            continue
        try:
            fixed = fixes_pointwise(report.built, report.embedded_u, **caps)
        except CapExceeded as error:
            LOGGER.warning(f"Attempt {attempt}: automorphism search gave up: {error}")
            continue
        if fixed:
            report.fixes_u = True
            ledger.note("verified", attempt=attempt, size=report.size)
            LOGGER.info(f"Built an ordered graph on {report.size} vertices fixing {U}")
            return report
        LOGGER.warning(f"Attempt {attempt}: an automorphism moves a target, retrying")
    raise ConstructionFailed(f"No rigidifying extension of {U} found in {cfg.attempts} attempts")
