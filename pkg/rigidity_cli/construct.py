from argparse import Namespace
from logging import getLogger

from rigidity.autgroup import automorphisms, fixes_pointwise
from rigidity.config import Settings
from rigidity.errors import KindMismatch
from rigidity.oracles import sample_structure
from rigidity.rigidify import (
    RigidifyConfig,
    certificate_check,
    rigidify_ordered_graph,
    rigidify_tournament,
    size_bounds,
)
from rigidity.structures import OrderedGraph, Tournament, validate
from rigidity_cli.options import UsageError, parse_oracle, parse_targets, read_structure

LOGGER = getLogger(__name__)


def run_sample(args: Namespace, settings: Settings) -> dict:
    oracle = parse_oracle(args)
    structure, vertices = sample_structure(oracle, parse_targets(args.targets), settings.probe)
    return {"structure": structure.to_json(), "vertices": list(vertices)}


def run_rigidify(args: Namespace, settings: Settings) -> dict:
    cfg = RigidifyConfig(
        oracle=parse_oracle(args),
        targets=parse_targets(args.targets),
        budget=settings.scan_budget,
        probe=settings.probe,
        attempts=settings.attempts,
        search_cap=settings.search_cap,
        node_budget=settings.node_budget,
    )
    LOGGER.info(f"Rigidifying {list(cfg.U)} as {args.kind} on {args.oracle}")
    if args.kind == "tournament":
        report = rigidify_tournament(cfg)
    else:
        report = rigidify_ordered_graph(cfg)
    LOGGER.info(f"Built {report.size} vertices; bound respected: {report.within_bound}")
    if args.ledger:
        report.ledger.write_jsonl(args.ledger)
        LOGGER.info(f"Wrote {len(report.ledger.entries)} ledger events to {args.ledger}")
    return report.to_json()


def run_verify(args: Namespace, settings: Settings) -> dict:
    """Check a structure or a rigidify report; rejection is a result, not an error."""
    structure, payload = read_structure(args.input)
    U = payload.get("embeddedU")
    result = {"mode": args.mode, "n": structure.n}
    if violation := validate(structure):
        return result | {"verdict": f"rejected: {violation}"}

    if args.mode == "certificate":
        if not isinstance(structure, Tournament):
            raise KindMismatch("The certificate check applies to tournaments only")
        certificate = certificate_check(structure, U or ())
        return result | {"verdict": str(certificate)}

    caps = {"search_cap": settings.search_cap, "node_budget": settings.node_budget}
    group = automorphisms(structure, **caps)
    result |= {"order": group.order}
    if U is not None and isinstance(structure, OrderedGraph):
        fixed = fixes_pointwise(structure, U, **caps)
        return result | {"fixesU": fixed, "verdict": "accepted" if fixed else "rejected: an automorphism moves U"}
    if group.order == 1:
        return result | {"verdict": "accepted"}
    return result | {"verdict": f"rejected: automorphism group of order {group.order}"}


def run_bounds(args: Namespace, settings: Settings) -> dict:
    if args.n < 1:
        raise UsageError("n", f"target size must be positive, got {args.n}")
    return size_bounds(args.n).to_json()
